#include "siailp/kg.hpp"

#include <fstream>


#include "siailp/errors.hpp"

namespace siailp {

std::int32_t Vocab::add(std::string_view name) {
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    const std::int32_t id = size();
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

std::optional<std::int32_t> Vocab::find(std::string_view name) const {
    if (auto it = ids_.find(std::string(name)); it != ids_.end()) return it->second;
    return std::nullopt;
}

const std::string& Vocab::name(std::int32_t id) const {
    if (id < 0 || id >= size()) throw DataError("vocabulary id out of range: " + std::to_string(id));
    return names_[static_cast<std::size_t>(id)];
}

std::string RelationVocab::display_name(RelationId r) const {
    if (!is_valid(r)) throw DataError("relation id out of range: " + std::to_string(r));
    if (is_initial(r)) return names_.name(r);
    return names_.name(r - num_initial()) + "^-1";
}

std::optional<RelationId> RelationVocab::parse(std::string_view text) const {
    constexpr std::string_view kInverseSuffix = "^-1";
    bool inverse = false;
    if (text.size() > kInverseSuffix.size() &&
        text.substr(text.size() - kInverseSuffix.size()) == kInverseSuffix) {
        inverse = true;
        text = text.substr(0, text.size() - kInverseSuffix.size());
    }
    const auto id = names_.find(text);
    if (!id) return std::nullopt;
    return inverse ? inverse_of(*id) : *id;
}

namespace {

struct Line {
    std::string_view head, relation, tail;
};

// Exactly two tab separators; empty lines are skipped by the caller.
Line split_line(std::string_view line, const std::filesystem::path& file, std::size_t line_no) {
    const std::size_t first = line.find('\t');
    const std::size_t second = first == std::string_view::npos
                                   ? std::string_view::npos
                                   : line.find('\t', first + 1);
    if (first == std::string_view::npos || second == std::string_view::npos ||
        line.find('\t', second + 1) != std::string_view::npos) {
        throw ParseError(file.string() + ":" + std::to_string(line_no) +
                         ": expected 3 tab-separated fields");
    }
    return Line{line.substr(0, first), line.substr(first + 1, second - first - 1),
                line.substr(second + 1)};
}

template <typename EntityFn, typename RelationFn>
std::vector<Triple> parse_triple_file(const std::filesystem::path& file,
                                      EntityFn&& entity_id, RelationFn&& relation_id) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open triple file: " + file.string());
    std::vector<Triple> triples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const Line fields = split_line(line, file, line_no);
        Triple t;
        t.source = entity_id(fields.head);
        t.relation = relation_id(fields.relation, line_no);
        t.target = entity_id(fields.tail);
        triples.push_back(t);
    }
    return triples;
}

}  // namespace

RawTriples load_triples(const std::filesystem::path& file) {
    RawTriples out;
    out.triples = parse_triple_file(
        file, [&](std::string_view e) { return out.entities.add(e); },
        [&](std::string_view r, std::size_t) { return out.relations.names().add(r); });
    return out;
}

RawTriples load_triples(const std::filesystem::path& file,
                        const RelationVocab& frozen_relations) {
    RawTriples out;
    out.relations = frozen_relations;
    out.triples = parse_triple_file(
        file, [&](std::string_view e) { return out.entities.add(e); },
        [&](std::string_view r, std::size_t line_no) -> RelationId {
            const auto id = frozen_relations.names().find(r);
            if (!id) {
                throw VocabError(file.string() + ":" + std::to_string(line_no) +
                                 ": unknown relation '" + std::string(r) +
                                 "' under frozen vocabulary");
            }
            return *id;
        });
    return out;
}

std::vector<Triple> load_triples_into(const std::filesystem::path& file,
                                      const Vocab& entities,
                                      const RelationVocab& relations) {
    return parse_triple_file(
        file,
        [&](std::string_view e) -> EntityId {
            const auto id = entities.find(e);
            if (!id) throw VocabError(file.string() + ": unknown entity '" + std::string(e) + "'");
            return *id;
        },
        [&](std::string_view r, std::size_t line_no) -> RelationId {
            const auto id = relations.names().find(r);
            if (!id) {
                throw VocabError(file.string() + ":" + std::to_string(line_no) +
                                 ": unknown relation '" + std::string(r) + "'");
            }
            return *id;
        });
}

KnowledgeGraph KnowledgeGraph::build(RawTriples raw) {
    KnowledgeGraph g;
    g.entities_ = std::move(raw.entities);
    g.relations_ = std::move(raw.relations);
    const std::int32_t num_entities = g.entities_.size();
    g.adjacency_.resize(static_cast<std::size_t>(num_entities));

    const auto insert = [&](const Triple& t) {
        auto& rels = g.pair_relations_[pair_key(t.source, t.target)];
        for (const RelationId known : rels)
            if (known == t.relation) return;
        rels.push_back(t.relation);
        g.triples_.push_back(t);
        g.adjacency_[static_cast<std::size_t>(t.source)].push_back(Edge{t.relation, t.target});
    };

    for (const Triple& t : raw.triples) {
        if (t.source < 0 || t.source >= num_entities || t.target < 0 || t.target >= num_entities)
            throw DataError("triple entity id out of range");
        if (!g.relations_.is_initial(t.relation))
            throw DataError("raw triples must use initial relation ids");
        insert(t);
        insert(Triple{t.target, g.relations_.inverse_of(t.relation), t.source});
    }
    return g;
}

KnowledgeGraph KnowledgeGraph::from_triples(std::vector<Triple> raw,
                                            std::vector<std::string> entity_names,
                                            std::vector<std::string> relation_names) {
    RawTriples rt;
    rt.triples = std::move(raw);
    for (const auto& n : entity_names) rt.entities.add(n);
    for (const auto& n : relation_names) rt.relations.names().add(n);
    return build(std::move(rt));
}

std::span<const Edge> KnowledgeGraph::neighbors(EntityId e) const {
    if (e < 0 || e >= num_entities())
        throw DataError("entity id out of range: " + std::to_string(e));
    return adjacency_[static_cast<std::size_t>(e)];
}

bool KnowledgeGraph::contains(EntityId s, RelationId r, EntityId t) const {
    const auto it = pair_relations_.find(pair_key(s, t));
    if (it == pair_relations_.end()) return false;
    for (const RelationId known : it->second)
        if (known == r) return true;
    return false;
}

std::span<const RelationId> KnowledgeGraph::relations_between(EntityId s, EntityId t) const {
    const auto it = pair_relations_.find(pair_key(s, t));
    if (it == pair_relations_.end()) return {};
    return it->second;
}

std::int64_t DegreeProfile::popular_count() const {
    std::int64_t n = 0;
    for (const std::uint8_t p : popular) n += p;
    return n;
}

DegreeProfile degree_profile(const KnowledgeGraph& graph, double popularity_factor) {
    if (graph.num_entities() == 0) throw DataError("degree profile of an empty graph");
    DegreeProfile profile;
    profile.degrees.resize(static_cast<std::size_t>(graph.num_entities()));
    std::int64_t total = 0;
    for (EntityId e = 0; e < graph.num_entities(); ++e) {
        const auto deg = static_cast<std::int32_t>(graph.neighbors(e).size());
        profile.degrees[static_cast<std::size_t>(e)] = deg;
        total += deg;
    }
    profile.mean_degree = static_cast<double>(total) / graph.num_entities();
    profile.popular.resize(profile.degrees.size());
    for (std::size_t i = 0; i < profile.degrees.size(); ++i) {
        profile.popular[i] =
            profile.degrees[i] > popularity_factor * profile.mean_degree ? 1 : 0;
    }
    return profile;
}

}  // namespace siailp
