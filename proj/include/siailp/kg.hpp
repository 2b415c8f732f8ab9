#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace siailp {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

struct Triple {
    EntityId source = -1;
    RelationId relation = -1;
    EntityId target = -1;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// String <-> id mapping; ids are assigned in first-appearance order.
class Vocab {
  public:
    std::int32_t add(std::string_view name);
    std::optional<std::int32_t> find(std::string_view name) const;
    const std::string& name(std::int32_t id) const;
    std::int32_t size() const { return static_cast<std::int32_t>(names_.size()); }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::int32_t> ids_;
};

// Initial relation names; id k < |R| is an initial relation, k + |R| its
// inverse. inverse_of is an involution on [0, 2|R|).
class RelationVocab {
  public:
    RelationVocab() = default;
    explicit RelationVocab(Vocab names) : names_(std::move(names)) {}

    std::int32_t num_initial() const { return names_.size(); }
    std::int32_t expanded_size() const { return 2 * names_.size(); }

    RelationId inverse_of(RelationId r) const {
        return (r + num_initial()) % expanded_size();
    }
    bool is_initial(RelationId r) const { return r >= 0 && r < num_initial(); }
    bool is_valid(RelationId r) const { return r >= 0 && r < expanded_size(); }

    // Name of an expanded id; inverse ids carry the "^-1" suffix.
    std::string display_name(RelationId r) const;
    // Accepts either "<name>" or "<name>^-1" and returns the expanded id.
    std::optional<RelationId> parse(std::string_view text) const;

    Vocab& names() { return names_; }
    const Vocab& names() const { return names_; }

  private:
    Vocab names_;
};

struct RawTriples {
    std::vector<Triple> triples;  // initial relation ids only; duplicates kept
    Vocab entities;
    RelationVocab relations;
};

// Reads `<head>\t<relation>\t<tail>` lines. Entity vocabulary is always built
// fresh; the relation vocabulary is built fresh unless `frozen_relations` is
// supplied, in which case unseen relation strings are a vocabulary error.
RawTriples load_triples(const std::filesystem::path& file);
RawTriples load_triples(const std::filesystem::path& file,
                        const RelationVocab& frozen_relations);

// Same line format, but entities must already exist (used for test splits
// evaluated against an already-built inference graph).
std::vector<Triple> load_triples_into(const std::filesystem::path& file,
                                      const Vocab& entities,
                                      const RelationVocab& relations);

struct Edge {
    RelationId relation = -1;
    EntityId target = -1;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Inverse-added knowledge graph: every stored triple has its inverse stored
// too, duplicates removed, adjacency indexed by source entity. Immutable
// after construction and safe for concurrent reads.
class KnowledgeGraph {
  public:
    static KnowledgeGraph build(RawTriples raw);
    // Convenience for in-memory fixtures.
    static KnowledgeGraph from_triples(std::vector<Triple> raw,
                                       std::vector<std::string> entity_names,
                                       std::vector<std::string> relation_names);

    std::int32_t num_entities() const { return entities_.size(); }
    std::int32_t num_initial_relations() const { return relations_.num_initial(); }

    const Vocab& entities() const { return entities_; }
    const RelationVocab& relations() const { return relations_; }

    // Inverse-added triple set, insertion order, no duplicates.
    const std::vector<Triple>& triples() const { return triples_; }

    std::span<const Edge> neighbors(EntityId e) const;

    bool contains(EntityId s, RelationId r, EntityId t) const;
    // Relation ids (expanded) of all stored triples from s to t.
    std::span<const RelationId> relations_between(EntityId s, EntityId t) const;

  private:
    Vocab entities_;
    RelationVocab relations_;
    std::vector<Triple> triples_;
    std::vector<std::vector<Edge>> adjacency_;
    std::unordered_map<std::uint64_t, std::vector<RelationId>> pair_relations_;

    static std::uint64_t pair_key(EntityId s, EntityId t) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
               static_cast<std::uint32_t>(t);
    }
};

struct DegreeProfile {
    std::vector<std::int32_t> degrees;  // out-degree in the inverse-added graph
    double mean_degree = 0.0;
    std::vector<std::uint8_t> popular;

    bool is_popular(EntityId e) const { return popular[static_cast<std::size_t>(e)] != 0; }
    std::int64_t popular_count() const;
};

DegreeProfile degree_profile(const KnowledgeGraph& graph,
                             double popularity_factor = 5.0);

}  // namespace siailp
