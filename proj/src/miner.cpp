#include "siailp/miner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "siailp/errors.hpp"
#include "siailp/parallel.hpp"

namespace siailp {

namespace {

bool contains_sequence(const std::vector<Path>& paths, const Path& p) {
    for (const Path& q : paths)
        if (q == p) return true;
    return false;
}

// One run of the recursive path finder. Recursion depth is bounded by
// max_length + 1, which is tiny relative to any real call stack.
class PathFinder {
  public:
    PathFinder(const KnowledgeGraph& graph, EntityId source, const QualifiedSet& qualified,
               const MinerBudget& budget, Rng& rng, const DegreeProfile* avoid_popular,
               std::vector<std::vector<EntityId>>* witnesses)
        : graph_(graph),
          qualified_(qualified),
          budget_(budget),
          rng_(rng),
          avoid_popular_(avoid_popular),
          witnesses_(witnesses),
          source_(source) {
        recursion_counts_.assign(static_cast<std::size_t>(budget.max_length), 0);
        on_path_.assign(static_cast<std::size_t>(graph.num_entities()), 0);
        if (qualified_.mode == QualifiedSet::Mode::NeighborsOfSource) {
            for (const Edge& e : graph.neighbors(source))
                neighbor_targets_.insert(e.target);
        }
        if (qualified_.mode == QualifiedSet::Mode::SingleTarget &&
            (qualified_.target < 0 || qualified_.target >= graph.num_entities()))
            throw DataError("qualified single target out of range");
    }

    MineResult run() {
        on_path_[static_cast<std::size_t>(source_)] = 1;
        on_path_list_.push_back(source_);
        visit(source_);
        result_.recursion_counts = std::move(recursion_counts_);
        return std::move(result_);
    }

  private:
    bool in_qualified(EntityId t) const {
        switch (qualified_.mode) {
            case QualifiedSet::Mode::AllEntities: return true;
            case QualifiedSet::Mode::NeighborsOfSource: return neighbor_targets_.contains(t);
            case QualifiedSet::Mode::SingleTarget: return t == qualified_.target;
        }
        return false;
    }

    // True while some recording quota relevant to the qualified set can
    // still accept a path; gates the expansion of popular neighbors.
    bool quota_unmet() const {
        switch (qualified_.mode) {
            case QualifiedSet::Mode::AllEntities:
                return full_targets_ < static_cast<std::size_t>(graph_.num_entities());
            case QualifiedSet::Mode::NeighborsOfSource:
                return full_targets_ < neighbor_targets_.size();
            case QualifiedSet::Mode::SingleTarget:
                return full_targets_ == 0;
        }
        return true;
    }

    void try_record(EntityId t) {
        if (current_.empty() || !in_qualified(t)) return;
        auto& paths = result_.by_target[t];
        if (static_cast<int>(paths.size()) >= budget_.max_paths_per_target) return;
        if (contains_sequence(paths, current_)) return;
        paths.push_back(current_);
        result_.record_order.emplace_back(t, current_);
        if (witnesses_) witnesses_->push_back(on_path_list_);
        if (static_cast<int>(paths.size()) == budget_.max_paths_per_target) ++full_targets_;
    }

    void visit(EntityId t) {
        try_record(t);

        const int length = static_cast<int>(current_.size());
        if (length >= budget_.max_length) return;
        const std::span<const Edge> edges = graph_.neighbors(t);
        if (edges.empty()) return;

        std::vector<int> order(edges.size());
        std::iota(order.begin(), order.end(), 0);
        rng_.shuffle(order);
        if (avoid_popular_) {
            std::stable_partition(order.begin(), order.end(), [&](int i) {
                return !avoid_popular_->is_popular(edges[static_cast<std::size_t>(i)].target);
            });
        }

        for (const int idx : order) {
            const Edge& edge = edges[static_cast<std::size_t>(idx)];
            if (recursion_counts_[static_cast<std::size_t>(length)] >= budget_.max_recursions)
                continue;
            if (on_path_[static_cast<std::size_t>(edge.target)]) continue;
            if (avoid_popular_ && avoid_popular_->is_popular(edge.target) && !quota_unmet())
                continue;

            current_.push_back(edge.relation);
            on_path_[static_cast<std::size_t>(edge.target)] = 1;
            on_path_list_.push_back(edge.target);
            visit(edge.target);
            on_path_list_.pop_back();
            on_path_[static_cast<std::size_t>(edge.target)] = 0;
            current_.pop_back();
            ++recursion_counts_[static_cast<std::size_t>(length)];
        }
    }

    const KnowledgeGraph& graph_;
    const QualifiedSet& qualified_;
    const MinerBudget& budget_;
    Rng& rng_;
    const DegreeProfile* avoid_popular_;
    std::vector<std::vector<EntityId>>* witnesses_;
    EntityId source_;

    MineResult result_;
    std::vector<std::int64_t> recursion_counts_;
    std::vector<std::uint8_t> on_path_;
    std::vector<EntityId> on_path_list_;
    Path current_;
    std::unordered_set<EntityId> neighbor_targets_;
    std::size_t full_targets_ = 0;
};

}  // namespace

MineResult find_paths(const KnowledgeGraph& graph, EntityId source,
                      const QualifiedSet& qualified, const MinerBudget& budget, Rng& rng,
                      const DegreeProfile* avoid_popular,
                      std::vector<std::vector<EntityId>>* witnesses) {
    if (source < 0 || source >= graph.num_entities())
        throw DataError("source entity id out of range: " + std::to_string(source));
    if (!budget.valid()) throw UsageError("miner budget fields must be positive");
    PathFinder finder(graph, source, qualified, budget, rng, avoid_popular, witnesses);
    return finder.run();
}

namespace {

// Per-source mining used by both corpus builders; results are merged in
// source-id order so worker count never changes the cache.
template <typename PerSource>
PathCache build_corpus(const KnowledgeGraph& graph, PathCache::Mode mode,
                       const MinerBudget& budget, std::uint64_t seed, int workers,
                       std::ostream* progress, PerSource&& per_source) {
    PathCache cache;
    cache.mode = mode;
    cache.budget = budget;
    cache.seed = seed;
    const auto n = static_cast<std::size_t>(graph.num_entities());
    std::vector<std::vector<std::pair<std::pair<EntityId, EntityId>, std::vector<Path>>>>
        per_source_entries(n);
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    parallel_for(n, workers, [&](std::size_t i) {
        per_source_entries[i] = per_source(static_cast<EntityId>(i));
        const std::size_t d = done.fetch_add(1) + 1;
        if (progress && (d % 512 == 0 || d == n)) {
            const std::lock_guard<std::mutex> lock(progress_mutex);
            (*progress) << "mined " << d << "/" << n << " entities\n" << std::flush;
        }
    });
    for (auto& entries : per_source_entries)
        for (auto& [key, paths] : entries) cache.entries.emplace(key, std::move(paths));
    return cache;
}

}  // namespace

PathCache mine_connection_corpus(const KnowledgeGraph& graph, const MinerBudget& budget,
                                 int repeats, std::uint64_t seed,
                                 const DegreeProfile* avoid_popular, int workers,
                                 std::ostream* progress) {
    if (repeats < 1) throw UsageError("repeats must be >= 1");
    return build_corpus(
        graph, PathCache::Mode::Connection, budget, seed, workers, progress, [&](EntityId s) {
            std::map<EntityId, std::vector<Path>> merged;
            for (int rep = 0; rep < repeats; ++rep) {
                Rng rng(derive_stream(seed, "mine", static_cast<std::uint64_t>(s),
                                      static_cast<std::uint64_t>(rep)));
                MineResult result = find_paths(graph, s, QualifiedSet::neighbors_of_source(),
                                               budget, rng, avoid_popular);
                for (auto& [target, path] : result.record_order) {
                    auto& list = merged[target];
                    if (!contains_sequence(list, path)) list.push_back(std::move(path));
                }
            }
            std::vector<std::pair<std::pair<EntityId, EntityId>, std::vector<Path>>> entries;
            entries.reserve(merged.size());
            for (auto& [target, paths] : merged)
                entries.push_back({{s, target}, std::move(paths)});
            return entries;
        });
}

PathCache mine_subgraph_corpus(const KnowledgeGraph& graph, const MinerBudget& budget,
                               int repeats, std::uint64_t seed,
                               const DegreeProfile* avoid_popular, int workers,
                               std::ostream* progress) {
    if (repeats < 1) throw UsageError("repeats must be >= 1");
    return build_corpus(
        graph, PathCache::Mode::Subgraph, budget, seed, workers, progress, [&](EntityId s) {
            std::vector<Path> flat;
            for (int rep = 0; rep < repeats; ++rep) {
                Rng rng(derive_stream(seed, "mine", static_cast<std::uint64_t>(s),
                                      static_cast<std::uint64_t>(rep)));
                MineResult result = find_paths(graph, s, QualifiedSet::all_entities(), budget,
                                               rng, avoid_popular);
                for (auto& [target, path] : result.record_order)
                    if (!contains_sequence(flat, path)) flat.push_back(std::move(path));
            }
            std::vector<std::pair<std::pair<EntityId, EntityId>, std::vector<Path>>> entries;
            if (!flat.empty()) entries.push_back({{s, EntityId{-1}}, std::move(flat)});
            return entries;
        });
}

std::vector<Path> mine_subgraph_paths(const KnowledgeGraph& graph, EntityId entity,
                                      const MinerBudget& budget, Rng& rng,
                                      const DegreeProfile* avoid_popular) {
    MineResult result =
        find_paths(graph, entity, QualifiedSet::all_entities(), budget, rng, avoid_popular);
    std::vector<Path> flat;
    flat.reserve(result.record_order.size());
    for (auto& [target, path] : result.record_order)
        if (!contains_sequence(flat, path)) flat.push_back(std::move(path));
    return flat;
}

std::vector<Path> find_connecting_paths(const KnowledgeGraph& graph, EntityId s, EntityId t,
                                        const MinerBudget& budget, Rng& rng,
                                        const DegreeProfile* avoid_popular) {
    MineResult result =
        find_paths(graph, s, QualifiedSet::single_target(t), budget, rng, avoid_popular);
    const auto it = result.by_target.find(t);
    return it == result.by_target.end() ? std::vector<Path>{} : std::move(it->second);
}

void write_path_cache(const PathCache& cache, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot open path cache for writing: " + file.string());
    out << "SIAILP-PATHS v1 mode="
        << (cache.mode == PathCache::Mode::Connection ? "connection" : "subgraph")
        << " L=" << cache.budget.max_length << " C=" << cache.budget.max_recursions
        << " N=" << cache.budget.max_paths_per_target << " seed=" << cache.seed << "\n";
    for (const auto& [key, paths] : cache.entries) {
        for (const Path& p : paths) {
            out << key.first << '\t' << key.second << '\t';
            for (std::size_t i = 0; i < p.size(); ++i) {
                if (i) out << ',';
                out << p[i];
            }
            out << '\n';
        }
    }
    if (!out) throw DataError("failed writing path cache: " + file.string());
}

PathCache read_path_cache(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open path cache: " + file.string());
    std::string header;
    if (!std::getline(in, header)) throw ParseError(file.string() + ": empty path cache");
    PathCache cache;
    {
        char mode[32] = {0};
        long long length = 0, recursions = 0, per_target = 0;
        unsigned long long seed = 0;
        if (std::sscanf(header.c_str(), "SIAILP-PATHS v1 mode=%31s L=%lld C=%lld N=%lld seed=%llu",
                        mode, &length, &recursions, &per_target, &seed) != 5)
            throw ParseError(file.string() + ": bad path cache header: " + header);
        const std::string mode_str = mode;
        if (mode_str == "connection")
            cache.mode = PathCache::Mode::Connection;
        else if (mode_str == "subgraph")
            cache.mode = PathCache::Mode::Subgraph;
        else
            throw ParseError(file.string() + ": unknown cache mode: " + mode_str);
        cache.budget.max_length = static_cast<int>(length);
        cache.budget.max_recursions = recursions;
        cache.budget.max_paths_per_target = static_cast<int>(per_target);
        cache.seed = seed;
    }
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        EntityId src = -1, dst = -1;
        std::string rels;
        if (!(fields >> src >> dst >> rels))
            throw ParseError(file.string() + ":" + std::to_string(line_no) + ": bad cache record");
        Path p;
        std::size_t pos = 0;
        while (pos <= rels.size()) {
            const std::size_t comma = rels.find(',', pos);
            const std::string token =
                rels.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (token.empty())
                throw ParseError(file.string() + ":" + std::to_string(line_no) +
                                 ": empty relation id");
            p.push_back(static_cast<RelationId>(std::stol(token)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        cache.entries[{src, dst}].push_back(std::move(p));
    }
    return cache;
}

}  // namespace siailp
