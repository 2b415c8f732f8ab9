#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "siailp/kg.hpp"
#include "siailp/path.hpp"
#include "siailp/rng.hpp"

namespace siailp {

// L / C / N of the recursive path finder: maximum path length, maximum child
// expansions per (source, length) pair per run, maximum distinct recorded
// paths per (source, target) pair per run.
struct MinerBudget {
    int max_length = 10;
    std::int64_t max_recursions = 20000;
    int max_paths_per_target = 50;

    bool valid() const {
        return max_length >= 1 && max_recursions >= 1 && max_paths_per_target >= 1;
    }
};

// The set of recursion endpoints at which a discovered path is recorded.
struct QualifiedSet {
    enum class Mode { AllEntities, NeighborsOfSource, SingleTarget };

    Mode mode = Mode::AllEntities;
    EntityId target = -1;

    static QualifiedSet all_entities() { return {Mode::AllEntities, -1}; }
    static QualifiedSet neighbors_of_source() { return {Mode::NeighborsOfSource, -1}; }
    static QualifiedSet single_target(EntityId t) { return {Mode::SingleTarget, t}; }
};

struct MineResult {
    // Recorded paths per target, each list in record order and free of
    // duplicate relation sequences.
    std::unordered_map<EntityId, std::vector<Path>> by_target;
    // Global record order; drives deterministic flattening.
    std::vector<std::pair<EntityId, Path>> record_order;
    // Child expansions performed per current-path length (index = length).
    std::vector<std::int64_t> recursion_counts;
};

// Depth-first capped enumeration of acyclic paths from `source`. Neighbor
// order is shuffled per recursion call from `rng`. When `avoid_popular` is
// given, non-popular neighbors are visited first and a popular neighbor is
// expanded only while some recording quota relevant to the qualified set is
// still unmet. `witnesses`, when non-null, receives the on-path entity list
// of every recorded path.
MineResult find_paths(const KnowledgeGraph& graph, EntityId source,
                      const QualifiedSet& qualified, const MinerBudget& budget,
                      Rng& rng, const DegreeProfile* avoid_popular = nullptr,
                      std::vector<std::vector<EntityId>>* witnesses = nullptr);

// Mined path corpus. Connection caches are keyed by (source, target);
// subgraph caches hold one flat list per source under target id -1.
struct PathCache {
    enum class Mode { Connection, Subgraph };

    Mode mode = Mode::Connection;
    MinerBudget budget;
    std::uint64_t seed = 0;
    std::map<std::pair<EntityId, EntityId>, std::vector<Path>> entries;

    const std::vector<Path>* find(EntityId source, EntityId target) const {
        const auto it = entries.find({source, target});
        return it == entries.end() ? nullptr : &it->second;
    }
    const std::vector<Path>* find_flat(EntityId source) const { return find(source, -1); }
};

// One find_paths run per (source, repeat) with Q = direct neighbors of the
// source, unioned per (source, target) with dedup by relation sequence. The
// per-pair union may exceed N across repeats; each run respects N.
// `progress`, when given, receives occasional per-entity progress lines.
PathCache mine_connection_corpus(const KnowledgeGraph& graph, const MinerBudget& budget,
                                 int repeats, std::uint64_t seed,
                                 const DegreeProfile* avoid_popular = nullptr,
                                 int workers = 1, std::ostream* progress = nullptr);

// Out-reaching paths (Q = all entities) flattened to a deduplicated list of
// relation sequences per source entity.
PathCache mine_subgraph_corpus(const KnowledgeGraph& graph, const MinerBudget& budget,
                               int repeats, std::uint64_t seed,
                               const DegreeProfile* avoid_popular = nullptr,
                               int workers = 1, std::ostream* progress = nullptr);

// Single-entity out-reaching mine; isolated entities yield an empty list.
std::vector<Path> mine_subgraph_paths(const KnowledgeGraph& graph, EntityId entity,
                                      const MinerBudget& budget, Rng& rng,
                                      const DegreeProfile* avoid_popular = nullptr);

// Paths from s to t (Q = single target), used to feed the connection model
// at evaluation time. An empty result is valid.
std::vector<Path> find_connecting_paths(const KnowledgeGraph& graph, EntityId s,
                                        EntityId t, const MinerBudget& budget, Rng& rng,
                                        const DegreeProfile* avoid_popular = nullptr);

void write_path_cache(const PathCache& cache, const std::filesystem::path& file);
PathCache read_path_cache(const std::filesystem::path& file);

}  // namespace siailp
