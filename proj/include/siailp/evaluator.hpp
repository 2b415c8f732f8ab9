#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "siailp/kg.hpp"
#include "siailp/miner.hpp"
#include "siailp/models.hpp"

namespace siailp {

enum class EvalSetting { AucPr, Hits10Entity, Hits1Relation, Hits3Relation };
enum class ScoreMode { Solo, Hybrid };

std::string_view eval_setting_name(EvalSetting setting);

struct EvalConfig {
    EvalSetting setting = EvalSetting::AucPr;
    ScoreMode mode = ScoreMode::Solo;
    int negatives_per_positive = 50;  // entity-corrupted ranking
    std::uint64_t seed = 0;
    MinerBudget connection_budget{10, 20000, 50};
    MinerBudget subgraph_budget{3, 20000, 50};
    bool avoid_popular = false;
    double popularity_factor = 5.0;
    int workers = 1;
};

struct MetricsReport {
    std::string metric;
    double value = 0.0;
    std::int64_t positives = 0;
    std::int64_t skipped = 0;  // positives scored through zero-path endpoints
    std::uint64_t seed = 0;
    std::string config_echo;
};

// `metric=<name> value=<real> n=<int> skipped=<int> seed=<int>`
std::string to_record(const MetricsReport& report);

// Average precision with ties resolved against the positives: equal-scored
// negatives sort first, so a constant scorer cannot look good.
double average_precision(std::span<const double> positive_scores,
                         std::span<const double> negative_scores);

// 1-based rank of the positive among its negatives, ties counted against it.
int pessimistic_rank(double positive_score, std::span<const double> negative_scores);

double hits_fraction(std::span<const int> ranks, int k);

// k distinct corrupted triples: per draw a fair coin picks head or tail, a
// uniform entity replaces it, and candidates colliding with the positive or
// with any stored graph triple are redrawn. Errors when the graph cannot
// supply k distinct negatives.
std::vector<Triple> make_entity_negatives(const KnowledgeGraph& graph, const Triple& positive,
                                          int k, Rng& rng);

// Runs the configured setting over the inference graph: mines evaluation
// paths (connection paths per scored pair, out-reaching paths per endpoint),
// scores candidates with the solo (subgraph) or hybrid scorer and aggregates
// the metric. Models must match the graph's relation vocabulary.
MetricsReport evaluate(const KnowledgeGraph& graph, std::span<const Triple> test_triples,
                       const Model* connection_model, const Model* subgraph_model,
                       const EvalConfig& config);

}  // namespace siailp
