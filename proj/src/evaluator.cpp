#include "siailp/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "siailp/errors.hpp"
#include "siailp/parallel.hpp"

namespace siailp {

std::string_view eval_setting_name(EvalSetting setting) {
    switch (setting) {
        case EvalSetting::AucPr: return "auc-pr";
        case EvalSetting::Hits10Entity: return "hits@10-entity";
        case EvalSetting::Hits1Relation: return "hits@1-relation";
        case EvalSetting::Hits3Relation: return "hits@3-relation";
    }
    return "unknown";
}

std::string to_record(const MetricsReport& report) {
    char value[40];
    std::snprintf(value, sizeof value, "%.17g", report.value);
    std::ostringstream out;
    out << "metric=" << report.metric << " value=" << value << " n=" << report.positives
        << " skipped=" << report.skipped << " seed=" << report.seed;
    return out.str();
}

double average_precision(std::span<const double> positive_scores,
                         std::span<const double> negative_scores) {
    if (positive_scores.empty() || negative_scores.empty())
        throw DataError("average precision needs both positive and negative scores");
    struct Item {
        double score;
        bool positive;
    };
    std::vector<Item> items;
    items.reserve(positive_scores.size() + negative_scores.size());
    for (const double s : positive_scores) items.push_back({s, true});
    for (const double s : negative_scores) items.push_back({s, false});
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.score != b.score) return a.score > b.score;
        return !a.positive && b.positive;  // negatives first on ties
    });
    double sum = 0.0;
    std::size_t positives_seen = 0;
    for (std::size_t rank = 1; rank <= items.size(); ++rank) {
        if (items[rank - 1].positive) {
            ++positives_seen;
            sum += static_cast<double>(positives_seen) / static_cast<double>(rank);
        }
    }
    return sum / static_cast<double>(positive_scores.size());
}

int pessimistic_rank(double positive_score, std::span<const double> negative_scores) {
    int rank = 1;
    for (const double s : negative_scores)
        if (s >= positive_score) ++rank;
    return rank;
}

double hits_fraction(std::span<const int> ranks, int k) {
    if (ranks.empty()) throw DataError("hits fraction over zero rankings");
    std::int64_t hits = 0;
    for (const int r : ranks)
        if (r <= k) ++hits;
    return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

namespace {

std::uint64_t triple_key(const Triple& t) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.source)) << 40) |
           (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.relation)) << 20) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.target));
}

}  // namespace

std::vector<Triple> make_entity_negatives(const KnowledgeGraph& graph, const Triple& positive,
                                          int k, Rng& rng) {
    if (k < 1) throw UsageError("negatives per positive must be >= 1");
    const auto num_entities = static_cast<std::uint64_t>(graph.num_entities());

    // exact capacity so "too small" is an error, not a hang
    std::int64_t capacity = 0;
    for (EntityId e = 0; e < graph.num_entities(); ++e) {
        const Triple head{e, positive.relation, positive.target};
        if (!(head == positive) && !graph.contains(e, positive.relation, positive.target))
            ++capacity;
        const Triple tail{positive.source, positive.relation, e};
        if (!(tail == positive) && !graph.contains(positive.source, positive.relation, e))
            ++capacity;
    }
    if (capacity < k)
        throw DataError("graph too small to produce " + std::to_string(k) +
                        " distinct entity-corrupted negatives");

    std::vector<Triple> negatives;
    negatives.reserve(static_cast<std::size_t>(k));
    std::unordered_set<std::uint64_t> drawn;
    while (static_cast<int>(negatives.size()) < k) {
        Triple candidate = positive;
        const auto replacement = static_cast<EntityId>(rng.next_below(num_entities));
        if (rng.next_bool())
            candidate.source = replacement;
        else
            candidate.target = replacement;
        if (candidate == positive) continue;
        if (graph.contains(candidate.source, candidate.relation, candidate.target)) continue;
        if (!drawn.insert(triple_key(candidate)).second) continue;
        negatives.push_back(candidate);
    }
    return negatives;
}

namespace {

// Per-entity out-reaching paths and per-pair connecting paths, mined once
// with streams keyed by entity/pair ids, then read-only during scoring.
class MaterialBank {
  public:
    MaterialBank(const KnowledgeGraph& graph, const EvalConfig& config,
                 const DegreeProfile* avoid)
        : graph_(graph), config_(config), avoid_(avoid) {}

    void mine_out_paths(const std::vector<EntityId>& entities) {
        out_paths_.resize(static_cast<std::size_t>(graph_.num_entities()));
        parallel_for(entities.size(), config_.workers, [&](std::size_t i) {
            const EntityId e = entities[i];
            Rng rng(derive_stream(config_.seed, "eval.sub", static_cast<std::uint64_t>(e)));
            out_paths_[static_cast<std::size_t>(e)] =
                mine_subgraph_paths(graph_, e, config_.subgraph_budget, rng, avoid_);
        });
    }

    void mine_connecting(const std::vector<std::pair<EntityId, EntityId>>& pairs) {
        std::vector<std::vector<Path>> mined(pairs.size());
        parallel_for(pairs.size(), config_.workers, [&](std::size_t i) {
            const auto [s, t] = pairs[i];
            Rng rng(derive_stream(config_.seed, "eval.conn", static_cast<std::uint64_t>(s),
                                  static_cast<std::uint64_t>(t)));
            mined[i] = find_connecting_paths(graph_, s, t, config_.connection_budget, rng, avoid_);
        });
        for (std::size_t i = 0; i < pairs.size(); ++i)
            connecting_.emplace(pair_key(pairs[i].first, pairs[i].second), std::move(mined[i]));
    }

    const std::vector<Path>& out_paths(EntityId e) const {
        return out_paths_[static_cast<std::size_t>(e)];
    }

    const std::vector<Path>& connecting(EntityId s, EntityId t) const {
        static const std::vector<Path> kEmpty;
        const auto it = connecting_.find(pair_key(s, t));
        return it == connecting_.end() ? kEmpty : it->second;
    }

  private:
    static std::uint64_t pair_key(EntityId s, EntityId t) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s)) << 32) |
               static_cast<std::uint32_t>(t);
    }

    const KnowledgeGraph& graph_;
    const EvalConfig& config_;
    const DegreeProfile* avoid_;
    std::vector<std::vector<Path>> out_paths_;
    std::unordered_map<std::uint64_t, std::vector<Path>> connecting_;
};

struct CandidateScorer {
    const Model* connection;
    const Model* subgraph;
    const MaterialBank& bank;
    const EvalConfig& config;

    // Score one candidate triple. Slot draws are keyed by the endpoint pair
    // alone: relation-corrupted candidates then share one set of paths and
    // differ only in the relation being asked about, and neither reruns nor
    // worker counts can shift any draw.
    double operator()(const Triple& t) const {
        Rng rng(derive_stream(config.seed, "eval.slots", static_cast<std::uint64_t>(t.source),
                              static_cast<std::uint64_t>(t.target)));
        const auto src_slots =
            draw_path_slots(bank.out_paths(t.source), subgraph->config.num_paths, rng);
        const auto tgt_slots =
            draw_path_slots(bank.out_paths(t.target), subgraph->config.num_paths, rng);
        const double sub = score_subgraph(*subgraph, src_slots, tgt_slots, t.relation);
        if (config.mode == ScoreMode::Solo) return sub;
        const std::vector<Path>& conn_paths = bank.connecting(t.source, t.target);
        std::optional<double> conn;
        if (!conn_paths.empty()) {
            const auto conn_slots =
                draw_path_slots(conn_paths, connection->config.num_paths, rng);
            conn = score_connection(*connection, conn_slots, t.relation);
        }
        return hybrid_score(conn, sub);
    }
};

std::string config_echo(const EvalConfig& config) {
    std::ostringstream out;
    out << "setting=" << eval_setting_name(config.setting)
        << " mode=" << (config.mode == ScoreMode::Solo ? "solo" : "hybrid")
        << " negatives=" << config.negatives_per_positive << " seed=" << config.seed
        << " conn_budget=" << config.connection_budget.max_length << '/'
        << config.connection_budget.max_recursions << '/'
        << config.connection_budget.max_paths_per_target
        << " sub_budget=" << config.subgraph_budget.max_length << '/'
        << config.subgraph_budget.max_recursions << '/'
        << config.subgraph_budget.max_paths_per_target
        << " avoid_popular=" << (config.avoid_popular ? 1 : 0);
    return out.str();
}

}  // namespace

MetricsReport evaluate(const KnowledgeGraph& graph, std::span<const Triple> test_triples,
                       const Model* connection_model, const Model* subgraph_model,
                       const EvalConfig& config) {
    if (subgraph_model == nullptr)
        throw UsageError("evaluation requires a subgraph model checkpoint");
    if (config.mode == ScoreMode::Hybrid && connection_model == nullptr)
        throw UsageError("hybrid evaluation requires a connection model checkpoint");
    if (test_triples.empty()) throw DataError("no test triples to evaluate");

    // The inductive contract: relations (and their count) carry over from
    // training; a mismatching checkpoint must be rejected, not reconciled.
    const auto check_vocab = [&](const Model* m) {
        if (m && m->config.num_initial_relations != graph.num_initial_relations())
            throw VocabError("checkpoint relation vocabulary (" +
                             std::to_string(m->config.num_initial_relations) +
                             ") does not match the graph (" +
                             std::to_string(graph.num_initial_relations()) + ")");
    };
    check_vocab(subgraph_model);
    check_vocab(connection_model);
    for (const Triple& t : test_triples)
        if (!graph.relations().is_initial(t.relation))
            throw DataError("test triples must use initial relations");

    std::optional<DegreeProfile> profile;
    if (config.avoid_popular) profile = degree_profile(graph, config.popularity_factor);

    const bool entity_setting =
        config.setting == EvalSetting::AucPr || config.setting == EvalSetting::Hits10Entity;
    const int negatives_per_positive =
        config.setting == EvalSetting::AucPr ? 1 : config.negatives_per_positive;

    // candidate sets
    std::vector<std::vector<Triple>> negatives(test_triples.size());
    if (entity_setting) {
        for (std::size_t i = 0; i < test_triples.size(); ++i) {
            Rng rng(derive_stream(config.seed, "eval.neg", static_cast<std::uint64_t>(i)));
            negatives[i] =
                make_entity_negatives(graph, test_triples[i], negatives_per_positive, rng);
        }
    }

    // mining plan
    std::vector<EntityId> entities;
    std::vector<std::pair<EntityId, EntityId>> pairs;
    {
        std::unordered_set<EntityId> entity_set;
        std::unordered_set<std::uint64_t> pair_set;
        const auto note = [&](const Triple& t) {
            entity_set.insert(t.source);
            entity_set.insert(t.target);
            if (config.mode == ScoreMode::Hybrid) {
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t.source)) << 32) |
                    static_cast<std::uint32_t>(t.target);
                if (pair_set.insert(key).second) pairs.emplace_back(t.source, t.target);
            }
        };
        for (std::size_t i = 0; i < test_triples.size(); ++i) {
            note(test_triples[i]);
            for (const Triple& n : negatives[i]) note(n);
        }
        entities.assign(entity_set.begin(), entity_set.end());
        std::sort(entities.begin(), entities.end());
        std::sort(pairs.begin(), pairs.end());
    }

    MaterialBank bank(graph, config, profile ? &*profile : nullptr);
    bank.mine_out_paths(entities);
    if (config.mode == ScoreMode::Hybrid) bank.mine_connecting(pairs);

    const CandidateScorer score{connection_model, subgraph_model, bank, config};

    std::vector<std::uint8_t> positive_skipped(test_triples.size(), 0);
    for (std::size_t i = 0; i < test_triples.size(); ++i) {
        const Triple& t = test_triples[i];
        if (bank.out_paths(t.source).empty() || bank.out_paths(t.target).empty())
            positive_skipped[i] = 1;
    }

    MetricsReport report;
    report.metric = std::string(eval_setting_name(config.setting));
    report.seed = config.seed;
    report.positives = static_cast<std::int64_t>(test_triples.size());
    report.config_echo = config_echo(config);

    if (config.setting == EvalSetting::AucPr) {
        std::vector<double> pos(test_triples.size()), neg(test_triples.size());
        parallel_for(test_triples.size(), config.workers, [&](std::size_t i) {
            pos[i] = score(test_triples[i]);
            neg[i] = score(negatives[i].front());
        });
        report.value = average_precision(pos, neg);
    } else if (config.setting == EvalSetting::Hits10Entity) {
        std::vector<int> ranks(test_triples.size());
        parallel_for(test_triples.size(), config.workers, [&](std::size_t i) {
            const double positive_score = score(test_triples[i]);
            std::vector<double> negative_scores;
            negative_scores.reserve(negatives[i].size());
            for (const Triple& n : negatives[i]) negative_scores.push_back(score(n));
            ranks[i] = pessimistic_rank(positive_score, negative_scores);
        });
        report.value = hits_fraction(ranks, 10);
    } else {
        const int k = config.setting == EvalSetting::Hits1Relation ? 1 : 3;
        const std::int32_t num_initial = graph.num_initial_relations();
        std::vector<int> ranks(test_triples.size());
        parallel_for(test_triples.size(), config.workers, [&](std::size_t i) {
            const Triple& t = test_triples[i];
            double positive_score = 0.0;
            std::vector<double> corrupted;
            corrupted.reserve(static_cast<std::size_t>(num_initial) - 1);
            for (RelationId r = 0; r < num_initial; ++r) {
                const double s = score(Triple{t.source, r, t.target});
                if (r == t.relation)
                    positive_score = s;
                else
                    corrupted.push_back(s);
            }
            ranks[i] = pessimistic_rank(positive_score, corrupted);
        });
        report.value = hits_fraction(ranks, k);
    }

    for (const std::uint8_t s : positive_skipped) report.skipped += s;
    return report;
}

}  // namespace siailp
