// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criterion 6 (smoke reproduction on the GraIL splits) runs
// only when --data-dir points at the datasets; it is reported as SKIP
// otherwise so the property criteria stay meaningful without the data.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "siailp/errors.hpp"
#include "siailp/evaluator.hpp"
#include "siailp/kg.hpp"
#include "siailp/miner.hpp"
#include "siailp/models.hpp"
#include "siailp/trainer.hpp"
#include "test_util.hpp"

using namespace siailp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

void report_skip(int criterion, const char* name, const std::string& reason) {
    std::cout << "[SKIP] criterion " << criterion << ": " << name << " (" << reason << ")"
              << std::endl;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --- criterion 1: miner vs exhaustive DFS -----------------------------------

using TargetSequences = std::map<EntityId, std::set<Path>>;

void oracle_recurse(const KnowledgeGraph& g, EntityId at, int max_length,
                    std::vector<EntityId>& on_path, Path& sequence, TargetSequences& out) {
    if (static_cast<int>(sequence.size()) >= max_length) return;
    for (const Edge& e : g.neighbors(at)) {
        if (std::find(on_path.begin(), on_path.end(), e.target) != on_path.end()) continue;
        sequence.push_back(e.relation);
        on_path.push_back(e.target);
        out[e.target].insert(sequence);
        oracle_recurse(g, e.target, max_length, on_path, sequence, out);
        on_path.pop_back();
        sequence.pop_back();
    }
}

void criterion_miner_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(0xACCE97);
    int graphs_ok = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const testutil::RandomGraph rg = testutil::random_graph(rng, 8, 3);
        const int max_length = 1 + static_cast<int>(rng.next_below(4));
        const auto source = static_cast<EntityId>(rng.next_below(rg.graph.num_entities()));

        MinerBudget uncapped;
        uncapped.max_length = max_length;
        uncapped.max_recursions = 1'000'000'000;  // larger than any reachable count
        uncapped.max_paths_per_target = 1'000'000;
        Rng mine_rng(rng.next_u64());
        const MineResult mined =
            find_paths(rg.graph, source, QualifiedSet::all_entities(), uncapped, mine_rng);
        TargetSequences mined_sets;
        for (const auto& [target, paths] : mined.by_target)
            mined_sets[target] = std::set<Path>(paths.begin(), paths.end());

        TargetSequences oracle;
        std::vector<EntityId> on_path{source};
        Path sequence;
        oracle_recurse(rg.graph, source, max_length, on_path, sequence, oracle);

        if (mined_sets == oracle) ++graphs_ok;
    }
    const double elapsed = seconds_since(start);
    char detail[96];
    std::snprintf(detail, sizeof detail, "%d/50 graphs exact, %.2fs", graphs_ok, elapsed);
    report(1, "path-miner oracle equivalence", graphs_ok == 50 && elapsed < 10.0, detail);
}

// --- criterion 2: gradient correctness at full model size -------------------

double model_fd_check(ModelKind kind, std::uint64_t seed) {
    ModelConfig config{kind, 300, 150, 6, 3};
    Rng init_rng(seed);
    Model model = Model::init(config, init_rng);

    Rng path_rng(seed + 1);
    const auto random_path = [&] {
        Path p;
        const auto len = 1 + path_rng.next_below(3);
        for (std::uint64_t i = 0; i < len; ++i)
            p.push_back(static_cast<RelationId>(path_rng.next_below(12)));
        return p;
    };
    TrainSample sample;
    sample.relation = 2;
    sample.label = 1.0;
    if (kind == ModelKind::Connection) {
        sample.paths = {random_path(), random_path(), random_path()};
    } else {
        sample.source_out = {random_path(), random_path(), random_path()};
        sample.target_out = {random_path(), random_path(), random_path()};
    }

    GradStore analytic;
    {
        Tape tape;
        tape.backward(sample_loss(tape, model, sample), analytic);
    }
    Rng fd_rng(seed + 2);
    const auto result = finite_diff_check(
        [&] {
            Tape tape;
            return tape.scalar(sample_loss(tape, model, sample));
        },
        model.store, analytic, 100, fd_rng);
    return result.max_rel_err;
}

void criterion_gradients() {
    const auto start = std::chrono::steady_clock::now();
    const double conn_err = model_fd_check(ModelKind::Connection, 7001);
    const double sub_err = model_fd_check(ModelKind::Subgraph, 7002);
    const double elapsed = seconds_since(start);
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "connection max rel-err %.3g, subgraph %.3g, %.1fs", conn_err, sub_err,
                  elapsed);
    report(2, "gradient correctness vs finite differences",
           conn_err < 1e-3 && sub_err < 1e-3 && elapsed < 60.0, detail);
}

// --- criterion 3: metric oracles ---------------------------------------------

double ap_oracle(const std::vector<double>& pos, const std::vector<double>& neg) {
    std::vector<std::size_t> order(pos.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pos[a] != pos[b]) return pos[a] > pos[b];
        return a < b;
    });
    double sum = 0.0;
    for (const std::size_t p : order) {
        std::size_t neg_at_or_above = 0, pos_above = 0, tied_before = 0;
        for (const double s : neg)
            if (s >= pos[p]) ++neg_at_or_above;
        for (const double s : pos)
            if (s > pos[p]) ++pos_above;
        for (std::size_t q = 0; q < pos.size(); ++q)
            if (pos[q] == pos[p] && q < p) ++tied_before;
        const std::size_t rank = pos_above + neg_at_or_above + tied_before + 1;
        sum += static_cast<double>(pos_above + tied_before + 1) / static_cast<double>(rank);
    }
    return sum / static_cast<double>(pos.size());
}

int rank_oracle(double positive, const std::vector<double>& negatives) {
    std::vector<std::pair<double, int>> items{{positive, 1}};
    for (const double n : negatives) items.push_back({n, 0});
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i].second == 1) return static_cast<int>(i) + 1;
    return -1;
}

void criterion_metric_oracles() {
    Rng rng(0x3E7A1);
    const auto quantized = [&] { return static_cast<double>(rng.next_below(11)) / 10.0; };

    double max_ap_diff = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> pos, neg;
        const auto n_pos = 1 + rng.next_below(25);
        const auto n_neg = 1 + rng.next_below(50);
        for (std::uint64_t i = 0; i < n_pos; ++i) pos.push_back(quantized());
        for (std::uint64_t i = 0; i < n_neg; ++i) neg.push_back(quantized());
        max_ap_diff = std::max(max_ap_diff,
                               std::abs(average_precision(pos, neg) - ap_oracle(pos, neg)));
    }

    // entity setting: 50 negatives, Hits@10 — relation setting: |R|-1
    // corruptions, Hits@1 and Hits@3
    bool hits_exact = true;
    for (int table = 0; table < 100; ++table) {
        std::vector<int> entity_ranks, relation_ranks;
        for (int row = 0; row < 20; ++row) {
            const double positive = quantized();
            std::vector<double> entity_negs, relation_negs;
            for (int i = 0; i < 50; ++i) entity_negs.push_back(quantized());
            const auto num_relations = 2 + rng.next_below(12);
            for (std::uint64_t i = 0; i + 1 < num_relations; ++i)
                relation_negs.push_back(quantized());
            if (pessimistic_rank(positive, entity_negs) != rank_oracle(positive, entity_negs))
                hits_exact = false;
            if (pessimistic_rank(positive, relation_negs) !=
                rank_oracle(positive, relation_negs))
                hits_exact = false;
            entity_ranks.push_back(pessimistic_rank(positive, entity_negs));
            relation_ranks.push_back(pessimistic_rank(positive, relation_negs));
        }
        const auto oracle_fraction = [](const std::vector<int>& ranks, int k) {
            int hits = 0;
            for (const int r : ranks)
                if (r <= k) ++hits;
            return static_cast<double>(hits) / static_cast<double>(ranks.size());
        };
        if (hits_fraction(entity_ranks, 10) != oracle_fraction(entity_ranks, 10))
            hits_exact = false;
        if (hits_fraction(relation_ranks, 1) != oracle_fraction(relation_ranks, 1))
            hits_exact = false;
        if (hits_fraction(relation_ranks, 3) != oracle_fraction(relation_ranks, 3))
            hits_exact = false;
    }

    char detail[96];
    std::snprintf(detail, sizeof detail, "max AP diff %.2e over 1000 instances, hits %s",
                  max_ap_diff, hits_exact ? "exact" : "MISMATCH");
    report(3, "metric oracles (AP and Hits@k)", max_ap_diff < 1e-12 && hits_exact, detail);
}

// --- criterion 4: protocol counts --------------------------------------------

void criterion_protocol_counts() {
    const KnowledgeGraph graph = KnowledgeGraph::from_triples(
        {{0, 0, 1}, {1, 1, 2}, {2, 0, 0}, {2, 2, 3}, {3, 1, 4}, {4, 2, 2}, {0, 2, 4}},
        {"a", "b", "c", "d", "e"}, {"r0", "r1", "r2"});
    std::int64_t initial_triples = 0;
    for (const Triple& t : graph.triples())
        if (graph.relations().is_initial(t.relation)) ++initial_triples;

    const PathCache conn_cache = mine_connection_corpus(graph, {10, 20000, 50}, 10, 41);
    Rng conn_rng(42);
    SampleStats conn_stats;
    const auto conn = make_connection_samples(graph, conn_cache, 3, conn_rng, &conn_stats);
    std::int64_t conn_pos = 0;
    for (const auto& s : conn) conn_pos += s.label == 1.0 ? 1 : 0;

    const PathCache sub_cache = mine_subgraph_corpus(graph, {3, 20000, 50}, 1, 43);
    Rng sub_rng(44);
    SampleStats sub_stats;
    const auto sub = make_subgraph_samples(graph, sub_cache, 3, sub_rng, &sub_stats);
    std::int64_t sub_pos = 0;
    for (const auto& s : sub) sub_pos += s.label == 1.0 ? 1 : 0;

    const bool pass =
        conn_stats.skipped == 0 &&
        static_cast<std::int64_t>(conn.size()) == 2 * initial_triples &&
        conn_pos * 2 == static_cast<std::int64_t>(conn.size()) && sub_stats.skipped == 0 &&
        static_cast<std::int64_t>(sub.size()) == 4 * initial_triples &&
        sub_pos * 4 == static_cast<std::int64_t>(sub.size());
    char detail[128];
    std::snprintf(detail, sizeof detail,
                  "%lld triples -> %zu connection samples (%lld pos), %zu subgraph (%lld pos)",
                  static_cast<long long>(initial_triples), conn.size(),
                  static_cast<long long>(conn_pos), sub.size(),
                  static_cast<long long>(sub_pos));
    report(4, "training protocol counts (1:1 and 1:3)", pass, detail);
}

// --- criterion 5: end-to-end determinism through the CLI --------------------

std::string run_capture(const std::string& command, int* exit_code) {
    std::string output;
    FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
    if (pipe == nullptr) {
        *exit_code = -1;
        return output;
    }
    std::array<char, 4096> buffer;
    std::size_t n = 0;
    while ((n = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
        output.append(buffer.data(), n);
    const int status = ::pclose(pipe);
    *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return output;
}

std::string record_line(const std::string& text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        const std::string line = text.substr(pos, end - pos);
        if (line.rfind("metric=", 0) == 0) return line;
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return {};
}

void criterion_determinism(const std::string& cli) {
    if (cli.empty()) {
        report(5, "mine/train/eval determinism", false, "--cli not supplied");
        return;
    }
    const fs::path dir = testutil::make_temp_dir("accept5");
    testutil::write_file(dir / "train.txt",
                         "a\tr0\tb\nb\tr1\tc\nc\tr0\td\nd\tr1\ta\na\tr2\tc\nb\tr2\td\n");
    testutil::write_file(dir / "inf.txt", "p\tr0\tq\nq\tr1\ts\ns\tr0\tu\nu\tr1\tp\np\tr2\ts\n");
    testutil::write_file(dir / "test.txt", "p\tr0\tq\nq\tr1\ts\n");

    const auto run_once = [&](const fs::path& out) -> std::string {
        fs::create_directories(out);
        int code = 0;
        const std::string train_graph = (dir / "train.txt").string();
        run_capture(cli + " mine --graph " + train_graph + " --mode connection --seed 11 --out " +
                        (out / "conn.cache").string(),
                    &code);
        if (code != 0) return "mine-conn failed";
        run_capture(cli + " mine --graph " + train_graph + " --mode subgraph --seed 11 --out " +
                        (out / "sub.cache").string(),
                    &code);
        if (code != 0) return "mine-sub failed";
        const std::string train_flags =
            " --dim 8 --hidden 4 --epochs 2 --batch 4 --lr 1e-3 --seed 11 --out-dir " +
            out.string();
        run_capture(cli + " train --graph " + train_graph + " --cache " +
                        (out / "conn.cache").string() + " --model connection" + train_flags,
                    &code);
        if (code != 0) return "train-conn failed";
        run_capture(cli + " train --graph " + train_graph + " --cache " +
                        (out / "sub.cache").string() + " --model subgraph" + train_flags,
                    &code);
        if (code != 0) return "train-sub failed";
        const std::string eval_out = run_capture(
            cli + " eval --train-graph " + train_graph + " --graph " + (dir / "inf.txt").string() +
                " --test " + (dir / "test.txt").string() + " --setting hits3-relation --seed 11" +
                " --sub-ckpt " + (out / "subgraph-final.ckpt").string() + " --conn-ckpt " +
                (out / "connection-final.ckpt").string(),
            &code);
        if (code != 0) return "eval failed";
        return record_line(eval_out);
    };

    const std::string record_a = run_once(dir / "run-a");
    const std::string record_b = run_once(dir / "run-b");

    bool pass = !record_a.empty() && record_a == record_b &&
                record_a.rfind("metric=", 0) == 0;
    for (const char* artifact :
         {"conn.cache", "sub.cache", "connection-epoch1.ckpt", "connection-epoch2.ckpt",
          "connection-final.ckpt", "subgraph-final.ckpt", "connection-loss.log",
          "subgraph-loss.log"}) {
        const std::string a = testutil::read_file(dir / "run-a" / artifact);
        const std::string b = testutil::read_file(dir / "run-b" / artifact);
        if (a.empty() || a != b) pass = false;
    }
    report(5, "mine/train/eval determinism (byte-identical artifacts)", pass,
           record_a.empty() ? "pipeline failed" : record_a);
}

// --- criterion 6: smoke reproduction -----------------------------------------

struct SmokeTargets {
    double auc_pr_solo = -1.0;   // WN18RR v1
    double hits3_hybrid = -1.0;  // WN18RR v1
    double hits10_solo = -1.0;   // FB15K-237 v1
};

void criterion_smoke(const fs::path& data_dir) {
    const char* name = "smoke reproduction on WN18RR v1 / FB15K-237 v1";
    const fs::path wn_train = data_dir / "WN18RR_v1" / "train.txt";
    const fs::path wn_inf = data_dir / "WN18RR_v1_ind" / "train.txt";
    const fs::path wn_test = data_dir / "WN18RR_v1_ind" / "test.txt";
    const fs::path fb_train = data_dir / "fb237_v1" / "train.txt";
    const fs::path fb_inf = data_dir / "fb237_v1_ind" / "train.txt";
    const fs::path fb_test = data_dir / "fb237_v1_ind" / "test.txt";
    if (!fs::exists(wn_train) || !fs::exists(wn_inf) || !fs::exists(wn_test)) {
        report_skip(6, name,
                    "datasets not found under " +
                        (data_dir.empty() ? std::string("<unset --data-dir>")
                                          : data_dir.string()) +
                        "; expected GraIL-layout WN18RR_v1[_ind] and fb237_v1[_ind]");
        return;
    }

    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = 1;
    SmokeTargets got;
    std::string loss_curves;

    const auto train_and_eval = [&](const fs::path& train_file, const fs::path& inf_file,
                                    const fs::path& test_file, bool avoid_popular,
                                    std::vector<EvalConfig> eval_configs,
                                    std::vector<double*> sinks) {
        const RawTriples train_raw = load_triples(train_file);
        const KnowledgeGraph graph = KnowledgeGraph::build(load_triples(train_file));
        const KnowledgeGraph inf_graph =
            KnowledgeGraph::build(load_triples(inf_file, graph.relations()));
        const std::vector<Triple> test =
            load_triples_into(test_file, inf_graph.entities(), inf_graph.relations());

        std::optional<DegreeProfile> profile;
        if (avoid_popular) profile = degree_profile(graph, 5.0);
        const DegreeProfile* avoid = profile ? &*profile : nullptr;
        const int workers = 4;

        std::cout << "  mining " << train_file << std::endl;
        const PathCache conn_cache =
            mine_connection_corpus(graph, {10, 20000, 50}, 10, seed, avoid, workers);
        const PathCache sub_cache =
            mine_subgraph_corpus(graph, {3, 20000, 50}, 1, seed, avoid, workers);

        TrainConfig config;  // paper defaults
        config.seed = seed;
        std::cout << "  training subgraph model" << std::endl;
        const TrainResult sub_result = train(ModelKind::Subgraph, graph, sub_cache, config,
                                             std::nullopt, &std::cout);
        std::cout << "  training connection model" << std::endl;
        const TrainResult conn_result = train(ModelKind::Connection, graph, conn_cache, config,
                                              std::nullopt, &std::cout);
        for (const EpochLog& log : sub_result.log)
            loss_curves += "  subgraph " + format_epoch_log(log) + "\n";
        for (const EpochLog& log : conn_result.log)
            loss_curves += "  connection " + format_epoch_log(log) + "\n";

        for (std::size_t i = 0; i < eval_configs.size(); ++i) {
            EvalConfig ec = eval_configs[i];
            ec.seed = seed;
            ec.avoid_popular = avoid_popular;
            ec.workers = workers;
            const MetricsReport report_i = evaluate(
                inf_graph, test, ec.mode == ScoreMode::Hybrid ? &conn_result.model : nullptr,
                &sub_result.model, ec);
            std::cout << "  " << to_record(report_i) << std::endl;
            *sinks[i] = report_i.value;
        }
    };

    try {
        EvalConfig auc;
        auc.setting = EvalSetting::AucPr;
        auc.mode = ScoreMode::Solo;
        EvalConfig hits3;
        hits3.setting = EvalSetting::Hits3Relation;
        hits3.mode = ScoreMode::Hybrid;
        train_and_eval(wn_train, wn_inf, wn_test, /*avoid_popular=*/true, {auc, hits3},
                       {&got.auc_pr_solo, &got.hits3_hybrid});

        if (fs::exists(fb_train) && fs::exists(fb_inf) && fs::exists(fb_test)) {
            EvalConfig hits10;
            hits10.setting = EvalSetting::Hits10Entity;
            hits10.mode = ScoreMode::Solo;
            hits10.negatives_per_positive = 50;
            train_and_eval(fb_train, fb_inf, fb_test, /*avoid_popular=*/false, {hits10},
                           {&got.hits10_solo});
        }
    } catch (const std::exception& e) {
        report(6, name, false, std::string("exception: ") + e.what());
        std::cout << loss_curves;
        return;
    }

    const double hours = seconds_since(start) / 3600.0;
    const bool fb_present = got.hits10_solo >= 0.0;
    const bool pass = got.auc_pr_solo >= 0.75 && got.hits3_hybrid >= 0.90 &&
                      (!fb_present || got.hits10_solo >= 0.70) && hours <= 6.0;
    char detail[192];
    std::snprintf(detail, sizeof detail,
                  "WN v1 auc-pr %.4f (target 0.75), hits@3 %.4f (target 0.90), FB v1 hits@10 "
                  "%.4f (target 0.70), %.2f h",
                  got.auc_pr_solo, got.hits3_hybrid, got.hits10_solo, hours);
    report(6, name, pass, detail);
    if (!pass) {
        std::cout << "loss curves:" << std::endl << loss_curves;
    }
}

// --- criterion 7: inductive contract -----------------------------------------

void criterion_inductive_contract(const std::string& cli) {
    // library level: mismatching relation vocabulary must hard-error
    const KnowledgeGraph inf_graph = KnowledgeGraph::from_triples(
        {{0, 0, 1}, {1, 1, 2}}, {"p", "q", "r"}, {"r0", "r1"});
    ModelConfig wrong{ModelKind::Subgraph, 8, 4, 3, 3};  // three relations, graph has two
    Rng rng(5);
    const Model model = Model::init(wrong, rng);
    bool threw = false;
    try {
        EvalConfig config;
        config.setting = EvalSetting::Hits1Relation;
        const std::vector<Triple> test{{0, 0, 1}};
        evaluate(inf_graph, test, nullptr, &model, config);
    } catch (const VocabError&) {
        threw = true;
    }

    // CLI level: an inference graph with relations outside the training
    // vocabulary is a data error (exit 2)
    bool cli_ok = true;
    if (!cli.empty()) {
        const fs::path dir = testutil::make_temp_dir("accept7");
        testutil::write_file(dir / "train.txt", "a\tr0\tb\nb\tr1\ta\n");
        testutil::write_file(dir / "inf.txt", "p\tr0\tq\np\tnew_rel\tq\n");
        testutil::write_file(dir / "test.txt", "p\tr0\tq\n");
        int code = 0;
        run_capture(cli + " mine --graph " + (dir / "train.txt").string() +
                        " --mode subgraph --out " + (dir / "sub.cache").string(),
                    &code);
        run_capture(cli + " train --graph " + (dir / "train.txt").string() + " --cache " +
                        (dir / "sub.cache").string() +
                        " --model subgraph --dim 8 --hidden 4 --epochs 1 --out-dir " +
                        (dir / "run").string(),
                    &code);
        run_capture(cli + " eval --train-graph " + (dir / "train.txt").string() + " --graph " +
                        (dir / "inf.txt").string() + " --test " + (dir / "test.txt").string() +
                        " --sub-ckpt " + (dir / "run" / "subgraph-final.ckpt").string(),
                    &code);
        cli_ok = code == 2;
    }
    report(7, "inductive contract (relation-vocabulary mismatch hard-errors)", threw && cli_ok,
           threw ? (cli_ok ? "library VocabError + CLI exit 2" : "CLI exit code wrong")
                 : "no VocabError raised");
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    fs::path data_dir;
    for (int i = 1; i + 1 < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--cli") cli = argv[i + 1];
        if (arg == "--data-dir") data_dir = argv[i + 1];
    }
    if (data_dir.empty() && std::getenv("SIAILP_DATA_DIR") != nullptr)
        data_dir = std::getenv("SIAILP_DATA_DIR");

    criterion_miner_oracle();
    criterion_gradients();
    criterion_metric_oracles();
    criterion_protocol_counts();
    criterion_determinism(cli);
    criterion_smoke(data_dir);
    criterion_inductive_contract(cli);

    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all runnable criteria passed" << std::endl;
    return 0;
}
