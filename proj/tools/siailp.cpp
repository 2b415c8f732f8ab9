// Command-line driver for the path-based inductive link prediction pipeline:
// mine path caches, train the connection/subgraph scorers, evaluate the
// ranking metrics, and score ad-hoc triples.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "siailp/errors.hpp"
#include "siailp/evaluator.hpp"
#include "siailp/kg.hpp"
#include "siailp/miner.hpp"
#include "siailp/models.hpp"
#include "siailp/nn.hpp"
#include "siailp/trainer.hpp"

namespace {

using namespace siailp;

// --- flat config files -------------------------------------------------------
// `key = value`, one per line, '#' comments, no sections. Keys are option
// names without the leading dashes; the command line wins over the file.

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::pair<std::string, std::string>> read_flat_config(
    const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open config file: " + file.string());
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw UsageError(file.string() + ":" + std::to_string(line_no) +
                             ": expected `key = value`");
        std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty() || value.empty())
            throw UsageError(file.string() + ":" + std::to_string(line_no) +
                             ": expected `key = value`");
        for (char& c : key)
            if (c == '_') c = '-';
        entries.emplace_back(std::move(key), value);
    }
    return entries;
}

// Splices `key = value` entries in front of the user's arguments (after the
// subcommand name) so command-line values take precedence.
std::vector<std::string> splice_config_args(const std::vector<std::string>& args,
                                            CLI::App* subcommand) {
    std::optional<std::string> config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path) return args;

    std::vector<std::string> spliced;
    spliced.push_back(args.front());  // subcommand name
    for (const auto& [key, value] : read_flat_config(*config_path)) {
        const std::string name = "--" + key;
        if (subcommand->get_option_no_throw(name) == nullptr)
            throw UsageError("unknown config key: " + key);
        spliced.push_back(name + "=" + value);
    }
    spliced.insert(spliced.end(), args.begin() + 1, args.end());
    return spliced;
}

void take_last_everywhere(CLI::App* app) {
    for (CLI::Option* opt : app->get_options())
        if (opt->get_items_expected_max() <= 1)
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

// Effective-config echo: one `# key = value` line per resolved setting.
class ConfigEcho {
  public:
    template <typename T>
    ConfigEcho& operator()(const char* key, const T& value) {
        std::cout << "# " << key << " = " << value << "\n";
        return *this;
    }

    ConfigEcho& operator()(const char* key, bool value) {
        std::cout << "# " << key << " = " << (value ? "true" : "false") << "\n";
        return *this;
    }
};

// --- shared option bundles ---------------------------------------------------

struct BudgetOptions {
    std::optional<int> length;
    std::int64_t recursions = 20000;
    int per_target = 50;

    MinerBudget resolve(int default_length) const {
        MinerBudget b;
        b.max_length = length.value_or(default_length);
        b.max_recursions = recursions;
        b.max_paths_per_target = per_target;
        if (!b.valid()) throw UsageError("budget values must be positive");
        return b;
    }
};

void add_budget_options(CLI::App* cmd, BudgetOptions& budget, const std::string& suffix,
                        const std::string& what) {
    cmd->add_option("--L" + suffix, budget.length, "max path length for " + what);
    cmd->add_option("--C" + suffix, budget.recursions,
                    "max recursions per (source, length) for " + what)
        ->capture_default_str();
    cmd->add_option("--N" + suffix, budget.per_target,
                    "max recorded paths per (source, target) for " + what)
        ->capture_default_str();
}

KnowledgeGraph load_graph(const std::filesystem::path& file) {
    return KnowledgeGraph::build(load_triples(file));
}

// --- mine --------------------------------------------------------------------

struct MineArgs {
    std::string graph, mode, out;
    BudgetOptions budget;
    std::optional<int> repeats;
    std::uint64_t seed = 0;
    bool avoid_popular = false;
    double popularity_factor = 5.0;
    int workers = 1;
};

int run_mine(const MineArgs& args) {
    const bool connection = args.mode == "connection";
    const MinerBudget budget = args.budget.resolve(connection ? 10 : 3);
    const int repeats = args.repeats.value_or(connection ? 10 : 1);
    ConfigEcho{}("graph", args.graph)("mode", args.mode)("out", args.out)(
        "L", budget.max_length)("C", budget.max_recursions)("N", budget.max_paths_per_target)(
        "repeats", repeats)("seed", args.seed)("avoid-popular", args.avoid_popular)(
        "popularity-factor", args.popularity_factor)("workers", args.workers);

    const KnowledgeGraph graph = load_graph(args.graph);
    std::optional<DegreeProfile> profile;
    if (args.avoid_popular) profile = degree_profile(graph, args.popularity_factor);

    std::cerr << "mining " << args.mode << " paths over " << graph.num_entities()
              << " entities (" << graph.triples().size() << " stored triples)\n";
    const PathCache cache =
        connection ? mine_connection_corpus(graph, budget, repeats, args.seed,
                                            profile ? &*profile : nullptr, args.workers,
                                            &std::cerr)
                   : mine_subgraph_corpus(graph, budget, repeats, args.seed,
                                          profile ? &*profile : nullptr, args.workers,
                                          &std::cerr);
    write_path_cache(cache, args.out);

    std::size_t paths = 0;
    for (const auto& [key, list] : cache.entries) paths += list.size();
    std::cout << "wrote " << args.out << ": " << cache.entries.size() << " keys, " << paths
              << " paths\n";
    return 0;
}

// --- train -------------------------------------------------------------------

struct TrainArgs {
    std::string graph, cache, model, out_dir;
    TrainConfig config;
};

int run_train(const TrainArgs& args) {
    const TrainConfig& c = args.config;
    ConfigEcho{}("graph", args.graph)("cache", args.cache)("model", args.model)(
        "out-dir", args.out_dir)("lr", c.learning_rate)("batch", c.batch_size)(
        "epochs", c.epochs)("seed", c.seed)("num-paths", c.num_paths)("dim", c.dim)(
        "hidden", c.hidden)("beta1", c.beta1)("beta2", c.beta2)("eps", c.epsilon);

    const KnowledgeGraph graph = load_graph(args.graph);
    const PathCache cache = read_path_cache(args.cache);
    const ModelKind kind =
        args.model == "connection" ? ModelKind::Connection : ModelKind::Subgraph;
    std::filesystem::create_directories(args.out_dir);

    const TrainResult result = train(kind, graph, cache, args.config, args.out_dir, &std::cerr);

    const std::filesystem::path log_path =
        std::filesystem::path(args.out_dir) / (args.model + "-loss.log");
    std::ofstream log(log_path, std::ios::binary);
    if (!log) throw DataError("cannot write loss log: " + log_path.string());
    for (const EpochLog& epoch : result.log) log << format_epoch_log(epoch) << "\n";
    std::cout << "wrote " << result.log.size() << " epoch checkpoints + final to "
              << args.out_dir << "\n";
    return 0;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
    std::string train_graph, graph, test;
    std::string setting = "auc-pr";
    std::optional<std::string> mode;
    std::string conn_ckpt, sub_ckpt;
    EvalConfig config;
    BudgetOptions conn_budget, sub_budget;
    bool table = false;
};

int run_eval(EvalArgs& args) {
    if (args.setting == "auc-pr") args.config.setting = EvalSetting::AucPr;
    else if (args.setting == "hits10-entity") args.config.setting = EvalSetting::Hits10Entity;
    else if (args.setting == "hits1-relation") args.config.setting = EvalSetting::Hits1Relation;
    else args.config.setting = EvalSetting::Hits3Relation;

    const bool relation_setting = args.config.setting == EvalSetting::Hits1Relation ||
                                  args.config.setting == EvalSetting::Hits3Relation;
    const std::string mode = args.mode.value_or(relation_setting ? "hybrid" : "solo");
    args.config.mode = mode == "solo" ? ScoreMode::Solo : ScoreMode::Hybrid;
    args.config.connection_budget = args.conn_budget.resolve(10);
    args.config.subgraph_budget = args.sub_budget.resolve(3);

    const EvalConfig& c = args.config;
    ConfigEcho{}("train-graph", args.train_graph)("graph", args.graph)("test", args.test)(
        "setting", args.setting)("mode", mode)("conn-ckpt", args.conn_ckpt)(
        "sub-ckpt", args.sub_ckpt)("negatives", c.negatives_per_positive)(
        "L-conn", c.connection_budget.max_length)("C-conn", c.connection_budget.max_recursions)(
        "N-conn", c.connection_budget.max_paths_per_target)(
        "L-sub", c.subgraph_budget.max_length)("C-sub", c.subgraph_budget.max_recursions)(
        "N-sub", c.subgraph_budget.max_paths_per_target)("seed", c.seed)(
        "avoid-popular", c.avoid_popular)("popularity-factor", c.popularity_factor)(
        "workers", c.workers);

    const RawTriples train_raw = load_triples(args.train_graph);
    const KnowledgeGraph graph =
        KnowledgeGraph::build(load_triples(args.graph, train_raw.relations));
    const std::vector<Triple> test =
        load_triples_into(args.test, graph.entities(), graph.relations());

    std::optional<Model> connection;
    if (!args.conn_ckpt.empty()) connection = Model::load(args.conn_ckpt);
    const Model subgraph = Model::load(args.sub_ckpt);

    const MetricsReport report =
        evaluate(graph, test, connection ? &*connection : nullptr, &subgraph, args.config);
    std::cout << to_record(report) << "\n";
    if (args.table) {
        std::cout << "metric              value                 n       skipped\n"
                  << report.metric << "  " << report.value << "  " << report.positives << "  "
                  << report.skipped << "\n"
                  << "# " << report.config_echo << "\n";
    }
    return 0;
}

// --- score -------------------------------------------------------------------

struct ScoreArgs {
    std::string train_graph, graph;
    std::string conn_ckpt, sub_ckpt;
    std::string source, relation, target;
    BudgetOptions conn_budget, sub_budget;
    std::uint64_t seed = 0;
};

int run_score(const ScoreArgs& args) {
    const MinerBudget conn_budget = args.conn_budget.resolve(10);
    const MinerBudget sub_budget = args.sub_budget.resolve(3);
    ConfigEcho{}("train-graph", args.train_graph)("graph", args.graph)(
        "conn-ckpt", args.conn_ckpt)("sub-ckpt", args.sub_ckpt)("source", args.source)(
        "relation", args.relation)("target", args.target)("L-conn", conn_budget.max_length)(
        "L-sub", sub_budget.max_length)("seed", args.seed);

    const RawTriples train_raw = load_triples(args.train_graph);
    const KnowledgeGraph graph =
        KnowledgeGraph::build(load_triples(args.graph, train_raw.relations));

    const auto source = graph.entities().find(args.source);
    const auto target = graph.entities().find(args.target);
    if (!source) throw DataError("unknown entity: " + args.source);
    if (!target) throw DataError("unknown entity: " + args.target);
    const auto relation = graph.relations().parse(args.relation);
    if (!relation) throw DataError("unknown relation: " + args.relation);

    const Model subgraph_model = Model::load(args.sub_ckpt);
    std::optional<Model> connection_model;
    if (!args.conn_ckpt.empty()) connection_model = Model::load(args.conn_ckpt);

    // Canonicalize before mining: an inverse-relation query then runs
    // literally the forward form's computation, materials included.
    QueryMaterials materials;
    const Query query =
        canonicalize_query(Query{*source, *relation, *target}, materials, graph.relations());
    {
        Rng rng(derive_stream(args.seed, "eval.conn", static_cast<std::uint64_t>(query.source),
                              static_cast<std::uint64_t>(query.target)));
        materials.connection =
            find_connecting_paths(graph, query.source, query.target, conn_budget, rng);
    }
    for (const auto& [entity, sink] : {std::pair{query.source, &materials.source_out},
                                       std::pair{query.target, &materials.target_out}}) {
        Rng rng(derive_stream(args.seed, "eval.sub", static_cast<std::uint64_t>(entity)));
        *sink = mine_subgraph_paths(graph, entity, sub_budget, rng);
    }

    Rng slot_rng(derive_stream(args.seed, "eval.slots",
                               static_cast<std::uint64_t>(query.source),
                               static_cast<std::uint64_t>(query.target)));
    const auto src_slots =
        draw_path_slots(materials.source_out, subgraph_model.config.num_paths, slot_rng);
    const auto tgt_slots =
        draw_path_slots(materials.target_out, subgraph_model.config.num_paths, slot_rng);
    const double sub = score_subgraph(subgraph_model, src_slots, tgt_slots, query.relation);

    std::optional<double> conn;
    if (connection_model && !materials.connection.empty()) {
        const auto conn_slots =
            draw_path_slots(materials.connection, connection_model->config.num_paths, slot_rng);
        conn = score_connection(*connection_model, conn_slots, query.relation);
    }

    const auto print_paths = [&](const char* label, const std::vector<Path>& paths) {
        std::cout << label << " (" << paths.size() << "):\n";
        for (const Path& p : paths) {
            std::cout << "  ";
            for (std::size_t i = 0; i < p.size(); ++i)
                std::cout << (i ? " . " : "") << graph.relations().display_name(p[i]);
            std::cout << "\n";
        }
    };
    print_paths("connecting paths", materials.connection);
    print_paths("source out-reaching paths", materials.source_out);
    print_paths("target out-reaching paths", materials.target_out);
    if (conn) std::cout << "connection: " << *conn << "\n";
    else std::cout << "connection: n/a (no connecting paths)\n";
    std::cout << "subgraph: " << sub << "\n";
    std::cout << "hybrid: " << hybrid_score(conn, sub) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SiaILP: path-based inductive link prediction"};
    app.require_subcommand(1);

    MineArgs mine_args;
    CLI::App* mine = app.add_subcommand("mine", "mine a path cache from a graph file");
    mine->add_option("--config", "flat key = value config file");
    mine->add_option("--graph", mine_args.graph, "triple file (head<TAB>rel<TAB>tail)")
        ->required();
    mine->add_option("--mode", mine_args.mode, "connection | subgraph")
        ->required()
        ->check(CLI::IsMember({"connection", "subgraph"}));
    mine->add_option("--out", mine_args.out, "output cache file")->required();
    add_budget_options(mine, mine_args.budget, "", "mining");
    mine->add_option("--repeats", mine_args.repeats,
                     "mining repetitions per source (default: 10 connection, 1 subgraph)");
    mine->add_option("--seed", mine_args.seed, "run seed")->capture_default_str();
    mine->add_flag("--avoid-popular", mine_args.avoid_popular,
                   "prefer non-popular entities while mining");
    mine->add_option("--popularity-factor", mine_args.popularity_factor,
                     "degree multiple over the mean that marks an entity popular")
        ->capture_default_str();
    mine->add_option("--workers", mine_args.workers, "parallel mining workers")
        ->capture_default_str();

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train a model from a mined cache");
    train_cmd->add_option("--config", "flat key = value config file");
    train_cmd->add_option("--graph", train_args.graph, "training triple file")->required();
    train_cmd->add_option("--cache", train_args.cache, "path cache file")->required();
    train_cmd->add_option("--model", train_args.model, "connection | subgraph")
        ->required()
        ->check(CLI::IsMember({"connection", "subgraph"}));
    train_cmd->add_option("--out-dir", train_args.out_dir, "checkpoint/log directory")
        ->required();
    train_cmd->add_option("--lr", train_args.config.learning_rate, "learning rate")
        ->capture_default_str();
    train_cmd->add_option("--batch", train_args.config.batch_size, "batch size")
        ->capture_default_str();
    train_cmd->add_option("--epochs", train_args.config.epochs, "training epochs")
        ->capture_default_str();
    train_cmd->add_option("--seed", train_args.config.seed, "run seed")->capture_default_str();
    train_cmd->add_option("--num-paths", train_args.config.num_paths,
                          "path slots per stack group (3 basic, 6 large)")
        ->capture_default_str();
    train_cmd->add_option("--dim", train_args.config.dim, "embedding size D (= 2H)")
        ->capture_default_str();
    train_cmd->add_option("--hidden", train_args.config.hidden, "LSTM hidden units H")
        ->capture_default_str();
    train_cmd->add_option("--beta1", train_args.config.beta1, "Adam beta1")
        ->capture_default_str();
    train_cmd->add_option("--beta2", train_args.config.beta2, "Adam beta2")
        ->capture_default_str();
    train_cmd->add_option("--eps", train_args.config.epsilon, "Adam epsilon")
        ->capture_default_str();

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a metric on an inference graph");
    eval_cmd->add_option("--config", "flat key = value config file");
    eval_cmd->add_option("--train-graph", eval_args.train_graph,
                         "training triple file (fixes the relation vocabulary)")
        ->required();
    eval_cmd->add_option("--graph", eval_args.graph, "inference triple file")->required();
    eval_cmd->add_option("--test", eval_args.test, "test triple file")->required();
    eval_cmd->add_option("--setting", eval_args.setting,
                         "auc-pr | hits10-entity | hits1-relation | hits3-relation")
        ->capture_default_str()
        ->check(CLI::IsMember({"auc-pr", "hits10-entity", "hits1-relation", "hits3-relation"}));
    eval_cmd->add_option("--mode", eval_args.mode,
                         "solo | hybrid (default: hybrid for relation settings, solo otherwise)")
        ->check(CLI::IsMember({"solo", "hybrid"}));
    eval_cmd->add_option("--conn-ckpt", eval_args.conn_ckpt, "connection model checkpoint");
    eval_cmd->add_option("--sub-ckpt", eval_args.sub_ckpt, "subgraph model checkpoint")
        ->required();
    eval_cmd->add_option("--negatives", eval_args.config.negatives_per_positive,
                         "negatives per positive for entity ranking")
        ->capture_default_str();
    add_budget_options(eval_cmd, eval_args.conn_budget, "-conn", "connection paths");
    add_budget_options(eval_cmd, eval_args.sub_budget, "-sub", "out-reaching paths");
    eval_cmd->add_option("--seed", eval_args.config.seed, "run seed")->capture_default_str();
    eval_cmd->add_flag("--avoid-popular", eval_args.config.avoid_popular,
                       "prefer non-popular entities while mining");
    eval_cmd->add_option("--popularity-factor", eval_args.config.popularity_factor,
                         "degree multiple over the mean that marks an entity popular")
        ->capture_default_str();
    eval_cmd->add_option("--workers", eval_args.config.workers, "parallel scoring workers")
        ->capture_default_str();
    eval_cmd->add_flag("--table", eval_args.table, "also print a human-readable table");

    ScoreArgs score_args;
    CLI::App* score_cmd = app.add_subcommand("score", "score one triple ad hoc");
    score_cmd->add_option("--config", "flat key = value config file");
    score_cmd->add_option("--train-graph", score_args.train_graph, "training triple file")
        ->required();
    score_cmd->add_option("--graph", score_args.graph, "inference triple file")->required();
    score_cmd->add_option("--conn-ckpt", score_args.conn_ckpt, "connection model checkpoint");
    score_cmd->add_option("--sub-ckpt", score_args.sub_ckpt, "subgraph model checkpoint")
        ->required();
    score_cmd->add_option("--source", score_args.source, "source entity name")->required();
    score_cmd->add_option("--relation", score_args.relation,
                          "relation name (append ^-1 for the inverse)")
        ->required();
    score_cmd->add_option("--target", score_args.target, "target entity name")->required();
    add_budget_options(score_cmd, score_args.conn_budget, "-conn", "connection paths");
    add_budget_options(score_cmd, score_args.sub_budget, "-sub", "out-reaching paths");
    score_cmd->add_option("--seed", score_args.seed, "run seed")->capture_default_str();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        if (!args.empty()) {
            for (CLI::App* sub : {mine, train_cmd, eval_cmd, score_cmd}) {
                if (sub->get_name() == args.front()) {
                    take_last_everywhere(sub);
                    args = splice_config_args(args, sub);
                    break;
                }
            }
        }
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);

        if (mine->parsed()) return run_mine(mine_args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        return run_score(score_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1; help/version exit 0
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
