#include "siailp/models.hpp"

#include <cmath>

#include "siailp/errors.hpp"

namespace siailp {

std::string_view model_kind_name(ModelKind kind) {
    return kind == ModelKind::Connection ? "connection" : "subgraph";
}

namespace {

void fill_uniform(Matrix& m, double bound, Rng& rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = (2.0 * rng.next_double() - 1.0) * bound;
}

void init_lstm_blocks(ParamStore& store, const std::string& prefix, int dim, int hidden,
                      Rng& rng) {
    for (const char* dir : {".fwd", ".bwd"}) {
        ParamBlock& w_x = store.add(prefix + dir + ".w_x", 4 * hidden, dim);
        fill_uniform(w_x.values, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
        ParamBlock& w_h = store.add(prefix + dir + ".w_h", 4 * hidden, hidden);
        fill_uniform(w_h.values, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
        ParamBlock& b = store.add(prefix + dir + ".b", 4 * hidden, 1);
        // forget-gate rows start at 1, everything else at 0
        b.values.block(hidden, 0, hidden, 1).setOnes();
    }
}

}  // namespace

Model Model::init(const ModelConfig& config, Rng& rng) {
    if (config.dim != 2 * config.hidden)
        throw UsageError("model requires dim == 2 * hidden");
    if (config.num_initial_relations < 1)
        throw UsageError("model requires at least one relation");
    if (config.num_paths < 1) throw UsageError("num_paths must be >= 1");

    Model model;
    model.config = config;
    ParamStore& store = model.store;
    const int expanded = 2 * config.num_initial_relations;
    const double emb_bound = 1.0 / std::sqrt(static_cast<double>(config.dim));

    fill_uniform(store.add("in_emb", config.dim, expanded).values, emb_bound, rng);
    fill_uniform(store.add("out_emb", config.dim, expanded).values, emb_bound, rng);
    init_lstm_blocks(store, "lstm1", config.dim, config.hidden, rng);
    init_lstm_blocks(store, "lstm2", config.dim, config.hidden, rng);

    const int ffn_in = config.ffn_input_width();
    fill_uniform(store.add("ffn.w1", 2 * config.dim, ffn_in).values,
                 1.0 / std::sqrt(static_cast<double>(ffn_in)), rng);
    store.add("ffn.b1", 2 * config.dim, 1);
    fill_uniform(store.add("ffn.w2", config.dim, 2 * config.dim).values,
                 1.0 / std::sqrt(static_cast<double>(2 * config.dim)), rng);
    store.add("ffn.b2", config.dim, 1);
    return model;
}

Model Model::load(const std::filesystem::path& checkpoint) {
    auto [meta, store] = load_checkpoint(checkpoint);
    Model model;
    model.config.dim = meta.dim;
    model.config.hidden = meta.hidden;
    model.config.num_initial_relations = meta.num_initial_relations;
    if (meta.model == "connection")
        model.config.kind = ModelKind::Connection;
    else if (meta.model == "subgraph")
        model.config.kind = ModelKind::Subgraph;
    else
        throw DataError(checkpoint.string() + ": unknown model kind: " + meta.model);
    if (meta.dim != 2 * meta.hidden)
        throw DataError(checkpoint.string() + ": checkpoint requires D == 2H");
    const auto ffn_in = store.block("ffn.w1").values.cols();
    const int per_group = model.config.kind == ModelKind::Connection ? 1 : 2;
    if (meta.dim < 2 || ffn_in % (per_group * meta.dim) != 0)
        throw DataError(checkpoint.string() + ": inconsistent head width");
    model.config.num_paths = static_cast<int>(ffn_in / (per_group * meta.dim));
    model.store = std::move(store);
    return model;
}

void Model::save(const std::filesystem::path& checkpoint) const {
    save_checkpoint(checkpoint,
                    CheckpointMeta{std::string(model_kind_name(config.kind)), config.dim,
                                   config.hidden, config.num_initial_relations},
                    store);
}

Tape::NodeId encode_path(Tape& tape, const Model& model, Tape::NodeId input_table,
                         const Path& path) {
    const auto embedded = embed_sequence(tape, input_table, path);
    const auto layer1 = bilstm_layer(tape, model.store, "lstm1", embedded);
    const auto layer2 = bilstm_layer(tape, model.store, "lstm2", layer1);
    return maxpool_dimwise(tape, layer2);
}

namespace {

void check_paths(const Model& model, std::span<const Path> paths) {
    if (static_cast<int>(paths.size()) != model.config.num_paths)
        throw DataError("expected " + std::to_string(model.config.num_paths) +
                        " path slots, got " + std::to_string(paths.size()));
    const int expanded = 2 * model.config.num_initial_relations;
    for (const Path& p : paths)
        for (const RelationId r : p)
            if (r < 0 || r >= expanded)
                throw DataError("path relation id out of range: " + std::to_string(r));
}

}  // namespace

Tape::NodeId connection_representation(Tape& tape, const Model& model,
                                       std::span<const Path> paths) {
    if (model.config.kind != ModelKind::Connection)
        throw UsageError("connection_representation on a subgraph model");
    check_paths(model, paths);
    const Tape::NodeId input_table = tape.param(model.store.block("in_emb"));
    std::vector<Tape::NodeId> pooled;
    pooled.reserve(paths.size());
    for (const Path& p : paths) pooled.push_back(encode_path(tape, model, input_table, p));
    return unit_normalize(tape, ffn(tape, model.store, tape.concat(pooled)));
}

Tape::NodeId subgraph_representation(Tape& tape, const Model& model,
                                     std::span<const Path> source_paths,
                                     std::span<const Path> target_paths) {
    if (model.config.kind != ModelKind::Subgraph)
        throw UsageError("subgraph_representation on a connection model");
    check_paths(model, source_paths);
    check_paths(model, target_paths);
    const Tape::NodeId input_table = tape.param(model.store.block("in_emb"));
    std::vector<Tape::NodeId> pooled;
    pooled.reserve(source_paths.size() + target_paths.size());
    for (const Path& p : source_paths) pooled.push_back(encode_path(tape, model, input_table, p));
    for (const Path& p : target_paths) pooled.push_back(encode_path(tape, model, input_table, p));
    return unit_normalize(tape, ffn(tape, model.store, tape.concat(pooled)));
}

Tape::NodeId relation_cosine(Tape& tape, const Model& model, Tape::NodeId representation,
                             RelationId relation) {
    if (relation < 0 || relation >= model.config.num_initial_relations)
        throw DataError("target relation must be an initial id");
    const Tape::NodeId out_table = tape.param(model.store.block("out_emb"));
    const Tape::NodeId target = unit_normalize(tape, tape.column(out_table, relation));
    return cosine_score(tape, representation, target);
}

Tape::NodeId relation_probability(Tape& tape, const Model& model, Tape::NodeId representation,
                                  RelationId relation) {
    const Tape::NodeId cos = relation_cosine(tape, model, representation, relation);
    // affine map of the cosine into [0, 1]
    Matrix half(1, 1), one(1, 1);
    half(0, 0) = 0.5;
    one(0, 0) = 1.0;
    const Tape::NodeId shifted = tape.add(cos, tape.constant(one));
    return tape.mul(shifted, tape.constant(half));
}

double score_connection(const Model& model, std::span<const Path> paths, RelationId relation) {
    Tape tape;
    return tape.scalar(
        relation_probability(tape, model, connection_representation(tape, model, paths),
                             relation));
}

double score_subgraph(const Model& model, std::span<const Path> source_paths,
                      std::span<const Path> target_paths, RelationId relation) {
    Tape tape;
    return tape.scalar(relation_probability(
        tape, model, subgraph_representation(tape, model, source_paths, target_paths),
        relation));
}

double hybrid_score(std::optional<double> connection, double subgraph) {
    return connection ? (*connection + subgraph) / 2.0 : subgraph;
}

Query canonicalize_query(const Query& query, QueryMaterials& materials,
                         const RelationVocab& relations) {
    if (relations.is_initial(query.relation)) return query;
    for (Path& p : materials.connection) p = inverse_path(p, relations);
    std::swap(materials.source_out, materials.target_out);
    return Query{query.target, relations.inverse_of(query.relation), query.source};
}

std::vector<Path> draw_path_slots(const std::vector<Path>& available, int num_paths, Rng& rng) {
    std::vector<Path> slots;
    slots.reserve(static_cast<std::size_t>(num_paths));
    if (available.empty()) {
        slots.assign(static_cast<std::size_t>(num_paths), Path{});
        return slots;
    }
    if (static_cast<int>(available.size()) >= num_paths) {
        // uniform without replacement: partial Fisher-Yates over indices
        std::vector<std::size_t> order(available.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (int k = 0; k < num_paths; ++k) {
            const std::size_t j =
                static_cast<std::size_t>(k) + rng.next_below(order.size() - static_cast<std::size_t>(k));
            std::swap(order[static_cast<std::size_t>(k)], order[j]);
            slots.push_back(available[order[static_cast<std::size_t>(k)]]);
        }
        return slots;
    }
    for (int k = 0; k < num_paths; ++k)
        slots.push_back(available[rng.next_below(available.size())]);
    return slots;
}

}  // namespace siailp
