#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "siailp/kg.hpp"
#include "siailp/nn.hpp"
#include "siailp/path.hpp"
#include "siailp/rng.hpp"

namespace siailp {

enum class ModelKind { Connection, Subgraph };

std::string_view model_kind_name(ModelKind kind);

struct ModelConfig {
    ModelKind kind = ModelKind::Connection;
    int dim = 300;     // relation embedding size D; D = 2H by construction
    int hidden = 150;  // hidden units H per LSTM direction
    int num_initial_relations = 0;
    int num_paths = 3;  // path slots per stack group (3 basic, 6 large)

    int ffn_input_width() const {
        return (kind == ModelKind::Connection ? 1 : 2) * num_paths * dim;
    }
};

// A siamese path scorer: input/output relation embedding tables, one shared
// encoder stack (two bi-LSTM layers + dimension-wise max-pool) applied to
// every path slot, and a feed-forward head. Connection and subgraph models
// share the architecture but never share parameters.
struct Model {
    ModelConfig config;
    ParamStore store;

    static Model init(const ModelConfig& config, Rng& rng);
    static Model load(const std::filesystem::path& checkpoint);
    void save(const std::filesystem::path& checkpoint) const;
};

// Shared encoder: embed -> bi-LSTM x2 -> max-pool. Used by both models and
// by every path slot within a model (that is the weight sharing).
Tape::NodeId encode_path(Tape& tape, const Model& model, Tape::NodeId input_table,
                         const Path& path);

// Normalized representation of `num_paths` connecting paths (slot order is
// the concatenation order).
Tape::NodeId connection_representation(Tape& tape, const Model& model,
                                       std::span<const Path> paths);

// Normalized representation of out-reaching paths from the source side then
// the target side; the same encoder parameters process both sides.
Tape::NodeId subgraph_representation(Tape& tape, const Model& model,
                                     std::span<const Path> source_paths,
                                     std::span<const Path> target_paths);

// Clamped cosine between a normalized representation and the normalized
// output embedding of an initial relation.
Tape::NodeId relation_cosine(Tape& tape, const Model& model, Tape::NodeId representation,
                             RelationId relation);

// p = (1 + cos(h_rep, out_emb[relation])) / 2 for an initial relation.
Tape::NodeId relation_probability(Tape& tape, const Model& model, Tape::NodeId representation,
                                  RelationId relation);

double score_connection(const Model& model, std::span<const Path> paths, RelationId relation);
double score_subgraph(const Model& model, std::span<const Path> source_paths,
                      std::span<const Path> target_paths, RelationId relation);

// Mean of both model probabilities when any connecting path exists;
// subgraph-only otherwise.
double hybrid_score(std::optional<double> connection, double subgraph);

struct Query {
    EntityId source = -1;
    RelationId relation = -1;  // expanded id
    EntityId target = -1;
};

struct QueryMaterials {
    std::vector<Path> connection;  // paths source -> target
    std::vector<Path> source_out;  // out-reaching from source
    std::vector<Path> target_out;  // out-reaching from target
};

// Scoring (s, r^-1, t) equals scoring (t, r, s) with inverted connection
// paths and swapped endpoint path sets; initial-relation queries are
// returned unchanged. Involution.
Query canonicalize_query(const Query& query, QueryMaterials& materials,
                         const RelationVocab& relations);

// Fills `num_paths` slots from the available paths: a uniform draw without
// replacement when enough distinct paths exist, with replacement otherwise.
// An empty pool yields zero-embedding pseudo-paths.
std::vector<Path> draw_path_slots(const std::vector<Path>& available, int num_paths, Rng& rng);

}  // namespace siailp
