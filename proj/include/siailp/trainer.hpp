#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "siailp/kg.hpp"
#include "siailp/miner.hpp"
#include "siailp/models.hpp"
#include "siailp/nn.hpp"

namespace siailp {

struct TrainConfig {
    double learning_rate = 1e-5;
    int batch_size = 32;
    int epochs = 10;
    std::uint64_t seed = 0;
    int num_paths = 3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int dim = 300;
    int hidden = 150;

    void validate() const;
};

struct TrainSample {
    std::vector<Path> paths;       // connection slots
    std::vector<Path> source_out;  // subgraph slots, source side
    std::vector<Path> target_out;  // subgraph slots, target side
    RelationId relation = -1;      // initial id
    double label = 0.0;
    EntityId source = -1;  // for abort diagnostics only
    EntityId target = -1;
};

struct SampleStats {
    std::int64_t emitted = 0;
    std::int64_t skipped = 0;  // triples/samples without usable paths
};

// Per covered triple (initial relation, non-empty cache entry): one positive
// and one negative with the same paths and a corrupted relation drawn from
// the initial relations not linking (s, t). Exact 1:1 labels.
std::vector<TrainSample> make_connection_samples(const KnowledgeGraph& graph,
                                                 const PathCache& cache, int num_paths,
                                                 Rng& rng, SampleStats* stats = nullptr);

// Per initial triple (s,r,t): samples for (s,r,t), (s,r',t), (s,r,t') and
// (s',r,t) with labels 1,0,0,0; s',t' uniform over all entities, r' != r.
std::vector<TrainSample> make_subgraph_samples(const KnowledgeGraph& graph,
                                               const PathCache& cache, int num_paths, Rng& rng,
                                               SampleStats* stats = nullptr);

// Loss node for one sample under the given model (bce on the clamped cosine).
Tape::NodeId sample_loss(Tape& tape, const Model& model, const TrainSample& sample);

// Mean loss and mean gradients over a batch; samples are reduced in index
// order so results do not depend on scheduling.
std::pair<double, GradStore> batch_gradients(const Model& model,
                                             std::span<const TrainSample> batch);

struct AdamMoments {
    Matrix m, v;
    std::int64_t step = 0;
};
using AdamState = std::map<std::string, AdamMoments, std::less<>>;

// Bias-corrected Adam. Blocks with an all-zero (or absent) gradient are left
// untouched, including their moment state.
void adam_step(ParamStore& store, const GradStore& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

struct EpochLog {
    int epoch = 0;
    std::int64_t samples = 0;
    double mean_loss = 0.0;
};

std::string format_epoch_log(const EpochLog& log);

struct TrainResult {
    Model model;
    std::vector<EpochLog> log;
};

// Full contrastive training loop: resampled stream per epoch, seeded shuffle,
// batches of config.batch_size, Adam steps, a checkpoint per epoch plus a
// final one when checkpoint_dir is given. Deterministic in (seed, config,
// cache).
TrainResult train(ModelKind kind, const KnowledgeGraph& graph, const PathCache& cache,
                  const TrainConfig& config,
                  const std::optional<std::filesystem::path>& checkpoint_dir = std::nullopt,
                  std::ostream* progress = nullptr);

}  // namespace siailp
