#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "siailp/path.hpp"
#include "siailp/rng.hpp"

namespace siailp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// All numerics are 64-bit: the models are tiny and the gradient checks and
// byte-identical checkpoint contract want exactly reproducible arithmetic.

struct ParamBlock {
    std::string name;
    Matrix values;
};

// Named, shaped parameter blocks in a stable definition order (the order is
// the checkpoint layout).
class ParamStore {
  public:
    ParamBlock& add(std::string name, Eigen::Index rows, Eigen::Index cols);
    ParamBlock& block(std::string_view name);
    const ParamBlock& block(std::string_view name) const;
    bool has(std::string_view name) const;
    const std::vector<ParamBlock>& blocks() const { return blocks_; }
    std::vector<ParamBlock>& blocks() { return blocks_; }
    std::size_t total_parameters() const;

  private:
    std::vector<ParamBlock> blocks_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Gradients per block name; ordered so optimizer passes are deterministic.
using GradStore = std::map<std::string, Matrix, std::less<>>;

struct CheckpointMeta {
    std::string model;  // "connection" or "subgraph"
    int dim = 0;
    int hidden = 0;
    int num_initial_relations = 0;
};

// Text checkpoint with 17-significant-digit values; round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& file, const CheckpointMeta& meta,
                     const ParamStore& store);
std::pair<CheckpointMeta, ParamStore> load_checkpoint(const std::filesystem::path& file);

// Records the forward computation and replays it in reverse to accumulate
// d(loss)/d(block) for every parameter block it touched. Vectors are n-by-1
// matrices throughout.
class Tape {
  public:
    using NodeId = std::int32_t;

    NodeId param(const ParamBlock& block);
    NodeId constant(Matrix value);
    NodeId zeros(Eigen::Index rows);

    NodeId column(NodeId table, int col);
    NodeId matvec(NodeId w, NodeId x);
    NodeId add(NodeId a, NodeId b);
    NodeId rows(NodeId v, int offset, int count);
    NodeId sigmoid(NodeId x);
    NodeId tanh(NodeId x);
    NodeId relu(NodeId x);
    NodeId mul(NodeId a, NodeId b);  // elementwise
    NodeId concat(std::span<const NodeId> parts);
    // Dimension-wise max over equally sized vectors; on ties the gradient
    // routes to the earliest input.
    NodeId max_elements(std::span<const NodeId> parts);
    // x / ||x||_2; errors when the norm falls below the numeric guard.
    NodeId normalize(NodeId x);
    NodeId dot(NodeId a, NodeId b);
    NodeId clamp_unit(NodeId s);  // clamp a scalar to [-1, 1]
    // p = (1 + s) / 2 clamped to [delta, 1-delta]; scalar cross-entropy.
    NodeId bce(NodeId score, double label);

    const Matrix& value(NodeId id) const;
    double scalar(NodeId id) const;

    // Accumulates scale * d(value(loss))/d(block) into `grads` for every
    // touched parameter block. `loss` must be scalar and finite.
    void backward(NodeId loss, GradStore& grads, double scale = 1.0) const;

    std::size_t size() const { return nodes_.size(); }

  private:
    enum class Op : std::uint8_t {
        Constant, Param, Column, MatVec, Add, Rows, Sigmoid, Tanh, Relu,
        Mul, Concat, MaxElements, Normalize, Dot, ClampUnit, Bce,
    };

    struct Node {
        Op op;
        Matrix value;
        std::vector<NodeId> inputs;
        const ParamBlock* block = nullptr;
        int a = 0, b = 0;          // column index / row slice
        double x = 0.0, y = 0.0;   // op-specific scalars (norm, label, p)
        bool pass_through = true;  // clamp gradient gate
        std::vector<int> argmax;
    };

    NodeId push(Node node);
    const Node& at(NodeId id) const;

    std::vector<Node> nodes_;
};

// Scalar reference used by the tape op and by callers that only need the
// forward value: p = (1+score)/2 clamped to [delta, 1-delta].
double bce_loss(double score, double label);

// --- model-layer building blocks -------------------------------------------

// Input-embedding columns for a relation sequence. The empty pseudo-path
// maps to a single zero vector, so downstream layers still see a sequence.
std::vector<Tape::NodeId> embed_sequence(Tape& tape, Tape::NodeId table, const Path& path);

// Bi-directional LSTM layer reading blocks `<prefix>.{fwd,bwd}.{w_x,w_h,b}`.
// Per-timestep output is [forward_h_t ; backward_h_t] of size 2H.
std::vector<Tape::NodeId> bilstm_layer(Tape& tape, const ParamStore& store,
                                       const std::string& prefix,
                                       std::span<const Tape::NodeId> sequence);

Tape::NodeId maxpool_dimwise(Tape& tape, std::span<const Tape::NodeId> sequence);

// Hidden layer with ReLU then an affine map, blocks ffn.{w1,b1,w2,b2}.
Tape::NodeId ffn(Tape& tape, const ParamStore& store, Tape::NodeId x);

Tape::NodeId unit_normalize(Tape& tape, Tape::NodeId x);
Tape::NodeId cosine_score(Tape& tape, Tape::NodeId a, Tape::NodeId b);

// --- gradient checking ------------------------------------------------------

struct FdCheckResult {
    double max_rel_err = 0.0;
    int samples_checked = 0;
};

// Central differences over randomly chosen scalar parameters; `loss_fn` must
// re-run the forward pass against the current store contents.
FdCheckResult finite_diff_check(const std::function<double()>& loss_fn, ParamStore& store,
                                const GradStore& analytic, int samples, Rng& rng,
                                double step = 1e-5);

}  // namespace siailp
