#include "siailp/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "siailp/errors.hpp"

namespace siailp {

namespace {
constexpr double kNormGuard = 1e-12;
constexpr double kProbGuard = 1e-7;
}  // namespace

ParamBlock& ParamStore::add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    if (index_.contains(name)) throw DataError("duplicate parameter block: " + name);
    index_.emplace(name, blocks_.size());
    blocks_.push_back(ParamBlock{std::move(name), Matrix::Zero(rows, cols)});
    return blocks_.back();
}

ParamBlock& ParamStore::block(std::string_view name) {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) throw DataError("unknown parameter block: " + std::string(name));
    return blocks_[it->second];
}

const ParamBlock& ParamStore::block(std::string_view name) const {
    const auto it = index_.find(std::string(name));
    if (it == index_.end()) throw DataError("unknown parameter block: " + std::string(name));
    return blocks_[it->second];
}

bool ParamStore::has(std::string_view name) const {
    return index_.contains(std::string(name));
}

std::size_t ParamStore::total_parameters() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += static_cast<std::size_t>(b.values.size());
    return n;
}

void save_checkpoint(const std::filesystem::path& file, const CheckpointMeta& meta,
                     const ParamStore& store) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + file.string());
    out << "SIAILP-CKPT v1 model=" << meta.model << " D=" << meta.dim << " H=" << meta.hidden
        << " R=" << meta.num_initial_relations << "\n";
    char buf[40];
    for (const ParamBlock& b : store.blocks()) {
        out << '[' << b.name << "] " << b.values.rows() << ' ' << b.values.cols() << '\n';
        for (Eigen::Index i = 0; i < b.values.rows(); ++i) {
            for (Eigen::Index j = 0; j < b.values.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", b.values(i, j));
                if (j) out << ' ';
                out << buf;
            }
            out << '\n';
        }
    }
    if (!out) throw DataError("failed writing checkpoint: " + file.string());
}

std::pair<CheckpointMeta, ParamStore> load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + file.string());
    std::string header;
    if (!std::getline(in, header)) throw ParseError(file.string() + ": empty checkpoint");
    CheckpointMeta meta;
    {
        char model[32] = {0};
        if (std::sscanf(header.c_str(), "SIAILP-CKPT v1 model=%31s D=%d H=%d R=%d", model,
                        &meta.dim, &meta.hidden, &meta.num_initial_relations) != 4)
            throw ParseError(file.string() + ": bad checkpoint header: " + header);
        meta.model = model;
    }
    ParamStore store;
    std::string token;
    while (in >> token) {
        if (token.size() < 2 || token.front() != '[' || token.back() != ']')
            throw ParseError(file.string() + ": expected block name, got: " + token);
        const std::string name = token.substr(1, token.size() - 2);
        Eigen::Index rows = 0, cols = 0;
        if (!(in >> rows >> cols) || rows < 1 || cols < 1)
            throw ParseError(file.string() + ": bad shape for block " + name);
        ParamBlock& b = store.add(name, rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                if (!(in >> b.values(i, j)))
                    throw ParseError(file.string() + ": truncated block " + name);
    }
    return {std::move(meta), std::move(store)};
}

// --- tape -------------------------------------------------------------------

Tape::NodeId Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<NodeId>(nodes_.size() - 1);
}

const Tape::Node& Tape::at(NodeId id) const {
    return nodes_[static_cast<std::size_t>(id)];
}

const Matrix& Tape::value(NodeId id) const {
    const Node& n = at(id);
    return n.op == Op::Param ? n.block->values : n.value;
}

double Tape::scalar(NodeId id) const {
    const Matrix& v = value(id);
    if (v.rows() != 1 || v.cols() != 1) throw DataError("node is not scalar");
    return v(0, 0);
}

Tape::NodeId Tape::param(const ParamBlock& block) {
    Node n{Op::Param, {}, {}, &block};
    return push(std::move(n));
}

Tape::NodeId Tape::constant(Matrix value) {
    Node n{Op::Constant, std::move(value), {}};
    return push(std::move(n));
}

Tape::NodeId Tape::zeros(Eigen::Index rows) { return constant(Matrix::Zero(rows, 1)); }

Tape::NodeId Tape::column(NodeId table, int col) {
    const Matrix& t = value(table);
    if (col < 0 || col >= t.cols())
        throw DataError("embedding column out of range: " + std::to_string(col));
    Node n{Op::Column, t.col(col), {table}};
    n.a = col;
    return push(std::move(n));
}

Tape::NodeId Tape::matvec(NodeId w, NodeId x) {
    const Matrix& wv = value(w);
    const Matrix& xv = value(x);
    if (xv.cols() != 1 || wv.cols() != xv.rows()) throw DataError("matvec shape mismatch");
    Node n{Op::MatVec, wv * xv, {w, x}};
    return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
    const Matrix& av = value(a);
    const Matrix& bv = value(b);
    if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw DataError("add shape mismatch");
    Node n{Op::Add, av + bv, {a, b}};
    return push(std::move(n));
}

Tape::NodeId Tape::rows(NodeId v, int offset, int count) {
    const Matrix& vv = value(v);
    if (vv.cols() != 1 || offset < 0 || count < 1 || offset + count > vv.rows())
        throw DataError("row slice out of range");
    Node n{Op::Rows, vv.block(offset, 0, count, 1), {v}};
    n.a = offset;
    n.b = count;
    return push(std::move(n));
}

Tape::NodeId Tape::sigmoid(NodeId x) {
    Node n{Op::Sigmoid, value(x).unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); }),
           {x}};
    return push(std::move(n));
}

Tape::NodeId Tape::tanh(NodeId x) {
    Node n{Op::Tanh, value(x).array().tanh().matrix(), {x}};
    return push(std::move(n));
}

Tape::NodeId Tape::relu(NodeId x) {
    Node n{Op::Relu, value(x).cwiseMax(0.0), {x}};
    return push(std::move(n));
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
    const Matrix& av = value(a);
    const Matrix& bv = value(b);
    if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw DataError("mul shape mismatch");
    Node n{Op::Mul, av.cwiseProduct(bv), {a, b}};
    return push(std::move(n));
}

Tape::NodeId Tape::concat(std::span<const NodeId> parts) {
    if (parts.empty()) throw DataError("concat of zero vectors");
    Eigen::Index total = 0;
    for (const NodeId p : parts) {
        if (value(p).cols() != 1) throw DataError("concat expects vectors");
        total += value(p).rows();
    }
    Matrix out(total, 1);
    Eigen::Index offset = 0;
    for (const NodeId p : parts) {
        out.block(offset, 0, value(p).rows(), 1) = value(p);
        offset += value(p).rows();
    }
    Node n{Op::Concat, std::move(out), {parts.begin(), parts.end()}};
    return push(std::move(n));
}

Tape::NodeId Tape::max_elements(std::span<const NodeId> parts) {
    if (parts.empty()) throw DataError("max over an empty sequence");
    const Eigen::Index rows = value(parts.front()).rows();
    for (const NodeId p : parts)
        if (value(p).rows() != rows || value(p).cols() != 1)
            throw DataError("max over unequal vector sizes");
    Node n{Op::MaxElements, value(parts.front()), {parts.begin(), parts.end()}};
    n.argmax.assign(static_cast<std::size_t>(rows), 0);
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const Matrix& v = value(parts[k]);
        for (Eigen::Index d = 0; d < rows; ++d) {
            if (v(d, 0) > n.value(d, 0)) {  // strict: ties stay on the first index
                n.value(d, 0) = v(d, 0);
                n.argmax[static_cast<std::size_t>(d)] = static_cast<int>(k);
            }
        }
    }
    return push(std::move(n));
}

Tape::NodeId Tape::normalize(NodeId x) {
    const Matrix& xv = value(x);
    const double norm = xv.norm();
    if (!(norm > kNormGuard)) throw NumericError("cannot normalize a near-zero vector");
    Node n{Op::Normalize, xv / norm, {x}};
    n.x = norm;
    return push(std::move(n));
}

Tape::NodeId Tape::dot(NodeId a, NodeId b) {
    const Matrix& av = value(a);
    const Matrix& bv = value(b);
    if (av.rows() != bv.rows() || av.cols() != 1 || bv.cols() != 1)
        throw DataError("dot shape mismatch");
    Matrix out(1, 1);
    out(0, 0) = av.col(0).dot(bv.col(0));
    Node n{Op::Dot, std::move(out), {a, b}};
    return push(std::move(n));
}

Tape::NodeId Tape::clamp_unit(NodeId s) {
    const double raw = scalar(s);
    Matrix out(1, 1);
    out(0, 0) = std::clamp(raw, -1.0, 1.0);
    Node n{Op::ClampUnit, std::move(out), {s}};
    n.pass_through = raw >= -1.0 && raw <= 1.0;
    return push(std::move(n));
}

double bce_loss(double score, double label) {
    const double p = std::clamp((1.0 + score) / 2.0, kProbGuard, 1.0 - kProbGuard);
    return -label * std::log(p) - (1.0 - label) * std::log(1.0 - p);
}

Tape::NodeId Tape::bce(NodeId score, double label) {
    const double s = scalar(score);
    const double raw_p = (1.0 + s) / 2.0;
    const double p = std::clamp(raw_p, kProbGuard, 1.0 - kProbGuard);
    Matrix out(1, 1);
    out(0, 0) = -label * std::log(p) - (1.0 - label) * std::log(1.0 - p);
    Node n{Op::Bce, std::move(out), {score}};
    n.x = label;
    n.y = p;
    n.pass_through = raw_p == p;
    return push(std::move(n));
}

void Tape::backward(NodeId loss, GradStore& grads, double scale) const {
    const Matrix& loss_value = value(loss);
    if (loss_value.rows() != 1 || loss_value.cols() != 1)
        throw DataError("backward expects a scalar loss node");
    if (!std::isfinite(loss_value(0, 0))) throw NumericError("non-finite loss");

    std::vector<Matrix> grad(static_cast<std::size_t>(loss) + 1);
    std::vector<std::uint8_t> touched(static_cast<std::size_t>(loss) + 1, 0);
    const auto bump = [&](NodeId id) -> Matrix& {
        auto& g = grad[static_cast<std::size_t>(id)];
        if (!touched[static_cast<std::size_t>(id)]) {
            const Matrix& v = value(id);
            g = Matrix::Zero(v.rows(), v.cols());
            touched[static_cast<std::size_t>(id)] = 1;
        }
        return g;
    };

    bump(loss)(0, 0) = scale;
    for (NodeId id = loss; id >= 0; --id) {
        if (!touched[static_cast<std::size_t>(id)]) continue;
        const Node& n = at(static_cast<NodeId>(id));
        const Matrix& g = grad[static_cast<std::size_t>(id)];
        switch (n.op) {
            case Op::Constant:
                break;
            case Op::Param: {
                auto [it, inserted] = grads.try_emplace(n.block->name);
                if (inserted)
                    it->second = g;
                else
                    it->second += g;
                break;
            }
            case Op::Column:
                bump(n.inputs[0]).col(n.a) += g.col(0);
                break;
            case Op::MatVec: {
                const Matrix& w = value(n.inputs[0]);
                const Matrix& x = value(n.inputs[1]);
                bump(n.inputs[0]).noalias() += g * x.transpose();
                bump(n.inputs[1]).noalias() += w.transpose() * g;
                break;
            }
            case Op::Add:
                bump(n.inputs[0]) += g;
                bump(n.inputs[1]) += g;
                break;
            case Op::Rows:
                bump(n.inputs[0]).block(n.a, 0, n.b, 1) += g;
                break;
            case Op::Sigmoid:
                bump(n.inputs[0]).array() += g.array() * n.value.array() * (1.0 - n.value.array());
                break;
            case Op::Tanh:
                bump(n.inputs[0]).array() += g.array() * (1.0 - n.value.array().square());
                break;
            case Op::Relu:
                bump(n.inputs[0]).array() +=
                    g.array() * (n.value.array() > 0.0).cast<double>();
                break;
            case Op::Mul:
                bump(n.inputs[0]).array() += g.array() * value(n.inputs[1]).array();
                bump(n.inputs[1]).array() += g.array() * value(n.inputs[0]).array();
                break;
            case Op::Concat: {
                Eigen::Index offset = 0;
                for (const NodeId p : n.inputs) {
                    const Eigen::Index rows = value(p).rows();
                    bump(p) += g.block(offset, 0, rows, 1);
                    offset += rows;
                }
                break;
            }
            case Op::MaxElements:
                for (Eigen::Index d = 0; d < n.value.rows(); ++d)
                    bump(n.inputs[static_cast<std::size_t>(
                        n.argmax[static_cast<std::size_t>(d)])])(d, 0) += g(d, 0);
                break;
            case Op::Normalize: {
                // d/dx (x/||x||) applied to g: (g - y (y.g)) / ||x||
                const double ydotg = n.value.col(0).dot(g.col(0));
                bump(n.inputs[0]).noalias() += (g - n.value * ydotg) / n.x;
                break;
            }
            case Op::Dot:
                bump(n.inputs[0]).noalias() += g(0, 0) * value(n.inputs[1]);
                bump(n.inputs[1]).noalias() += g(0, 0) * value(n.inputs[0]);
                break;
            case Op::ClampUnit:
                if (n.pass_through) bump(n.inputs[0])(0, 0) += g(0, 0);
                break;
            case Op::Bce:
                if (n.pass_through) {
                    const double p = n.y;
                    const double dl_ds = (p - n.x) / (2.0 * p * (1.0 - p));
                    bump(n.inputs[0])(0, 0) += g(0, 0) * dl_ds;
                }
                break;
        }
    }
}

// --- model-layer building blocks -------------------------------------------

std::vector<Tape::NodeId> embed_sequence(Tape& tape, Tape::NodeId table, const Path& path) {
    if (path.empty()) return {tape.zeros(tape.value(table).rows())};
    std::vector<Tape::NodeId> seq;
    seq.reserve(path.size());
    for (const RelationId r : path) seq.push_back(tape.column(table, r));
    return seq;
}

namespace {

// One LSTM direction; gate layout in the 4H preactivation is
// [input; forget; candidate; output].
std::vector<Tape::NodeId> lstm_direction(Tape& tape, Tape::NodeId w_x, Tape::NodeId w_h,
                                         Tape::NodeId bias,
                                         std::span<const Tape::NodeId> sequence,
                                         bool reversed) {
    const int hidden = static_cast<int>(tape.value(w_h).cols());
    Tape::NodeId h = tape.zeros(hidden);
    Tape::NodeId c = tape.zeros(hidden);
    std::vector<Tape::NodeId> outputs(sequence.size());
    for (std::size_t step = 0; step < sequence.size(); ++step) {
        const std::size_t t = reversed ? sequence.size() - 1 - step : step;
        const Tape::NodeId z =
            tape.add(tape.add(tape.matvec(w_x, sequence[t]), tape.matvec(w_h, h)), bias);
        const Tape::NodeId gate_i = tape.sigmoid(tape.rows(z, 0, hidden));
        const Tape::NodeId gate_f = tape.sigmoid(tape.rows(z, hidden, hidden));
        const Tape::NodeId cand = tape.tanh(tape.rows(z, 2 * hidden, hidden));
        const Tape::NodeId gate_o = tape.sigmoid(tape.rows(z, 3 * hidden, hidden));
        c = tape.add(tape.mul(gate_f, c), tape.mul(gate_i, cand));
        h = tape.mul(gate_o, tape.tanh(c));
        outputs[t] = h;
    }
    return outputs;
}

}  // namespace

std::vector<Tape::NodeId> bilstm_layer(Tape& tape, const ParamStore& store,
                                       const std::string& prefix,
                                       std::span<const Tape::NodeId> sequence) {
    if (sequence.empty()) throw DataError("bilstm over an empty sequence");
    const auto fwd = lstm_direction(tape, tape.param(store.block(prefix + ".fwd.w_x")),
                                    tape.param(store.block(prefix + ".fwd.w_h")),
                                    tape.param(store.block(prefix + ".fwd.b")), sequence, false);
    const auto bwd = lstm_direction(tape, tape.param(store.block(prefix + ".bwd.w_x")),
                                    tape.param(store.block(prefix + ".bwd.w_h")),
                                    tape.param(store.block(prefix + ".bwd.b")), sequence, true);
    std::vector<Tape::NodeId> out(sequence.size());
    for (std::size_t t = 0; t < sequence.size(); ++t) {
        const Tape::NodeId parts[] = {fwd[t], bwd[t]};
        out[t] = tape.concat(parts);
    }
    return out;
}

Tape::NodeId maxpool_dimwise(Tape& tape, std::span<const Tape::NodeId> sequence) {
    return tape.max_elements(sequence);
}

Tape::NodeId ffn(Tape& tape, const ParamStore& store, Tape::NodeId x) {
    const Tape::NodeId hidden = tape.relu(tape.add(
        tape.matvec(tape.param(store.block("ffn.w1")), x), tape.param(store.block("ffn.b1"))));
    return tape.add(tape.matvec(tape.param(store.block("ffn.w2")), hidden),
                    tape.param(store.block("ffn.b2")));
}

Tape::NodeId unit_normalize(Tape& tape, Tape::NodeId x) { return tape.normalize(x); }

Tape::NodeId cosine_score(Tape& tape, Tape::NodeId a, Tape::NodeId b) {
    return tape.clamp_unit(tape.dot(a, b));
}

// --- gradient checking ------------------------------------------------------

FdCheckResult finite_diff_check(const std::function<double()>& loss_fn, ParamStore& store,
                                const GradStore& analytic, int samples, Rng& rng,
                                double step) {
    const std::size_t total = store.total_parameters();
    if (total == 0) throw DataError("finite_diff_check on an empty store");
    FdCheckResult result;
    for (int s = 0; s < samples; ++s) {
        std::size_t flat = static_cast<std::size_t>(rng.next_below(total));
        ParamBlock* chosen = nullptr;
        for (auto& b : store.blocks()) {
            const auto count = static_cast<std::size_t>(b.values.size());
            if (flat < count) {
                chosen = &b;
                break;
            }
            flat -= count;
        }
        const auto cols = static_cast<std::size_t>(chosen->values.cols());
        const Eigen::Index i = static_cast<Eigen::Index>(flat / cols);
        const Eigen::Index j = static_cast<Eigen::Index>(flat % cols);

        const double saved = chosen->values(i, j);
        chosen->values(i, j) = saved + step;
        const double loss_plus = loss_fn();
        chosen->values(i, j) = saved - step;
        const double loss_minus = loss_fn();
        chosen->values(i, j) = saved;
        if (!std::isfinite(loss_plus) || !std::isfinite(loss_minus))
            throw NumericError("non-finite loss during finite differences");

        const double fd = (loss_plus - loss_minus) / (2.0 * step);
        double grad = 0.0;
        if (const auto it = analytic.find(chosen->name); it != analytic.end())
            grad = it->second(i, j);
        const double rel =
            std::abs(fd - grad) / std::max({std::abs(fd), std::abs(grad), 1e-6});
        result.max_rel_err = std::max(result.max_rel_err, rel);
        ++result.samples_checked;
    }
    return result;
}

}  // namespace siailp
