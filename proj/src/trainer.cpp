#include "siailp/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "siailp/errors.hpp"

namespace siailp {

void TrainConfig::validate() const {
    if (learning_rate <= 0 || batch_size < 1 || epochs < 1 || num_paths < 1 || dim < 2 ||
        hidden < 1 || beta1 <= 0 || beta1 >= 1 || beta2 <= 0 || beta2 >= 1 || epsilon <= 0)
        throw UsageError("train config fields must be positive (and betas in (0,1))");
    if (dim != 2 * hidden) throw UsageError("train config requires dim == 2 * hidden");
}

std::vector<TrainSample> make_connection_samples(const KnowledgeGraph& graph,
                                                 const PathCache& cache, int num_paths,
                                                 Rng& rng, SampleStats* stats) {
    const std::int32_t num_initial = graph.num_initial_relations();
    std::vector<TrainSample> samples;
    SampleStats local;
    std::vector<RelationId> negative_pool;
    for (const Triple& t : graph.triples()) {
        if (!graph.relations().is_initial(t.relation)) continue;
        const std::vector<Path>* paths = cache.find(t.source, t.target);
        if (paths == nullptr || paths->empty()) {
            ++local.skipped;
            continue;
        }
        // corrupted relation: uniform over initial relations not linking (s, t)
        negative_pool.clear();
        const auto linking = graph.relations_between(t.source, t.target);
        for (RelationId r = 0; r < num_initial; ++r) {
            bool known = false;
            for (const RelationId l : linking)
                if (l == r) { known = true; break; }
            if (!known) negative_pool.push_back(r);
        }
        if (negative_pool.empty()) {
            ++local.skipped;
            continue;
        }

        TrainSample positive;
        positive.paths = draw_path_slots(*paths, num_paths, rng);
        positive.relation = t.relation;
        positive.label = 1.0;
        positive.source = t.source;
        positive.target = t.target;

        TrainSample negative = positive;
        negative.relation = negative_pool[rng.next_below(negative_pool.size())];
        negative.label = 0.0;

        samples.push_back(std::move(positive));
        samples.push_back(std::move(negative));
        local.emitted += 2;
    }
    if (stats) *stats = local;
    return samples;
}

std::vector<TrainSample> make_subgraph_samples(const KnowledgeGraph& graph,
                                               const PathCache& cache, int num_paths, Rng& rng,
                                               SampleStats* stats) {
    const std::int32_t num_initial = graph.num_initial_relations();
    const auto num_entities = static_cast<std::uint64_t>(graph.num_entities());
    std::vector<TrainSample> samples;
    SampleStats local;
    static const std::vector<Path> kNoPaths;
    const auto out_paths = [&](EntityId e) -> const std::vector<Path>& {
        const std::vector<Path>* p = cache.find_flat(e);
        return p == nullptr ? kNoPaths : *p;
    };
    const auto emit = [&](EntityId s, RelationId r, EntityId t, double label) {
        const std::vector<Path>& src = out_paths(s);
        const std::vector<Path>& tgt = out_paths(t);
        if (src.empty() || tgt.empty()) {
            ++local.skipped;
            return;
        }
        TrainSample sample;
        sample.source_out = draw_path_slots(src, num_paths, rng);
        sample.target_out = draw_path_slots(tgt, num_paths, rng);
        sample.relation = r;
        sample.label = label;
        sample.source = s;
        sample.target = t;
        samples.push_back(std::move(sample));
        ++local.emitted;
    };

    for (const Triple& t : graph.triples()) {
        if (!graph.relations().is_initial(t.relation)) continue;
        const auto s_corrupt = static_cast<EntityId>(rng.next_below(num_entities));
        const auto t_corrupt = static_cast<EntityId>(rng.next_below(num_entities));
        RelationId r_corrupt = t.relation;
        if (num_initial > 1) {
            const auto draw = static_cast<RelationId>(
                rng.next_below(static_cast<std::uint64_t>(num_initial - 1)));
            r_corrupt = draw >= t.relation ? draw + 1 : draw;
        }
        emit(t.source, t.relation, t.target, 1.0);
        if (num_initial > 1) emit(t.source, r_corrupt, t.target, 0.0);
        emit(t.source, t.relation, t_corrupt, 0.0);
        emit(s_corrupt, t.relation, t.target, 0.0);
    }
    if (stats) *stats = local;
    return samples;
}

Tape::NodeId sample_loss(Tape& tape, const Model& model, const TrainSample& sample) {
    const Tape::NodeId rep =
        model.config.kind == ModelKind::Connection
            ? connection_representation(tape, model, sample.paths)
            : subgraph_representation(tape, model, sample.source_out, sample.target_out);
    const Tape::NodeId cos = relation_cosine(tape, model, rep, sample.relation);
    return tape.bce(cos, sample.label);
}

std::pair<double, GradStore> batch_gradients(const Model& model,
                                             std::span<const TrainSample> batch) {
    if (batch.empty()) throw UsageError("empty batch");
    GradStore grads;
    double loss_sum = 0.0;
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (const TrainSample& sample : batch) {
        Tape tape;
        const Tape::NodeId loss = sample_loss(tape, model, sample);
        loss_sum += tape.scalar(loss);
        tape.backward(loss, grads, scale);
    }
    return {loss_sum * scale, grads};
}

void adam_step(ParamStore& store, const GradStore& grads, AdamState& state, double lr,
               double beta1, double beta2, double epsilon) {
    for (const auto& [name, grad] : grads) {
        ParamBlock& block = store.block(name);
        if (grad.rows() != block.values.rows() || grad.cols() != block.values.cols())
            throw DataError("gradient shape mismatch for block " + name);
        if (!grad.allFinite()) throw NumericError("non-finite gradient in block " + name);
        if (grad.isZero(0.0)) continue;

        AdamMoments& mom = state[name];
        if (mom.step == 0) {
            mom.m = Matrix::Zero(grad.rows(), grad.cols());
            mom.v = Matrix::Zero(grad.rows(), grad.cols());
        }
        ++mom.step;
        mom.m = beta1 * mom.m + (1.0 - beta1) * grad;
        mom.v = beta2 * mom.v + (1.0 - beta2) * grad.cwiseProduct(grad);
        const double m_correction = 1.0 - std::pow(beta1, static_cast<double>(mom.step));
        const double v_correction = 1.0 - std::pow(beta2, static_cast<double>(mom.step));
        block.values.array() -= lr * (mom.m.array() / m_correction) /
                                ((mom.v.array() / v_correction).sqrt() + epsilon);
    }
}

std::string format_epoch_log(const EpochLog& log) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "epoch=%d samples=%lld mean_loss=%.17g", log.epoch,
                  static_cast<long long>(log.samples), log.mean_loss);
    return buf;
}

TrainResult train(ModelKind kind, const KnowledgeGraph& graph, const PathCache& cache,
                  const TrainConfig& config,
                  const std::optional<std::filesystem::path>& checkpoint_dir,
                  std::ostream* progress) {
    config.validate();
    const auto expected_mode =
        kind == ModelKind::Connection ? PathCache::Mode::Connection : PathCache::Mode::Subgraph;
    if (cache.mode != expected_mode)
        throw DataError("path cache mode does not match the model kind");
    const int expanded = 2 * graph.num_initial_relations();
    for (const auto& [key, paths] : cache.entries)
        for (const Path& p : paths)
            for (const RelationId r : p)
                if (r < 0 || r >= expanded)
                    throw DataError("path cache relation ids exceed the graph vocabulary");

    ModelConfig model_config;
    model_config.kind = kind;
    model_config.dim = config.dim;
    model_config.hidden = config.hidden;
    model_config.num_initial_relations = graph.num_initial_relations();
    model_config.num_paths = config.num_paths;
    Rng init_rng(derive_stream(config.seed, "init", kind == ModelKind::Connection ? 0 : 1));
    TrainResult result{Model::init(model_config, init_rng), {}};

    AdamState adam;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng sample_rng(derive_stream(config.seed, "train.samples",
                                     static_cast<std::uint64_t>(epoch)));
        SampleStats stats;
        std::vector<TrainSample> samples =
            kind == ModelKind::Connection
                ? make_connection_samples(graph, cache, config.num_paths, sample_rng, &stats)
                : make_subgraph_samples(graph, cache, config.num_paths, sample_rng, &stats);
        Rng shuffle_rng(derive_stream(config.seed, "train.shuffle",
                                      static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(samples);

        double loss_sum = 0.0;
        const auto total = static_cast<std::int64_t>(samples.size());
        for (std::size_t begin = 0, batch_index = 0; begin < samples.size();
             begin += static_cast<std::size_t>(config.batch_size), ++batch_index) {
            const std::size_t count =
                std::min(static_cast<std::size_t>(config.batch_size), samples.size() - begin);
            const std::span<const TrainSample> batch(samples.data() + begin, count);
            double batch_loss = 0.0;
            GradStore grads;
            try {
                std::tie(batch_loss, grads) = batch_gradients(result.model, batch);
            } catch (const NumericError& e) {
                const TrainSample& first = batch.front();
                throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index) + ", first sample " +
                                   std::to_string(first.source) + "-" +
                                   std::to_string(first.relation) + "-" +
                                   std::to_string(first.target) + ")");
            }
            if (!std::isfinite(batch_loss))
                throw NumericError("non-finite batch loss (epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index) + ")");
            loss_sum += batch_loss * static_cast<double>(count);
            adam_step(result.model.store, grads, adam, config.learning_rate, config.beta1,
                      config.beta2, config.epsilon);
        }

        EpochLog log{epoch, total, total > 0 ? loss_sum / static_cast<double>(total) : 0.0};
        result.log.push_back(log);
        if (progress) (*progress) << format_epoch_log(log) << '\n' << std::flush;
        if (checkpoint_dir) {
            const std::string stem = std::string(model_kind_name(kind));
            result.model.save(*checkpoint_dir / (stem + "-epoch" + std::to_string(epoch) + ".ckpt"));
        }
    }
    if (checkpoint_dir) {
        const std::string stem = std::string(model_kind_name(kind));
        result.model.save(*checkpoint_dir / (stem + "-final.ckpt"));
    }
    return result;
}

}  // namespace siailp
