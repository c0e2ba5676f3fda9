#include "tagnn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tagnn/evaluator.hpp"

namespace tagnn {

double lr_at(std::size_t epoch, const TrainConfig& cfg) {
    const auto steps = static_cast<double>(epoch / cfg.lr_decay_interval);
    return cfg.learning_rate * std::pow(cfg.lr_decay, steps);
}

TrainResult train(const TagnnModel& model, const Dataset& data, const TrainConfig& cfg,
                  const ResumeState* resume) {
    cfg.validate();
    const ModelConfig& mc = model.config();
    if (data.train.empty()) throw ContractError("train: empty training split");

    std::vector<SampleSet> train_sets;
    for (const MotionSequence& seq : data.train)
        train_sets.push_back(make_samples(seq, mc.horizons_ms, cfg.stride, mc.window_len,
                                          mc.gaussian_sigma, mc.use_kfe));
    std::vector<WindowRef> refs = flatten_refs(train_sets);
    if (refs.empty()) throw ContractError("train: no usable windows in the training split");

    std::vector<SampleSet> val_sets;
    for (const MotionSequence& seq : data.val)
        val_sets.push_back(make_samples(seq, mc.horizons_ms, cfg.val_stride, mc.window_len,
                                        mc.gaussian_sigma, false));

    Rng rng(cfg.seed);
    TrainResult res;
    res.unit = data.train.front().meta.unit;
    res.ts_sec = data.train.front().meta.ts_sec;

    std::size_t start_epoch = 0;
    if (resume) {
        res.params = resume->params;
        // moments come from the checkpoint; the decay setting from the config
        res.adam = AdamState(res.params, AdamConfig{0.9, 0.999, 1e-8, cfg.weight_decay});
        for (std::size_t i = 0; i < res.params.count(); ++i) {
            res.adam.first_moment(i) = resume->adam.first_moment(i);
            res.adam.second_moment(i) = resume->adam.second_moment(i);
        }
        res.adam.set_steps(resume->adam.steps());
        rng.deserialize(resume->rng_state);
        start_epoch = resume->epoch;
    } else {
        res.params = model.init_params(rng);
        res.adam = AdamState(res.params, AdamConfig{0.9, 0.999, 1e-8, cfg.weight_decay});
    }
    GradStore grads(res.params);

    double best_val = std::numeric_limits<double>::infinity();
    res.best_epoch = start_epoch;

    std::vector<std::size_t> order(refs.size());

    for (std::size_t epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        const auto t_start = std::chrono::steady_clock::now();
        const double lr = lr_at(epoch, cfg);
        // rebuilt from identity each epoch so the permutation is a pure
        // function of the generator state (exact resume depends on this)
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        std::size_t usable = refs.size();
        if (cfg.deterministic && refs.size() >= cfg.batch_size)
            usable = (refs.size() / cfg.batch_size) * cfg.batch_size;

        double loss_sum = 0.0;
        std::size_t seen = 0;
        std::vector<WindowRef> chunk;
        for (std::size_t pos = 0; pos < usable; pos += cfg.batch_size) {
            const std::size_t bsz = std::min(cfg.batch_size, usable - pos);
            chunk.clear();
            for (std::size_t k = 0; k < bsz; ++k) chunk.push_back(refs[order[pos + k]]);
            Batch batch = gather_batch(data.train, train_sets, chunk);

            DropoutPlan plan;
            if (mc.dropout_rate > 0) plan = model.make_dropout_plan(bsz, rng);
            grads.zero();
            const double loss =
                model.loss(batch, res.params, &grads, plan.empty() ? nullptr : &plan);
            if (!std::isfinite(loss)) {
                std::string culprit = "(all gradients finite)";
                for (std::size_t p = 0; p < grads.count() && culprit[0] == '('; ++p)
                    for (std::size_t k = 0; k < grads[p].numel(); ++k)
                        if (!std::isfinite(grads[p][k])) {
                            culprit = "first non-finite gradient in '" + res.params.name(p) + "'";
                            break;
                        }
                throw TrainingError("non-finite loss in epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(pos / cfg.batch_size) + "; " +
                                    culprit);
            }
            res.adam.step(res.params, grads, lr);
            loss_sum += loss * static_cast<double>(bsz);
            seen += bsz;
        }

        EpochLog row;
        row.epoch = epoch;
        row.lr = lr;
        row.train_loss = seen ? loss_sum / static_cast<double>(seen) : 0.0;
        if (!data.val.empty()) {
            row.val_mae = per_horizon_mae(model, res.params, data.val, val_sets);
            const double mean_mae =
                std::accumulate(row.val_mae.begin(), row.val_mae.end(), 0.0) /
                static_cast<double>(row.val_mae.size());
            if (mean_mae < best_val) {
                best_val = mean_mae;
                res.best_params = res.params;
                res.best_epoch = epoch;
            }
        }
        row.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        res.log.push_back(std::move(row));
    }
    res.epochs_done = cfg.epochs;
    if (data.val.empty() || res.best_params.count() == 0) {
        res.best_params = res.params;
        res.best_epoch = cfg.epochs ? cfg.epochs - 1 : 0;
    }
    res.rng_state = rng.serialize();
    return res;
}

Checkpoint make_resume_checkpoint(const TagnnModel& model, const TrainResult& result) {
    Checkpoint ckpt;
    ckpt.cfg = model.config();
    ckpt.params = result.params;
    for (std::size_t i = 0; i < result.params.count(); ++i) {
        ckpt.extra.add("adam.m." + result.params.name(i), result.adam.first_moment(i));
        ckpt.extra.add("adam.v." + result.params.name(i), result.adam.second_moment(i));
    }
    ckpt.meta["kind"] = "resume";
    ckpt.meta["unit"] = unit_name(result.unit);
    ckpt.meta["ts_sec"] = format_double(result.ts_sec);
    ckpt.meta["epoch"] = std::to_string(result.epochs_done);
    ckpt.meta["adam_step"] = std::to_string(result.adam.steps());
    ckpt.meta["rng"] = result.rng_state;
    return ckpt;
}

ResumeState resume_from_checkpoint(const Checkpoint& ckpt) {
    ResumeState rs;
    rs.params = ckpt.params;
    rs.adam = AdamState(rs.params, AdamConfig{});
    for (std::size_t i = 0; i < rs.params.count(); ++i) {
        const std::string& name = rs.params.name(i);
        if (!ckpt.extra.contains("adam.m." + name))
            throw IoError("checkpoint has no optimizer state for '" + name +
                          "' (not a resume checkpoint?)");
        rs.adam.first_moment(i) = ckpt.extra.at("adam.m." + name);
        rs.adam.second_moment(i) = ckpt.extra.at("adam.v." + name);
    }
    auto need = [&](const char* key) {
        auto it = ckpt.meta.find(key);
        if (it == ckpt.meta.end())
            throw IoError(std::string("checkpoint meta missing '") + key + "'");
        return it->second;
    };
    rs.adam.set_steps(std::stoull(need("adam_step")));
    rs.epoch = std::stoull(need("epoch"));
    rs.rng_state = need("rng");
    return rs;
}

Checkpoint make_export_checkpoint(const TagnnModel& model, const TrainResult& result) {
    Checkpoint ckpt;
    ckpt.cfg = model.config();
    ckpt.params = result.best_params;
    ckpt.meta["kind"] = "export";
    ckpt.meta["unit"] = unit_name(result.unit);
    ckpt.meta["ts_sec"] = format_double(result.ts_sec);
    ckpt.meta["best_epoch"] = std::to_string(result.best_epoch);
    return ckpt;
}

void write_epoch_log_csv(const std::string& path, const std::vector<EpochLog>& log,
                         const std::vector<double>& horizons_ms) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write epoch log '" + path + "'");
    f << "epoch,lr,train_loss";
    for (double t : horizons_ms) f << ",val_mae_t" << format_double(t);
    f << ",seconds\n";
    for (const EpochLog& row : log) {
        f << row.epoch << ',' << format_double(row.lr) << ',' << format_double(row.train_loss);
        if (row.val_mae.empty())
            for (std::size_t i = 0; i < horizons_ms.size(); ++i) f << ',';
        else
            for (double v : row.val_mae) f << ',' << format_double(v);
        f << ',' << format_double(row.seconds) << "\n";
    }
}

}  // namespace tagnn
