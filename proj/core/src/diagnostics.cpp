#include "tagnn/diagnostics.hpp"

#include <cmath>

#include "tagnn/autodiff.hpp"
#include "tagnn/rng.hpp"

namespace tagnn {

ModelConfig reduced_model_config(std::size_t hidden) {
    ModelConfig cfg;
    cfg.extractor_hidden = hidden;
    cfg.encoder_hidden = hidden;
    cfg.encoder_head_widths = {2 * hidden, 4 * hidden, hidden, 1};
    cfg.decoder_widths = {hidden, 2 * hidden, hidden, 1};
    cfg.dropout_rate = 0.0;
    cfg.horizons_ms = {40, 200};
    cfg.horizon_weights = {1.0, 0.7};
    return cfg;
}

HandSkeleton reduced_skeleton() {
    return HandSkeleton::custom({"A", "B"}, {{"A", "B"}});
}

Batch make_reduced_batch(std::size_t b, std::size_t window_len,
                         const std::vector<double>& horizons_ms, std::uint64_t seed) {
    const std::size_t c = 6;
    const double ts = 0.01;
    Rng rng(seed);

    Batch batch;
    batch.b = b;
    batch.c = c;
    batch.win = window_len;
    batch.ts_sec = ts;
    for (double t : horizons_ms) batch.t_sec.push_back(t / 1000.0);
    const std::size_t nt = batch.t_sec.size();
    batch.windows.resize(c * b * window_len);
    batch.theta0.resize(b * c);
    batch.targets.resize(nt * b * c);
    batch.gv.resize(b * c);
    batch.ga.resize(b * c);

    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t s = 0; s < b; ++s) {
            const double amp = rng.uniform(1.5, 4.0);
            const double freq = rng.uniform(0.3, 0.9);
            const double phase = rng.uniform(0.0, 2.0 * M_PI);
            const double w = 2.0 * M_PI * freq;
            auto theta = [&](double t) { return amp * std::sin(w * t + phase); };
            const double t0 = static_cast<double>(window_len - 1) * ts;
            for (std::size_t k = 0; k < window_len; ++k)
                batch.windows[(ch * b + s) * window_len + k] = theta(static_cast<double>(k) * ts);
            batch.theta0[s * c + ch] = theta(t0);
            for (std::size_t kt = 0; kt < nt; ++kt)
                batch.targets[(kt * b + s) * c + ch] = theta(t0 + batch.t_sec[kt]);
            batch.gv[s * c + ch] = amp * w * std::cos(w * t0 + phase);
            batch.ga[s * c + ch] = -amp * w * w * std::sin(w * t0 + phase);
        }
    }
    return batch;
}

GradCheckResult composed_loss_gradcheck(std::size_t hidden, std::size_t batch_size,
                                        std::uint64_t seed, double eps,
                                        std::size_t max_coords) {
    const ModelConfig cfg = reduced_model_config(hidden);
    TagnnModel model(cfg, reduced_skeleton());
    Batch batch = make_reduced_batch(batch_size, cfg.window_len, cfg.horizons_ms, seed);

    Rng rng(seed + 1);
    ParamSet params = model.init_params(rng);

    auto loss_fn = [&](const ParamSet& p) { return model.loss(batch, p, nullptr, nullptr); };
    auto grad_fn = [&](const ParamSet& p, GradStore& g) { model.loss(batch, p, &g, nullptr); };
    return gradient_check(loss_fn, grad_fn, params, eps, max_coords, seed + 2);
}

GradCheckResult quadratic_bowl_gradcheck(std::size_t dims, std::uint64_t seed) {
    Rng rng(seed);
    ParamSet params;
    Array x({dims});
    Array center({dims});
    for (std::size_t i = 0; i < dims; ++i) {
        x[i] = rng.uniform(-2.0, 2.0);
        center[i] = rng.uniform(-1.0, 1.0);
    }
    params.add("x", std::move(x));

    auto loss_fn = [&](const ParamSet& p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < dims; ++i) {
            const double d = p.at("x")[i] - center[i];
            acc += d * d;
        }
        return acc;
    };
    auto grad_fn = [&](const ParamSet& p, GradStore& g) {
        Tape t;
        Value leaf = t.leaf(p.at("x"));
        Value c = t.constant(center);
        Value diff = t.sub(leaf, c);
        Value loss = t.dot(diff, diff);
        t.backward(loss);
        const Array& grad = t.grad(leaf);
        for (std::size_t i = 0; i < dims; ++i) g[0][i] += grad[i];
    };
    // central differences are exact on quadratics for any step, so a wide
    // step only suppresses rounding noise
    return gradient_check(loss_fn, grad_fn, params, 1e-3, 10000, seed + 1);
}

}  // namespace tagnn
