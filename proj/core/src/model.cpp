#include "tagnn/model.hpp"

#include <cmath>
#include <cstring>

#include "tagnn/parallel.hpp"

namespace tagnn {

namespace {

std::string ch_prefix(std::size_t c) { return "ch" + std::to_string(c) + "."; }

std::size_t lstm_param_count(std::size_t in, std::size_t hidden) {
    return (in + hidden) * 4 * hidden + 4 * hidden;
}

}  // namespace

TagnnModel::TagnnModel(ModelConfig cfg) : TagnnModel(std::move(cfg), HandSkeleton{}) {}

TagnnModel::TagnnModel(ModelConfig cfg, HandSkeleton skeleton) : cfg_(std::move(cfg)) {
    cfg_.validate();
    skel_ = skeleton.joint_count() ? std::move(skeleton) : build_skeleton(cfg_.layout);
    adj_ = cfg_.raw_adjacency ? raw_adjacency(skel_) : normalized_adjacency(skel_);
}

std::vector<std::string> TagnnModel::param_names() const {
    std::vector<std::string> names;
    const std::size_t c = channels();
    for (std::size_t ch = 0; ch < c; ++ch) {
        const std::string p = ch_prefix(ch);
        if (cfg_.use_kfe) {
            for (const char* br : {"kfe.v.", "kfe.a."}) {
                names.push_back(p + br + "lstm.w");
                names.push_back(p + br + "lstm.b");
                names.push_back(p + br + "head.w");
                names.push_back(p + br + "head.b");
            }
        }
        for (const char* br : {"enc.v.", "enc.a."}) {
            names.push_back(p + br + "lstm.w");
            names.push_back(p + br + "lstm.b");
        }
        for (std::size_t k = 0; k < cfg_.encoder_head_widths.size(); ++k) {
            names.push_back(p + "enc.ffn" + std::to_string(k) + ".w");
            names.push_back(p + "enc.ffn" + std::to_string(k) + ".b");
        }
    }
    if (cfg_.use_gcn) {
        for (std::size_t l = 0; l < cfg_.decoder_widths.size(); ++l)
            names.push_back("dec.w" + std::to_string(l));
    }
    return names;
}

ParamSet TagnnModel::init_params(Rng& rng) const {
    ParamSet ps;
    auto weight = [&](Shape shape) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(shape[0]));
        Array a(std::move(shape));
        for (double& x : a.vec()) x = rng.uniform(-bound, bound);
        return a;
    };
    auto add_lstm = [&](const std::string& name, std::size_t in, std::size_t h) {
        ps.add(name + ".w", weight({in + h, 4 * h}));
        ps.add(name + ".b", Array({4 * h}));
    };

    const std::size_t c = channels();
    const std::size_t he = cfg_.extractor_hidden;
    const std::size_t hn = cfg_.encoder_hidden;
    for (std::size_t ch = 0; ch < c; ++ch) {
        const std::string p = ch_prefix(ch);
        if (cfg_.use_kfe) {
            for (const char* br : {"kfe.v", "kfe.a"}) {
                add_lstm(p + br + ".lstm", 1, he);
                ps.add(p + br + ".head.w", weight({he, 1}));
                ps.add(p + br + ".head.b", Array({1}));
            }
        }
        add_lstm(p + "enc.v.lstm", 1, hn);
        add_lstm(p + "enc.a.lstm", 1, hn);
        std::size_t in = 2 * hn;
        for (std::size_t k = 0; k < cfg_.encoder_head_widths.size(); ++k) {
            const std::size_t out = cfg_.encoder_head_widths[k];
            ps.add(p + "enc.ffn" + std::to_string(k) + ".w", weight({in, out}));
            ps.add(p + "enc.ffn" + std::to_string(k) + ".b", Array({out}));
            in = out;
        }
    }
    if (cfg_.use_gcn) {
        std::size_t in = 3;
        for (std::size_t l = 0; l < cfg_.decoder_widths.size(); ++l) {
            const std::size_t out = cfg_.decoder_widths[l];
            ps.add("dec.w" + std::to_string(l), weight({in, out}));
            in = out;
        }
    }
    return ps;
}

ParameterCount TagnnModel::parameter_count() const {
    ParameterCount pc;
    pc.channels = channels();
    const std::size_t he = cfg_.extractor_hidden;
    const std::size_t hn = cfg_.encoder_hidden;
    if (cfg_.use_kfe) pc.extractor_per_channel = 2 * lstm_param_count(1, he) + 2 * (he + 1);
    pc.encoder_per_channel = 2 * lstm_param_count(1, hn);
    std::size_t in = 2 * hn;
    for (std::size_t out : cfg_.encoder_head_widths) {
        pc.encoder_per_channel += in * out + out;
        in = out;
    }
    if (cfg_.use_gcn) {
        in = 3;
        for (std::size_t out : cfg_.decoder_widths) {
            pc.decoder += in * out;
            in = out;
        }
    }
    pc.total = pc.channels * (pc.extractor_per_channel + pc.encoder_per_channel) + pc.decoder;
    return pc;
}

Value TagnnModel::param_leaf(Tape& t, const ParamSet& params, const std::string& name,
                             bool with_grad,
                             std::vector<std::pair<std::size_t, Value>>* leaves) const {
    const std::size_t idx = params.index_of(name);
    Value v = t.leaf(params.value(idx), with_grad);
    if (leaves) leaves->push_back({idx, v});
    return v;
}

TagnnModel::ChannelNodes TagnnModel::forward_channel(
    Tape& t, const Batch& batch, std::size_t ch, const ParamSet& params, bool with_grad,
    const DropoutPlan* plan, std::vector<std::pair<std::size_t, Value>>* leaves) const {
    const std::size_t b = batch.b;
    const std::size_t win = batch.win;
    const std::size_t nt = batch.t_sec.size();
    const std::size_t rows = nt * b;
    const std::string p = ch_prefix(ch);

    // causal filtering and derivative approximations, outside the graph
    Array v_arr({b, win}), a_arr({b, win});
    {
        for (std::size_t s = 0; s < b; ++s) {
            const double* w = &batch.windows[(ch * b + s) * win];
            std::vector<double> filt = moving_average({w, win}, cfg_.ma_window);
            std::vector<double> v = finite_difference(filt, batch.ts_sec, 1);
            std::vector<double> a = finite_difference(filt, batch.ts_sec, 2);
            std::memcpy(v_arr.data() + s * win, v.data(), win * sizeof(double));
            std::memcpy(a_arr.data() + s * win, a.data(), win * sizeof(double));
        }
    }

    ChannelNodes out;
    out.has_aux = cfg_.use_kfe;

    // per-branch corrected derivative sequences, one Value [b,1] per step
    auto correct_branch = [&](const Array& approx, const char* br) {
        Value approx_v = t.constant(approx);
        std::vector<Value> steps(win);
        for (std::size_t k = 0; k < win; ++k) steps[k] = t.slice_cols(approx_v, k, 1);
        if (!cfg_.use_kfe) return steps;
        Value w = param_leaf(t, params, p + br + std::string(".lstm.w"), with_grad, leaves);
        Value bb = param_leaf(t, params, p + br + std::string(".lstm.b"), with_grad, leaves);
        Value hw = param_leaf(t, params, p + br + std::string(".head.w"), with_grad, leaves);
        Value hb = param_leaf(t, params, p + br + std::string(".head.b"), with_grad, leaves);
        std::vector<Value> hs = lstm_sequence(t, steps, w, bb, cfg_.extractor_hidden);
        std::vector<Value> corrected(win);
        for (std::size_t k = 0; k < win; ++k)
            corrected[k] = t.add(steps[k], t.affine(hs[k], hw, hb));
        return corrected;
    };

    std::vector<Value> omega = correct_branch(v_arr, "kfe.v");
    std::vector<Value> alpha = correct_branch(a_arr, "kfe.a");
    out.omega0 = omega.back();
    out.alpha0 = alpha.back();

    // horizon-conditioned scaling: omega*t and alpha*t^2 per tiled row block
    Array tcol({rows, 1}), t2col({rows, 1});
    for (std::size_t r = 0; r < rows; ++r) {
        const double ts = batch.t_sec[r / b];
        if (ts < 0) throw ContractError("encoder: negative prediction horizon");
        tcol[r] = ts;
        t2col[r] = ts * ts;
    }
    Value tc = t.constant(std::move(tcol));
    Value t2c = t.constant(std::move(t2col));

    std::vector<Value> enc_v(win), enc_a(win);
    for (std::size_t k = 0; k < win; ++k) {
        enc_v[k] = t.mul(t.tile_rows(omega[k], nt), tc);
        enc_a[k] = t.mul(t.tile_rows(alpha[k], nt), t2c);
    }

    Value wv = param_leaf(t, params, p + "enc.v.lstm.w", with_grad, leaves);
    Value bv = param_leaf(t, params, p + "enc.v.lstm.b", with_grad, leaves);
    Value wa = param_leaf(t, params, p + "enc.a.lstm.w", with_grad, leaves);
    Value ba = param_leaf(t, params, p + "enc.a.lstm.b", with_grad, leaves);
    Value hv = lstm_sequence(t, enc_v, wv, bv, cfg_.encoder_hidden).back();
    Value ha = lstm_sequence(t, enc_a, wa, ba, cfg_.encoder_hidden).back();
    const Value cat_parts[] = {hv, ha};
    Value x = t.concat_cols(cat_parts);

    const std::size_t nffn = cfg_.encoder_head_widths.size();
    for (std::size_t k = 0; k < nffn; ++k) {
        Value w = param_leaf(t, params, p + "enc.ffn" + std::to_string(k) + ".w", with_grad,
                             leaves);
        Value bb = param_leaf(t, params, p + "enc.ffn" + std::to_string(k) + ".b", with_grad,
                              leaves);
        x = t.affine(x, w, bb);
        if (k + 1 < nffn) {
            x = t.tanh_(x);
            if (plan && !plan->empty()) x = t.mul(x, t.constant(plan->masks[ch][k]));
        }
    }
    out.delta = x;
    return out;
}

Value TagnnModel::decode(Tape& t, Value theta_init2d, const ParamSet& params, bool with_grad,
                         bool linear_test_mode,
                         std::vector<std::pair<std::size_t, Value>>* leaves) const {
    if (!cfg_.use_gcn) return theta_init2d;
    const std::size_t rows = t.value(theta_init2d).extent(0);
    const std::size_t j = skel_.joint_count();
    Value adj = t.constant(adj_);

    const std::size_t nl = cfg_.decoder_widths.size();
    std::vector<Value> ws(nl);
    for (std::size_t l = 0; l < nl; ++l)
        ws[l] = param_leaf(t, params, "dec.w" + std::to_string(l), with_grad, leaves);

    // One propagation pass per axis with shared weights; each pass sees the
    // joint's axis triple rotated so its own axis leads, and contributes the
    // single output feature for that axis.
    Value flat = t.reshape(theta_init2d, {rows * j, 3});
    std::vector<Value> outs(3);
    for (std::size_t axis = 0; axis < 3; ++axis) {
        Value xa = flat;
        if (axis != 0) {
            const Value parts[] = {t.slice_cols(flat, axis, 3 - axis),
                                   t.slice_cols(flat, 0, axis)};
            xa = t.concat_cols(parts);
        }
        Value x = t.reshape(xa, {rows, j, 3});
        std::size_t fin = 3;
        for (std::size_t l = 0; l < nl; ++l) {
            const std::size_t fout = cfg_.decoder_widths[l];
            x = t.adj_prop(x, adj);
            x = t.matmul(t.reshape(x, {rows * j, fin}), ws[l]);
            if (l + 1 < nl && !linear_test_mode) x = t.tanh_(x);
            x = t.reshape(x, {rows, j, fout});
            fin = fout;
        }
        outs[axis] = t.reshape(x, {rows * j, 1});
    }
    Value joined = t.concat_cols(outs);  // [rows*j, 3], channel order restored
    return t.reshape(joined, {rows, 3 * j});
}

DropoutPlan TagnnModel::make_dropout_plan(std::size_t b, Rng& rng) const {
    DropoutPlan plan;
    if (cfg_.dropout_rate <= 0.0) return plan;
    const std::size_t rows = cfg_.horizons_ms.size() * b;
    const std::size_t c = channels();
    plan.masks.resize(c);
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t k = 0; k + 1 < cfg_.encoder_head_widths.size(); ++k)
            plan.masks[ch].push_back(
                dropout_mask(rng, {rows, cfg_.encoder_head_widths[k]}, cfg_.dropout_rate));
    }
    return plan;
}

double TagnnModel::loss(const Batch& batch, const ParamSet& params, GradStore* grads,
                        const DropoutPlan* plan) const {
    const std::size_t c = channels();
    const std::size_t nt = cfg_.horizons_ms.size();
    const std::size_t b = batch.b;
    if (batch.c != c)
        throw ContractError("loss: batch has " + std::to_string(batch.c) + " channels, model " +
                            std::to_string(c));
    if (batch.win != cfg_.window_len)
        throw ContractError("loss: window length " + std::to_string(batch.win) + ", expected " +
                            std::to_string(cfg_.window_len));
    if (batch.t_sec.size() != nt || batch.targets.size() != nt * b * c)
        throw ContractError("loss: missing horizon targets (" +
                            std::to_string(batch.t_sec.size()) + " horizons, " +
                            std::to_string(batch.targets.size()) + " target values)");
    if (cfg_.use_kfe && (batch.gv.size() != b * c || batch.ga.size() != b * c))
        throw ContractError("loss: missing derivative oracle targets");
    const std::size_t rows = nt * b;

    // phase 1: channel forwards for encoder outputs and auxiliary terms
    std::vector<double> delta(c * rows);
    std::vector<double> aux(c, 0.0);
    parallel_for(c, [&](std::size_t ch) {
        Tape t;
        ChannelNodes cn = forward_channel(t, batch, ch, params, false, plan, nullptr);
        const Array& d = t.value(cn.delta);
        std::memcpy(delta.data() + ch * rows, d.data(), rows * sizeof(double));
        if (cn.has_aux) {
            const Array& w0 = t.value(cn.omega0);
            const Array& a0 = t.value(cn.alpha0);
            double sv = 0.0, sa = 0.0;
            for (std::size_t s = 0; s < b; ++s) {
                const double dv = batch.gv[s * c + ch] - w0[s];
                const double da = batch.ga[s * c + ch] - a0[s];
                sv += dv * dv;
                sa += da * da;
            }
            aux[ch] = (sv + sa) / static_cast<double>(b);
        }
    });

    // phase 2: graph decoder and horizon-weighted pose terms
    Array theta_init({rows, c});
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t s = r % b;
        double* dst = theta_init.data() + r * c;
        const double* t0 = &batch.theta0[s * c];
        for (std::size_t ch = 0; ch < c; ++ch) dst[ch] = t0[ch] + delta[ch * rows + r];
    }

    Tape dt;
    std::vector<std::pair<std::size_t, Value>> dec_leaves;
    Value ti = dt.leaf(std::move(theta_init), grads != nullptr);
    Value final2d = decode(dt, ti, params, grads != nullptr, false,
                           grads ? &dec_leaves : nullptr);
    Value pose;
    for (std::size_t k = 0; k < nt; ++k) {
        Value pred = dt.slice_rows(final2d, k * b, b);
        Value target = dt.constant(Array({b, c}, {batch.targets.begin() + k * b * c,
                                                  batch.targets.begin() + (k + 1) * b * c}));
        Value term = dt.scale(dt.mse(pred, target), cfg_.horizon_weights[k]);
        pose = k == 0 ? term : dt.add(pose, term);
    }
    double total = dt.value(pose)[0];
    for (std::size_t ch = 0; ch < c; ++ch) total += aux[ch];

    if (!grads) return total;

    dt.backward(pose);
    for (const auto& [idx, v] : dec_leaves) {
        if (!dt.has_grad(v)) continue;
        const Array& g = dt.grad(v);
        double* dst = (*grads)[idx].data();
        for (std::size_t i = 0; i < g.numel(); ++i) dst[i] += g[i];
    }
    const bool init_has_grad = dt.has_grad(ti);
    const Array* ginit = init_has_grad ? &dt.grad(ti) : nullptr;

    // phase 3: rebuild each channel and pull the decoder seed through it
    parallel_for(c, [&](std::size_t ch) {
        Tape t;
        std::vector<std::pair<std::size_t, Value>> leaves;
        ChannelNodes cn = forward_channel(t, batch, ch, params, true, plan, &leaves);
        Array seed({rows, 1});
        if (ginit)
            for (std::size_t r = 0; r < rows; ++r) seed[r] = ginit->data()[r * c + ch];
        Value objective = t.dot(cn.delta, t.constant(std::move(seed)));
        if (cn.has_aux) {
            Array gv({b, 1}), ga({b, 1});
            for (std::size_t s = 0; s < b; ++s) {
                gv[s] = batch.gv[s * c + ch];
                ga[s] = batch.ga[s * c + ch];
            }
            objective = t.add(objective, t.add(t.mse(cn.omega0, t.constant(std::move(gv))),
                                               t.mse(cn.alpha0, t.constant(std::move(ga)))));
        }
        t.backward(objective);
        for (const auto& [idx, v] : leaves) {
            if (!t.has_grad(v)) continue;
            const Array& g = t.grad(v);
            double* dst = (*grads)[idx].data();
            for (std::size_t i = 0; i < g.numel(); ++i) dst[i] += g[i];
        }
    });
    return total;
}

std::vector<double> TagnnModel::predict_batch(const Batch& batch, const ParamSet& params) const {
    const std::size_t c = channels();
    const std::size_t nt = batch.t_sec.size();
    const std::size_t b = batch.b;
    if (batch.c != c || batch.win != cfg_.window_len)
        throw ContractError("predict: batch shape [" + std::to_string(batch.b) + "," +
                            std::to_string(batch.c) + "," + std::to_string(batch.win) +
                            "] incompatible with model");
    const std::size_t rows = nt * b;

    std::vector<double> delta(c * rows);
    parallel_for(c, [&](std::size_t ch) {
        Tape t;
        ChannelNodes cn = forward_channel(t, batch, ch, params, false, nullptr, nullptr);
        std::memcpy(delta.data() + ch * rows, t.value(cn.delta).data(), rows * sizeof(double));
    });

    Array theta_init({rows, c});
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t s = r % b;
        double* dst = theta_init.data() + r * c;
        for (std::size_t ch = 0; ch < c; ++ch)
            dst[ch] = batch.theta0[s * c + ch] + delta[ch * rows + r];
    }
    Tape dt;
    Value ti = dt.leaf(std::move(theta_init), false);
    Value out = decode(dt, ti, params, false, false, nullptr);
    return dt.value(out).vec();
}

std::vector<double> TagnnModel::predict(std::span<const double> window, double t_sec,
                                        const ParamSet& params, double ts_sec) const {
    const std::size_t c = channels();
    const std::size_t win = cfg_.window_len;
    if (window.size() != win * c)
        throw ContractError("predict: window has " + std::to_string(window.size()) +
                            " values, expected " + std::to_string(win * c));
    if (t_sec < 0) throw ContractError("predict: negative horizon");
    Batch batch;
    batch.b = 1;
    batch.c = c;
    batch.win = win;
    batch.ts_sec = ts_sec;
    batch.t_sec = {t_sec};
    batch.windows.resize(c * win);
    for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t k = 0; k < win; ++k) batch.windows[ch * win + k] = window[k * c + ch];
    batch.theta0.assign(window.end() - static_cast<std::ptrdiff_t>(c), window.end());
    return predict_batch(batch, params);
}

KfeResult TagnnModel::kfe_forward(std::span<const double> channel_window, std::size_t channel,
                                  const ParamSet& params, double ts_sec) const {
    const std::size_t win = cfg_.window_len;
    if (channel_window.size() != win)
        throw ContractError("kfe_forward: window length " +
                            std::to_string(channel_window.size()) + ", expected " +
                            std::to_string(win));
    Tape t;
    KfeResult res;
    const std::string p = ch_prefix(channel);
    Array v_arr({1, win}), a_arr({1, win});
    std::vector<double> filt = moving_average(channel_window, cfg_.ma_window);
    std::vector<double> v = finite_difference(filt, ts_sec, 1);
    std::vector<double> a = finite_difference(filt, ts_sec, 2);
    std::copy(v.begin(), v.end(), v_arr.data());
    std::copy(a.begin(), a.end(), a_arr.data());

    auto run_branch = [&](const Array& approx, const char* br, std::vector<double>& out_seq) {
        Value approx_v = t.constant(approx);
        std::vector<Value> steps(win);
        for (std::size_t k = 0; k < win; ++k) steps[k] = t.slice_cols(approx_v, k, 1);
        if (cfg_.use_kfe) {
            Value w = param_leaf(t, params, p + br + std::string(".lstm.w"), false, nullptr);
            Value bb = param_leaf(t, params, p + br + std::string(".lstm.b"), false, nullptr);
            Value hw = param_leaf(t, params, p + br + std::string(".head.w"), false, nullptr);
            Value hb = param_leaf(t, params, p + br + std::string(".head.b"), false, nullptr);
            std::vector<Value> hs = lstm_sequence(t, steps, w, bb, cfg_.extractor_hidden);
            for (std::size_t k = 0; k < win; ++k)
                steps[k] = t.add(steps[k], t.affine(hs[k], hw, hb));
        }
        out_seq.resize(win);
        for (std::size_t k = 0; k < win; ++k) out_seq[k] = t.value(steps[k])[0];
    };
    run_branch(v_arr, "kfe.v", res.omega);
    run_branch(a_arr, "kfe.a", res.alpha);
    res.omega0 = res.omega.back();
    res.alpha0 = res.alpha.back();
    return res;
}

double TagnnModel::encoder_forward(std::span<const double> omega_seq,
                                   std::span<const double> alpha_seq, double t_sec,
                                   std::size_t channel, const ParamSet& params) const {
    const std::size_t win = cfg_.window_len;
    if (omega_seq.size() != win || alpha_seq.size() != win)
        throw ContractError("encoder_forward: sequences must have window length " +
                            std::to_string(win));
    if (t_sec < 0) throw ContractError("encoder_forward: negative horizon");
    Tape t;
    const std::string p = ch_prefix(channel);
    std::vector<Value> ev(win), ea(win);
    for (std::size_t k = 0; k < win; ++k) {
        ev[k] = t.constant(Array({1, 1}, {omega_seq[k] * t_sec}));
        ea[k] = t.constant(Array({1, 1}, {alpha_seq[k] * t_sec * t_sec}));
    }
    Value wv = param_leaf(t, params, p + "enc.v.lstm.w", false, nullptr);
    Value bv = param_leaf(t, params, p + "enc.v.lstm.b", false, nullptr);
    Value wa = param_leaf(t, params, p + "enc.a.lstm.w", false, nullptr);
    Value ba = param_leaf(t, params, p + "enc.a.lstm.b", false, nullptr);
    Value hv = lstm_sequence(t, ev, wv, bv, cfg_.encoder_hidden).back();
    Value ha = lstm_sequence(t, ea, wa, ba, cfg_.encoder_hidden).back();
    const Value parts[] = {hv, ha};
    Value x = t.concat_cols(parts);
    const std::size_t nffn = cfg_.encoder_head_widths.size();
    for (std::size_t k = 0; k < nffn; ++k) {
        Value w = param_leaf(t, params, p + "enc.ffn" + std::to_string(k) + ".w", false, nullptr);
        Value bb = param_leaf(t, params, p + "enc.ffn" + std::to_string(k) + ".b", false, nullptr);
        x = t.affine(x, w, bb);
        if (k + 1 < nffn) x = t.tanh_(x);
    }
    return t.value(x)[0];
}

Array TagnnModel::decoder_forward(const Array& theta_init, const ParamSet& params,
                                  bool linear_test_mode) const {
    if (theta_init.ndim() != 2 || theta_init.extent(1) != channels())
        throw ContractError("decoder_forward: expected [rows," +
                            std::to_string(channels()) + "], got " + theta_init.shape_str());
    Tape t;
    Value ti = t.leaf(theta_init, false);
    Value out = decode(t, ti, params, false, linear_test_mode, nullptr);
    return t.value(out);
}

std::vector<double> TagnnModel::taylor_predict(std::span<const double> window, double t_sec,
                                               double ts) const {
    const std::size_t c = channels();
    const std::size_t win = cfg_.window_len;
    if (window.size() != win * c)
        throw ContractError("taylor_predict: window has " + std::to_string(window.size()) +
                            " values, expected " + std::to_string(win * c));
    TaylorConfig tc{cfg_.taylor_order};
    std::vector<double> out(c);
    std::vector<double> col(win);
    for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t k = 0; k < win; ++k) col[k] = window[k * c + ch];
        const TaylorState s = window_taylor_state(col, ts);
        out[ch] = taylor_extrapolate(s.theta0, s.omega0, s.alpha0, t_sec, tc);
    }
    return out;
}

}  // namespace tagnn
