// Command-line frontend: data synthesis, training, evaluation, prediction,
// and diagnostics. Outputs are machine-readable; every failure prints a
// single "error: <category>: <detail>" line and exits nonzero.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tagnn/data.hpp"
#include "tagnn/diagnostics.hpp"
#include "tagnn/evaluator.hpp"
#include "tagnn/model.hpp"
#include "tagnn/trainer.hpp"

namespace {

using namespace tagnn;

Config load_config_or_default(const std::string& path) {
    if (path.empty()) return Config{};
    return parse_config_file(path);
}

std::vector<double> parse_times_ms(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("empty --times-ms list");
    return out;
}

int cmd_synth(const std::string& out_path, std::uint64_t seed, double minutes, double rate_hz,
              const std::string& layout, double max_freq, double coupling, double intent_rate,
              double jerk_limit, double std_scale) {
    SynthSpec spec = SynthSpec::defaults(parse_layout(layout), rate_hz, minutes, seed);
    spec.max_freq_hz = max_freq;
    spec.coupling = coupling;
    spec.intent_rate_hz = intent_rate;
    spec.jerk_limit = jerk_limit;
    for (double& s : spec.channel_std) s *= std_scale;
    MotionSequence seq = synth_generate(spec);
    save_motion_csv(seq, out_path);
    std::cout << "wrote " << out_path << " (" << seq.n_frames() << " frames, "
              << seq.n_channels() << " channels, " << unit_name(seq.meta.unit) << ")\n";
    return 0;
}

int cmd_train(const std::string& data_dir, const std::string& config_path,
              const std::string& out_path, bool no_kfe, bool no_gcn, bool deterministic) {
    Config cfg = load_config_or_default(config_path);
    if (no_kfe) cfg.model.use_kfe = false;
    if (no_gcn) cfg.model.use_gcn = false;
    if (deterministic) cfg.train.deterministic = true;

    Dataset data = load_dataset_dir(data_dir);
    TagnnModel model(cfg.model);
    TrainResult result = train(model, data, cfg.train);
    save_checkpoint(make_export_checkpoint(model, result), out_path);
    write_epoch_log_csv(out_path + ".log.csv", result.log, cfg.model.horizons_ms);
    double final_loss = result.log.empty() ? 0.0 : result.log.back().train_loss;
    std::cout << "trained " << cfg.train.epochs << " epochs, final train loss "
              << format_double(final_loss) << ", best epoch " << result.best_epoch << "\n";
    std::cout << "wrote " << out_path << " and " << out_path << ".log.csv\n";
    return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_dir,
             const std::string& times_ms, const std::string& report_path, std::size_t stride) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    TagnnModel model(ckpt.cfg);
    Dataset data = load_dataset_dir(data_dir);
    const std::vector<MotionSequence>& test = data.test.empty() ? data.train : data.test;
    if (test.empty()) throw ContractError("eval: no test recordings in '" + data_dir + "'");
    const std::vector<double> horizons =
        times_ms.empty() ? ckpt.cfg.horizons_ms : parse_times_ms(times_ms);
    EvalReport report = evaluate(model, ckpt.params, test, horizons, stride);
    write_report_csv(report, report_path);
    std::cout << "wrote " << report_path << " (" << report.rows.size() << " rows, unit "
              << report.unit << ")\n";
    return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& window_path, double t_ms,
                const std::string& export_path) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    TagnnModel model(ckpt.cfg);
    MotionSequence seq = load_motion_csv(window_path);
    const std::size_t win = ckpt.cfg.window_len;
    const std::size_t c = ckpt.cfg.channels();
    if (seq.n_channels() != c)
        throw ContractError("predict: window file has " + std::to_string(seq.n_channels()) +
                            " channels, checkpoint expects " + std::to_string(c));
    if (seq.n_frames() < win)
        throw ContractError("predict: window file has " + std::to_string(seq.n_frames()) +
                            " frames, need at least " + std::to_string(win));
    const std::size_t start = seq.n_frames() - win;
    std::vector<double> window(seq.frames.begin() + static_cast<std::ptrdiff_t>(start * c),
                               seq.frames.end());
    const std::vector<double> pose =
        model.predict(window, t_ms / 1000.0, ckpt.params, seq.meta.ts_sec);

    for (std::size_t ch = 0; ch < c; ++ch)
        std::cout << seq.meta.channels[ch] << ',' << format_double(pose[ch]) << "\n";

    if (!export_path.empty()) {
        std::ofstream f(export_path);
        if (!f) throw IoError("cannot write pose file '" + export_path + "'");
        f << "joint,x,y,z\n";
        const auto& joints = model.skeleton().joints();
        for (std::size_t j = 0; j < joints.size(); ++j)
            f << joints[j] << ',' << format_double(pose[3 * j]) << ','
              << format_double(pose[3 * j + 1]) << ',' << format_double(pose[3 * j + 2]) << "\n";
    }
    return 0;
}

int cmd_params(const std::string& config_path) {
    Config cfg = load_config_or_default(config_path);
    TagnnModel model(cfg.model);
    const ParameterCount pc = model.parameter_count();
    std::cout << "extractor_per_channel " << pc.extractor_per_channel << "\n"
              << "encoder_per_channel " << pc.encoder_per_channel << "\n"
              << "decoder " << pc.decoder << "\n"
              << "channels " << pc.channels << "\n"
              << "total " << pc.total << "\n";
    return 0;
}

int cmd_gradcheck(bool full) {
    int failures = 0;
    auto report = [&](const char* name, const GradCheckResult& r, double tol) {
        const bool ok = r.max_rel_err < tol;
        std::cout << name << ": max_rel_err " << format_double(r.max_rel_err) << " over "
                  << r.coords_checked << " coords";
        if (!r.worst_param.empty()) std::cout << " (worst " << r.worst_param << ")";
        std::cout << (ok ? " ok" : " FAIL") << "\n";
        if (!ok) ++failures;
    };
    report("quadratic_bowl", quadratic_bowl_gradcheck(), 1e-9);
    report("composed_loss_h4", composed_loss_gradcheck(4, full ? 4 : 2), 1e-4);
    if (full) report("composed_loss_h8", composed_loss_gradcheck(8, 3), 1e-4);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TA-GNN finger motion forecasting"};
    app.require_subcommand(1);

    std::string out_path, data_dir, config_path, ckpt_path, report_path, window_path, times_ms;
    std::string layout = "vrhands14", export_path;
    std::uint64_t seed = 1;
    double minutes = 1.0, rate_hz = 100.0, t_ms = 40.0;
    double max_freq = 0.8, coupling = 0.8, intent_rate = 0.0, jerk_limit = 0.0, std_scale = 1.0;
    bool no_kfe = false, no_gcn = false, deterministic = false, full = false;
    std::size_t stride = 1;

    auto* synth = app.add_subcommand("synth", "generate a synthetic motion csv");
    synth->add_option("--out", out_path)->required();
    synth->add_option("--seed", seed);
    synth->add_option("--minutes", minutes);
    synth->add_option("--rate-hz", rate_hz);
    synth->add_option("--layout", layout);
    synth->add_option("--max-freq-hz", max_freq);
    synth->add_option("--coupling", coupling);
    synth->add_option("--intent-rate-hz", intent_rate);
    synth->add_option("--jerk-limit", jerk_limit);
    synth->add_option("--std-scale", std_scale);

    auto* tr = app.add_subcommand("train", "train a model on a dataset directory");
    tr->add_option("--data", data_dir)->required();
    tr->add_option("--config", config_path);
    tr->add_option("--out", ckpt_path)->required();
    tr->add_flag("--no-kfe", no_kfe);
    tr->add_flag("--no-gcn", no_gcn);
    tr->add_flag("--deterministic", deterministic);

    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint against zero-velocity");
    ev->add_option("--ckpt", ckpt_path)->required();
    ev->add_option("--data", data_dir)->required();
    ev->add_option("--times-ms", times_ms);
    ev->add_option("--report", report_path)->required();
    ev->add_option("--stride", stride);

    auto* pr = app.add_subcommand("predict", "predict a pose from a window csv");
    pr->add_option("--ckpt", ckpt_path)->required();
    pr->add_option("--window", window_path)->required();
    pr->add_option("--t-ms", t_ms)->required();
    pr->add_option("--export-pose", export_path);

    auto* pa = app.add_subcommand("params", "print parameter counts");
    pa->add_option("--config", config_path);

    auto* gc = app.add_subcommand("gradcheck", "finite-difference gradient sweep");
    gc->add_flag("--full", full);

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed())
            return cmd_synth(out_path, seed, minutes, rate_hz, layout, max_freq, coupling,
                             intent_rate, jerk_limit, std_scale);
        if (tr->parsed())
            return cmd_train(data_dir, config_path, ckpt_path, no_kfe, no_gcn, deterministic);
        if (ev->parsed()) return cmd_eval(ckpt_path, data_dir, times_ms, report_path, stride);
        if (pr->parsed()) return cmd_predict(ckpt_path, window_path, t_ms, export_path);
        if (pa->parsed()) return cmd_params(config_path);
        if (gc->parsed()) return cmd_gradcheck(full);
    } catch (const tagnn::Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
