#include "tagnn/evaluator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "tagnn/trainer.hpp"

namespace tagnn {

namespace {

void check_shapes(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw StructuralError("metric: operand sizes " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
}

constexpr std::size_t kEvalChunk = 64;

}  // namespace

double mae(std::span<const double> pred, std::span<const double> truth) {
    check_shapes(pred, truth);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) acc += std::abs(pred[i] - truth[i]);
    return acc / static_cast<double>(pred.size());
}

double mse(std::span<const double> pred, std::span<const double> truth) {
    check_shapes(pred, truth);
    double acc = 0.0;
    // explicit fma pins the rounding so independent reimplementations of the
    // same summation order reproduce the value bit-exactly
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - truth[i];
        acc = std::fma(d, d, acc);
    }
    return acc / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
    return std::sqrt(mse(pred, truth));
}

const EvalRow& EvalReport::row(const std::string& predictor, double horizon_ms) const {
    for (const EvalRow& r : rows)
        if (r.predictor == predictor && std::abs(r.horizon_ms - horizon_ms) < 1e-9) return r;
    throw ContractError("report: no row for " + predictor + " at " + format_double(horizon_ms) +
                        " ms");
}

namespace {

struct ErrorAccum {
    double abs = 0, sq = 0;
    std::size_t windows = 0, values = 0;
};

// shared scan over all windows for both predictors
void accumulate(const TagnnModel& model, const ParamSet* params,
                std::span<const MotionSequence> seqs, std::span<const SampleSet> sets,
                std::vector<ErrorAccum>* model_acc, std::vector<ErrorAccum>* zv_acc) {
    const std::vector<WindowRef> refs = flatten_refs(sets);
    const std::size_t c = model.config().channels();
    for (std::size_t pos = 0; pos < refs.size(); pos += kEvalChunk) {
        const std::size_t bsz = std::min(kEvalChunk, refs.size() - pos);
        const std::span<const WindowRef> chunk(refs.data() + pos, bsz);
        Batch batch = gather_batch(seqs, sets, chunk);
        const std::size_t nt = batch.t_sec.size();
        std::vector<double> pred;
        if (model_acc) pred = model.predict_batch(batch, *params);
        for (std::size_t kt = 0; kt < nt; ++kt) {
            for (std::size_t s = 0; s < bsz; ++s) {
                const double* truth = &batch.targets[(kt * bsz + s) * c];
                const double* t0 = &batch.theta0[s * c];
                const double* p = model_acc ? &pred[(kt * bsz + s) * c] : nullptr;
                for (std::size_t ch = 0; ch < c; ++ch) {
                    if (model_acc) {
                        const double d = p[ch] - truth[ch];
                        (*model_acc)[kt].abs += std::abs(d);
                        (*model_acc)[kt].sq += d * d;
                    }
                    if (zv_acc) {
                        const double d = t0[ch] - truth[ch];
                        (*zv_acc)[kt].abs += std::abs(d);
                        (*zv_acc)[kt].sq += d * d;
                    }
                }
                if (model_acc) {
                    (*model_acc)[kt].windows += 1;
                    (*model_acc)[kt].values += c;
                }
                if (zv_acc) {
                    (*zv_acc)[kt].windows += 1;
                    (*zv_acc)[kt].values += c;
                }
            }
        }
    }
}

}  // namespace

EvalReport evaluate(const TagnnModel& model, const ParamSet& params,
                    std::span<const MotionSequence> test, const std::vector<double>& horizons_ms,
                    std::size_t stride) {
    if (test.empty()) throw ContractError("evaluate: empty test set");
    const ModelConfig& mc = model.config();
    std::vector<SampleSet> sets;
    for (const MotionSequence& seq : test)
        sets.push_back(
            make_samples(seq, horizons_ms, stride, mc.window_len, mc.gaussian_sigma, false));

    const std::size_t nt = horizons_ms.size();
    std::vector<ErrorAccum> macc(nt), zacc(nt);
    accumulate(model, &params, test, sets, &macc, &zacc);

    EvalReport report;
    report.unit = unit_name(test.front().meta.unit);
    auto emit = [&](const std::string& name, const std::vector<ErrorAccum>& acc) {
        for (std::size_t kt = 0; kt < nt; ++kt) {
            EvalRow row;
            row.predictor = name;
            row.horizon_ms = horizons_ms[kt];
            if (acc[kt].values) {
                row.mae = acc[kt].abs / static_cast<double>(acc[kt].values);
                row.mse = acc[kt].sq / static_cast<double>(acc[kt].values);
                row.rmse = std::sqrt(row.mse);
            }
            row.n = acc[kt].windows;
            report.rows.push_back(std::move(row));
        }
    };
    emit("tagnn", macc);
    emit("zero_velocity", zacc);
    return report;
}

std::vector<double> per_horizon_mae(const TagnnModel& model, const ParamSet& params,
                                    std::span<const MotionSequence> seqs,
                                    std::span<const SampleSet> sets) {
    std::size_t nt = 0;
    for (const SampleSet& s : sets) nt = std::max(nt, s.horizon_sec.size());
    std::vector<ErrorAccum> acc(nt);
    accumulate(model, &params, seqs, sets, &acc, nullptr);
    std::vector<double> out(nt, 0.0);
    for (std::size_t kt = 0; kt < nt; ++kt)
        if (acc[kt].values) out[kt] = acc[kt].abs / static_cast<double>(acc[kt].values);
    return out;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write report '" + path + "'");
    f << "predictor,horizon_ms,mae,mse,rmse,n,unit\n";
    for (const EvalRow& r : report.rows)
        f << r.predictor << ',' << format_double(r.horizon_ms) << ',' << format_double(r.mae)
          << ',' << format_double(r.mse) << ',' << format_double(r.rmse) << ',' << r.n << ','
          << report.unit << "\n";
}

EvalReport parse_report_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open report '" + path + "'");
    std::string line;
    if (!std::getline(f, line) || line.rfind("predictor,", 0) != 0)
        throw IngestionError(path + ": not an evaluation report");
    EvalReport report;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        EvalRow row;
        std::getline(ss, row.predictor, ',');
        auto next = [&]() {
            if (!std::getline(ss, cell, ',')) throw IngestionError(path + ": short row '" + line + "'");
            return cell;
        };
        row.horizon_ms = std::stod(next());
        row.mae = std::stod(next());
        row.mse = std::stod(next());
        row.rmse = std::stod(next());
        row.n = std::stoull(next());
        report.unit = next();
        report.rows.push_back(std::move(row));
    }
    return report;
}

AblationOutcome ablation_suite(const Dataset& data, const ModelConfig& base,
                               const TrainConfig& tcfg, const std::vector<double>& horizons_ms,
                               std::size_t eval_stride, const ParamSet* pretrained_full) {
    if (data.test.empty()) throw ContractError("ablation_suite: dataset has no test split");
    auto run = [&](bool kfe, bool gcn) {
        ModelConfig cfg = base;
        cfg.use_kfe = kfe;
        cfg.use_gcn = gcn;
        TagnnModel model(cfg);
        if (kfe && gcn && pretrained_full)
            return evaluate(model, *pretrained_full, data.test, horizons_ms, eval_stride);
        TrainResult r = train(model, data, tcfg);
        return evaluate(model, r.best_params, data.test, horizons_ms, eval_stride);
    };
    AblationOutcome out;
    out.full = run(true, true);
    out.no_kfe = run(false, true);
    out.no_gcn = run(true, false);
    out.no_both = run(false, false);
    return out;
}

}  // namespace tagnn
