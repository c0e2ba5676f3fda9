#pragma once

#include <span>
#include <string>
#include <vector>

#include "tagnn/data.hpp"
#include "tagnn/model.hpp"

namespace tagnn {

// Mean errors over all samples, joints, and axes.
double mae(std::span<const double> pred, std::span<const double> truth);
double mse(std::span<const double> pred, std::span<const double> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);

struct EvalRow {
    std::string predictor;  // "tagnn" or "zero_velocity"
    double horizon_ms = 0;
    double mae = 0, mse = 0, rmse = 0;
    std::size_t n = 0;  // windows evaluated
};

struct EvalReport {
    std::string unit;
    std::vector<EvalRow> rows;

    const EvalRow& row(const std::string& predictor, double horizon_ms) const;
};

// Runs the model and the zero-velocity baseline over every test window at
// every horizon. Horizons must be exact frame multiples of the data rate.
EvalReport evaluate(const TagnnModel& model, const ParamSet& params,
                    std::span<const MotionSequence> test, const std::vector<double>& horizons_ms,
                    std::size_t stride = 1);

// Per-horizon model MAE over prebuilt sample sets; the single source of truth
// for validation metrics during training.
std::vector<double> per_horizon_mae(const TagnnModel& model, const ParamSet& params,
                                    std::span<const MotionSequence> seqs,
                                    std::span<const SampleSet> sets);

void write_report_csv(const EvalReport& report, const std::string& path);
EvalReport parse_report_csv(const std::string& path);

// Trains and evaluates the four component variants under one seed and budget.
struct AblationOutcome {
    EvalReport full, no_kfe, no_gcn, no_both;
};

AblationOutcome ablation_suite(const Dataset& data, const ModelConfig& base,
                               const TrainConfig& tcfg, const std::vector<double>& horizons_ms,
                               std::size_t eval_stride, const ParamSet* pretrained_full = nullptr);

}  // namespace tagnn
