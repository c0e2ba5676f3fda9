#pragma once

#include <string>
#include <vector>

#include "tagnn/adam.hpp"
#include "tagnn/data.hpp"
#include "tagnn/model.hpp"
#include "tagnn/rng.hpp"

namespace tagnn {

struct EpochLog {
    std::size_t epoch = 0;
    double lr = 0;
    double train_loss = 0;
    std::vector<double> val_mae;  // per horizon; empty without a val split
    double seconds = 0;
};

struct TrainResult {
    ParamSet params;       // state after the last epoch
    ParamSet best_params;  // lowest mean val MAE (== params without val split)
    std::size_t best_epoch = 0;
    std::size_t epochs_done = 0;
    AdamState adam;
    std::string rng_state;
    std::vector<EpochLog> log;
    Unit unit = Unit::Degrees;
    double ts_sec = 0.01;
};

// Stepped exponential decay: base * decay^floor(epoch / interval).
double lr_at(std::size_t epoch, const TrainConfig& cfg);

// Restores mid-training state from a wide checkpoint for exact continuation.
struct ResumeState {
    ParamSet params;
    AdamState adam;
    std::string rng_state;
    std::size_t epoch = 0;
};

TrainResult train(const TagnnModel& model, const Dataset& data, const TrainConfig& cfg,
                  const ResumeState* resume = nullptr);

// Wide (f64) checkpoint carrying optimizer moments and generator state, for
// bit-exact resume; `final` selects last-epoch over best-epoch parameters.
Checkpoint make_resume_checkpoint(const TagnnModel& model, const TrainResult& result);
ResumeState resume_from_checkpoint(const Checkpoint& ckpt);

// Deployment checkpoint (f32 payload, best parameters).
Checkpoint make_export_checkpoint(const TagnnModel& model, const TrainResult& result);

void write_epoch_log_csv(const std::string& path, const std::vector<EpochLog>& log,
                         const std::vector<double>& horizons_ms);

}  // namespace tagnn
