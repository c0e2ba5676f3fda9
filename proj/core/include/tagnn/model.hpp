#pragma once

#include <span>
#include <vector>

#include "tagnn/autodiff.hpp"
#include "tagnn/config.hpp"
#include "tagnn/kinematics.hpp"
#include "tagnn/params.hpp"
#include "tagnn/skeleton.hpp"

namespace tagnn {

// Mini-batch laid out channel-major so per-channel slicing is contiguous.
struct Batch {
    std::size_t b = 0;    // samples
    std::size_t c = 0;    // channels
    std::size_t win = 0;  // window length
    double ts_sec = 0.01;
    std::vector<double> windows;  // [c][b][win]
    std::vector<double> theta0;   // [b][c] last observed frame
    std::vector<double> targets;  // [n_t][b][c] ground truth per horizon
    std::vector<double> gv, ga;   // [b][c] oracle derivative targets
    std::vector<double> t_sec;    // horizon list (seconds)

    double window_at(std::size_t ch, std::size_t s, std::size_t k) const {
        return windows[(ch * b + s) * win + k];
    }
};

struct ParameterCount {
    std::size_t extractor_per_channel = 0;
    std::size_t encoder_per_channel = 0;
    std::size_t decoder = 0;
    std::size_t channels = 0;
    std::size_t total = 0;
};

// Frozen dropout masks for one optimization step. Phase separation in the
// training objective recomputes the forward pass, so masks are drawn once and
// replayed.
struct DropoutPlan {
    std::vector<std::vector<Array>> masks;  // [channel][ffn layer], rows = n_t*b
    bool empty() const { return masks.empty(); }
};

struct KfeResult {
    std::vector<double> omega, alpha;  // corrected per-step estimates
    double omega0 = 0, alpha0 = 0;     // final-step taps
};

// The forecasting network: per-channel kinematic feature extractor and
// physics-based encoder, shared per-axis graph decoder, multi-horizon loss.
class TagnnModel {
public:
    explicit TagnnModel(ModelConfig cfg);
    // Diagnostic constructor: overrides the layout-derived topology (used by
    // reduced-width gradient checks). Such models are not checkpointable.
    TagnnModel(ModelConfig cfg, HandSkeleton skeleton);

    const ModelConfig& config() const { return cfg_; }
    const HandSkeleton& skeleton() const { return skel_; }
    const Array& adjacency() const { return adj_; }
    std::size_t channels() const { return 3 * skel_.joint_count(); }

    ParamSet init_params(Rng& rng) const;
    std::vector<std::string> param_names() const;
    ParameterCount parameter_count() const;

    // Single window (win x C row-major), one horizon, dropout off. ts_sec is
    // the sampling interval of the recording.
    std::vector<double> predict(std::span<const double> window, double t_sec,
                                const ParamSet& params, double ts_sec) const;

    // All horizons in batch.t_sec at once; returns [n_t][b][c].
    std::vector<double> predict_batch(const Batch& batch, const ParamSet& params) const;

    // Composite objective: horizon-weighted pose terms plus the derivative
    // auxiliaries. Accumulates dLoss/dParam into grads when non-null.
    double loss(const Batch& batch, const ParamSet& params, GradStore* grads,
                const DropoutPlan* plan = nullptr) const;

    DropoutPlan make_dropout_plan(std::size_t b, Rng& rng) const;

    // Test hooks for the individual stages.
    KfeResult kfe_forward(std::span<const double> channel_window, std::size_t channel,
                          const ParamSet& params, double ts_sec) const;
    double encoder_forward(std::span<const double> omega_seq, std::span<const double> alpha_seq,
                           double t_sec, std::size_t channel, const ParamSet& params) const;
    // theta_init is [rows, C]; linear_test_mode drops the tanh between layers.
    Array decoder_forward(const Array& theta_init, const ParamSet& params,
                          bool linear_test_mode = false) const;

    // Physics-only path: order-k extrapolation from raw-window derivative
    // estimates; no filtering, no learned parts, no graph propagation.
    std::vector<double> taylor_predict(std::span<const double> window, double t_sec,
                                       double ts_sec) const;

private:
    struct ChannelNodes {
        Value delta;            // [rows, 1]
        Value omega0, alpha0;   // [b, 1]
        bool has_aux = false;
    };

    ChannelNodes forward_channel(Tape& t, const Batch& batch, std::size_t ch,
                                 const ParamSet& params, bool with_grad, const DropoutPlan* plan,
                                 std::vector<std::pair<std::size_t, Value>>* leaves) const;
    Value decode(Tape& t, Value theta_init2d, const ParamSet& params, bool with_grad,
                 bool linear_test_mode, std::vector<std::pair<std::size_t, Value>>* leaves) const;

    Value param_leaf(Tape& t, const ParamSet& params, const std::string& name, bool with_grad,
                     std::vector<std::pair<std::size_t, Value>>* leaves) const;

    ModelConfig cfg_;
    HandSkeleton skel_;
    Array adj_;
};

}  // namespace tagnn
