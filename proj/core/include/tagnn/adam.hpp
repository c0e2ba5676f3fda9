#pragma once

#include <cstdint>

#include "tagnn/params.hpp"

namespace tagnn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

// Bias-corrected Adam. Moments are laid out parallel to the ParamSet; the
// step counter advances by exactly one per update.
class AdamState {
public:
    AdamState() = default;
    AdamState(const ParamSet& params, AdamConfig cfg = {});

    // Applies one update in registration order. Throws TrainingError naming
    // the parameter on the first non-finite gradient.
    void step(ParamSet& params, const GradStore& grads, double lr);

    std::uint64_t steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }

    std::size_t moment_count() const { return m_.size(); }
    Array& first_moment(std::size_t i) { return m_[i]; }
    Array& second_moment(std::size_t i) { return v_[i]; }
    const Array& first_moment(std::size_t i) const { return m_[i]; }
    const Array& second_moment(std::size_t i) const { return v_[i]; }
    void set_steps(std::uint64_t t) { t_ = t; }

private:
    AdamConfig cfg_;
    std::vector<Array> m_, v_;
    std::uint64_t t_ = 0;
};

}  // namespace tagnn
