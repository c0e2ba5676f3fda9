#pragma once

#include <functional>
#include <string>

#include "tagnn/params.hpp"

namespace tagnn {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    std::size_t coords_checked = 0;
};

// Compares reverse-mode gradients against central finite differences on every
// parameter coordinate, or on a seeded random subsample when the parameter
// count exceeds max_coords. Relative error uses a small denominator floor so
// coordinates with near-zero gradients are judged on an absolute scale.
//
// loss_fn must be a pure function of the parameters (dropout off / frozen).
GradCheckResult gradient_check(
    const std::function<double(const ParamSet&)>& loss_fn,
    const std::function<void(const ParamSet&, GradStore&)>& grad_fn,
    ParamSet& params, double eps = 1e-5, std::size_t max_coords = 10000,
    std::uint64_t seed = 20240101);

}  // namespace tagnn
