#pragma once

#include <vector>

#include "tagnn/gradcheck.hpp"
#include "tagnn/model.hpp"

namespace tagnn {

// Reduced-width configuration used by the finite-difference sweeps: a
// two-joint chain, narrow recurrent cells, two prediction horizons.
ModelConfig reduced_model_config(std::size_t hidden = 4);
HandSkeleton reduced_skeleton();

// Deterministic sinusoid batch over the reduced channel set, with analytic
// derivative targets.
Batch make_reduced_batch(std::size_t b, std::size_t window_len,
                         const std::vector<double>& horizons_ms, std::uint64_t seed);

// Central-difference check of the composed training objective (pose terms
// plus auxiliaries) against the production gradient path. Dropout disabled.
GradCheckResult composed_loss_gradcheck(std::size_t hidden = 4, std::size_t batch = 3,
                                        std::uint64_t seed = 5, double eps = 1e-5,
                                        std::size_t max_coords = 10000);

// Same sweep against a simple quadratic bowl; exercises the harness itself.
GradCheckResult quadratic_bowl_gradcheck(std::size_t dims = 24, std::uint64_t seed = 3);

}  // namespace tagnn
