#pragma once

#include <span>
#include <string>
#include <vector>

#include "tagnn/errors.hpp"

namespace tagnn {

enum class Unit { Degrees, Millimetres };

std::string unit_name(Unit u);
Unit parse_unit(const std::string& s);

struct SeriesMeta {
    double ts_sec = 0.01;  // sampling interval
    Unit unit = Unit::Degrees;
    std::vector<std::string> channels;
};

struct TaylorConfig {
    int order = 2;  // supported orders: 0, 1, 2
};

// Strictly causal moving average, truncated at the start so no sample ever
// sees future data: out[i] = mean(series[max(0, i-window+1) ..= i]).
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

// Backward differences scaled to per-second units. order 1 replicates the
// first entry from the second; order 2 applies the order-1 stencil twice.
std::vector<double> finite_difference(std::span<const double> series, double ts_sec, int order);

// Discrete Gaussian kernel, radius 4*sigma, normalized to sum 1.
std::vector<double> gaussian_kernel(double sigma);

// Reflect-padded convolution with gaussian_kernel(sigma).
std::vector<double> gaussian_smooth(std::span<const double> series, double sigma);

// Non-causal oracle: Gaussian smoothing followed by central differences
// (applied `order` times), in per-second units. Training-time targets only.
std::vector<double> gaussian_derivative_oracle(std::span<const double> series, double sigma,
                                               double ts_sec, int order);

// theta0 + omega*t + alpha*t^2/2, truncated at cfg.order.
double taylor_extrapolate(double theta0, double omega, double alpha, double t_sec,
                          const TaylorConfig& cfg = {});

// Exact-on-quadratics derivative estimates from a raw window: backward
// differences plus the half-step midpoint correction on the velocity.
// Returns {theta0, omega0, alpha0} at the final sample.
struct TaylorState {
    double theta0 = 0.0;
    double omega0 = 0.0;
    double alpha0 = 0.0;
};
TaylorState window_taylor_state(std::span<const double> window, double ts_sec);

// Repeats the last frame of the window for any horizon. `window_flat` is
// row-major [n_frames, n_channels].
std::vector<double> zero_velocity_predict(std::span<const double> window_flat,
                                          std::size_t n_channels, double t_sec);

}  // namespace tagnn
