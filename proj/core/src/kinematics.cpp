#include "tagnn/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace tagnn {

std::string unit_name(Unit u) { return u == Unit::Degrees ? "degrees" : "mm"; }

Unit parse_unit(const std::string& s) {
    if (s == "degrees") return Unit::Degrees;
    if (s == "mm" || s == "millimetres") return Unit::Millimetres;
    throw IngestionError("unknown unit '" + s + "' (expected degrees or mm)");
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window < 1) throw ContractError("moving_average: window must be >= 1");
    if (series.empty()) throw ContractError("moving_average: empty series");
    std::vector<double> out(series.size());
    // direct left-to-right summation per window; windows are short and a
    // running sum would drift away from bit-exact windowed means
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t start = i + 1 >= window ? i + 1 - window : 0;
        double acc = 0.0;
        for (std::size_t k = start; k <= i; ++k) acc += series[k];
        out[i] = acc / static_cast<double>(i - start + 1);
    }
    return out;
}

std::vector<double> finite_difference(std::span<const double> series, double ts_sec, int order) {
    if (order != 1 && order != 2) throw ContractError("finite_difference: order must be 1 or 2");
    if (series.size() < static_cast<std::size_t>(order) + 1)
        throw ContractError("finite_difference: series of " + std::to_string(series.size()) +
                            " samples too short for order " + std::to_string(order));
    std::vector<double> out(series.size());
    for (std::size_t i = 1; i < series.size(); ++i) out[i] = (series[i] - series[i - 1]) / ts_sec;
    out[0] = out.size() > 1 ? out[1] : 0.0;
    if (order == 2) return finite_difference(out, ts_sec, 1);
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma <= 0.0) throw ContractError("gaussian_kernel: sigma must be positive");
    const auto radius = static_cast<std::size_t>(std::ceil(4.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double x = static_cast<double>(i) - static_cast<double>(radius);
        k[i] = std::exp(-0.5 * x * x / (sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

namespace {

// index into [0, n) with reflect padding (abcba style, no repeated edge)
std::size_t reflect(long long i, long long n) {
    if (n == 1) return 0;
    const long long period = 2 * (n - 1);
    long long m = i % period;
    if (m < 0) m += period;
    if (m >= n) m = period - m;
    return static_cast<std::size_t>(m);
}

}  // namespace

std::vector<double> gaussian_smooth(std::span<const double> series, double sigma) {
    const std::vector<double> k = gaussian_kernel(sigma);
    const long long radius = static_cast<long long>(k.size() / 2);
    const long long n = static_cast<long long>(series.size());
    if (n < static_cast<long long>(k.size()))
        throw ContractError("gaussian_smooth: series of " + std::to_string(series.size()) +
                            " samples shorter than kernel of " + std::to_string(k.size()));
    std::vector<double> out(series.size());
    for (long long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long long j = -radius; j <= radius; ++j)
            acc += k[static_cast<std::size_t>(j + radius)] * series[reflect(i + j, n)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

std::vector<double> gaussian_derivative_oracle(std::span<const double> series, double sigma,
                                               double ts_sec, int order) {
    if (order != 1 && order != 2)
        throw ContractError("gaussian_derivative_oracle: order must be 1 or 2");
    std::vector<double> g = gaussian_smooth(series, sigma);
    const long long n = static_cast<long long>(g.size());
    for (int pass = 0; pass < order; ++pass) {
        std::vector<double> d(g.size());
        for (long long i = 0; i < n; ++i) {
            const double right = g[reflect(i + 1, n)];
            const double left = g[reflect(i - 1, n)];
            d[static_cast<std::size_t>(i)] = (right - left) / (2.0 * ts_sec);
        }
        g = std::move(d);
    }
    return g;
}

double taylor_extrapolate(double theta0, double omega, double alpha, double t_sec,
                          const TaylorConfig& cfg) {
    if (cfg.order < 0 || cfg.order > 2)
        throw ContractError("taylor_extrapolate: order " + std::to_string(cfg.order) +
                            " unsupported (0..2)");
    if (t_sec < 0.0) throw ContractError("taylor_extrapolate: negative horizon");
    double v = theta0;
    if (cfg.order >= 1) v += omega * t_sec;
    if (cfg.order >= 2) v += 0.5 * alpha * t_sec * t_sec;
    return v;
}

TaylorState window_taylor_state(std::span<const double> window, double ts_sec) {
    if (window.size() < 3) throw ContractError("window_taylor_state: need at least 3 samples");
    const std::vector<double> v = finite_difference(window, ts_sec, 1);
    const std::vector<double> a = finite_difference(v, ts_sec, 1);
    TaylorState s;
    s.theta0 = window.back();
    s.alpha0 = a.back();
    // backward difference measures velocity at the interval midpoint
    s.omega0 = v.back() + 0.5 * ts_sec * s.alpha0;
    return s;
}

std::vector<double> zero_velocity_predict(std::span<const double> window_flat,
                                          std::size_t n_channels, double) {
    if (n_channels == 0 || window_flat.size() < n_channels ||
        window_flat.size() % n_channels != 0)
        throw ContractError("zero_velocity_predict: empty or misshapen window");
    const std::size_t last = window_flat.size() - n_channels;
    return {window_flat.begin() + static_cast<std::ptrdiff_t>(last), window_flat.end()};
}

}  // namespace tagnn
