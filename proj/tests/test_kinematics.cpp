#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tagnn/kinematics.hpp"
#include "tagnn/rng.hpp"

using namespace tagnn;

TEST_CASE("moving average on constants is the identity") {
    const std::vector<double> s{5, 5, 5};
    const auto out = moving_average(s, 10);
    CHECK(out == std::vector<double>{5, 5, 5});
}

TEST_CASE("moving average truncates causally at the start") {
    const std::vector<double> s{0, 2};
    const auto out = moving_average(s, 2);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 1.0);
}

TEST_CASE("moving average matches brute-force windowed means exactly") {
    Rng rng(12);
    std::vector<double> s(16);
    for (double& v : s) v = rng.uniform(-30, 30);
    const auto out = moving_average(s, 10);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::size_t start = i + 1 >= 10 ? i + 1 - 10 : 0;
        double acc = 0.0;
        for (std::size_t k = start; k <= i; ++k) acc += s[k];
        CHECK(out[i] == acc / static_cast<double>(i - start + 1));
    }
}

TEST_CASE("moving average stays within the input envelope and is idempotent on constants") {
    Rng rng(5);
    for (int it = 0; it < 50; ++it) {
        std::vector<double> s(1 + rng.index(40));
        for (double& v : s) v = rng.uniform(-10, 10);
        const auto out = moving_average(s, 1 + rng.index(12));
        const double lo = *std::min_element(s.begin(), s.end());
        const double hi = *std::max_element(s.begin(), s.end());
        for (double v : out) {
            CHECK(v >= lo - 1e-12);
            CHECK(v <= hi + 1e-12);
        }
    }
    CHECK_THROWS_AS(moving_average(std::vector<double>{1.0}, 0), ContractError);
}

TEST_CASE("finite differences on a linear ramp recover the slope") {
    const double ts = 0.01;
    std::vector<double> s(20);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = 3.0 * static_cast<double>(i) * ts;
    const auto v = finite_difference(s, ts, 1);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(v[0] == v[1]);  // replicated entry
}

TEST_CASE("finite differences on constants are zero for both orders") {
    const std::vector<double> s(12, 7.5);
    for (int order : {1, 2})
        for (double v : finite_difference(s, 0.01, order)) CHECK(v == 0.0);
}

TEST_CASE("second differences on a quadratic recover the curvature") {
    const double ts = 0.01;
    std::vector<double> s(16);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double t = static_cast<double>(i) * ts;
        s[i] = t * t;
    }
    const auto a = finite_difference(s, ts, 2);
    for (std::size_t i = 2; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(finite_difference(std::vector<double>{1.0, 2.0}, 0.01, 2), ContractError);
}

TEST_CASE("gaussian kernel is normalized") {
    const auto k = gaussian_kernel(3.0);
    CHECK(k.size() == 25);
    double sum = 0.0;
    for (double v : k) sum += v;
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("gaussian oracle on constants: identity smoothing, zero derivatives") {
    const std::vector<double> s(40, 3.25);
    const auto sm = gaussian_smooth(s, 3.0);
    for (double v : sm) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));
    for (int order : {1, 2})
        for (double v : gaussian_derivative_oracle(s, 3.0, 0.01, order))
            CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("gaussian smoothing matches a direct convolution oracle") {
    Rng rng(7);
    std::vector<double> s(60);
    for (double& v : s) v = rng.uniform(-5, 5);
    const auto got = gaussian_smooth(s, 3.0);

    const auto k = gaussian_kernel(3.0);
    const long long r = static_cast<long long>(k.size() / 2);
    const long long n = static_cast<long long>(s.size());
    auto reflect = [&](long long i) {
        const long long period = 2 * (n - 1);
        long long m = i % period;
        if (m < 0) m += period;
        if (m >= n) m = period - m;
        return static_cast<std::size_t>(m);
    };
    double worst = 0.0;
    for (long long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long long j = -r; j <= r; ++j)
            acc += k[static_cast<std::size_t>(j + r)] * s[reflect(i + j)];
        worst = std::max(worst, std::abs(acc - got[static_cast<std::size_t>(i)]));
    }
    CHECK(worst < 1e-10);
    CHECK_THROWS_AS(gaussian_smooth(std::vector<double>(10, 0.0), 3.0), ContractError);
}

TEST_CASE("gaussian derivatives commute with constant offsets") {
    Rng rng(9);
    std::vector<double> s(80), shifted(80);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = rng.uniform(-4, 4);
        shifted[i] = s[i] + 11.0;
    }
    for (int order : {1, 2}) {
        const auto a = gaussian_derivative_oracle(s, 3.0, 0.01, order);
        const auto b = gaussian_derivative_oracle(shifted, 3.0, 0.01, order);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
    }
}

TEST_CASE("taylor extrapolation hand cases") {
    CHECK(taylor_extrapolate(4.0, 0.0, 0.0, 0.37) == 4.0);
    CHECK(taylor_extrapolate(1.0, 2.0, 0.0, 0.1) == doctest::Approx(1.2));
    CHECK(taylor_extrapolate(0.0, 1.0, 4.0, 0.5) == doctest::Approx(1.0));
    CHECK(taylor_extrapolate(1.0, 2.0, 4.0, 0.5, {0}) == 1.0);
    CHECK(taylor_extrapolate(1.0, 2.0, 4.0, 0.5, {1}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(taylor_extrapolate(0, 0, 0, -0.1), ContractError);
    CHECK_THROWS_AS(taylor_extrapolate(0, 0, 0, 0.1, {3}), ContractError);
}

TEST_CASE("taylor extrapolation with exact derivatives is exact on quadratics") {
    Rng rng(31);
    for (int it = 0; it < 40; ++it) {
        const double a = rng.uniform(-5, 5), b = rng.uniform(-20, 20), c = rng.uniform(-40, 40);
        const double t0 = rng.uniform(0, 2), t = rng.uniform(0, 1);
        const double theta0 = a + b * t0 + 0.5 * c * t0 * t0;
        const double omega0 = b + c * t0;
        const double want = a + b * (t0 + t) + 0.5 * c * (t0 + t) * (t0 + t);
        CHECK(std::abs(taylor_extrapolate(theta0, omega0, c, t) - want) < 1e-9);
    }
}

TEST_CASE("window taylor state is exact on quadratics") {
    const double ts = 0.01;
    Rng rng(13);
    for (int it = 0; it < 25; ++it) {
        const double a = rng.uniform(-5, 5), b = rng.uniform(-30, 30), c = rng.uniform(-60, 60);
        std::vector<double> w(16);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double t = static_cast<double>(k) * ts;
            w[k] = a + b * t + 0.5 * c * t * t;
        }
        const double t0 = 15.0 * ts;
        const TaylorState s = window_taylor_state(w, ts);
        CHECK(std::abs(s.theta0 - w.back()) < 1e-12);
        CHECK(std::abs(s.omega0 - (b + c * t0)) < 1e-8);
        CHECK(std::abs(s.alpha0 - c) < 1e-8);
    }
}

TEST_CASE("zero-velocity prediction repeats the last frame for any horizon") {
    const std::vector<double> window{1, 2, 3, 4, 5, 6};  // 3 frames x 2 channels
    const auto p1 = zero_velocity_predict(window, 2, 0.04);
    const auto p2 = zero_velocity_predict(window, 2, 0.4);
    CHECK(p1 == std::vector<double>{5, 6});
    CHECK(p1 == p2);
    CHECK_THROWS_AS(zero_velocity_predict({}, 2, 0.1), ContractError);
}

TEST_CASE("zero-velocity error grows linearly on a unit ramp") {
    // theta(t) = t units: repeating the last frame is off by exactly t at horizon t
    const double ts = 0.01;
    std::vector<double> seq(200);
    for (std::size_t i = 0; i < seq.size(); ++i) seq[i] = static_cast<double>(i) * ts;
    for (double t_ms : {40.0, 120.0, 400.0}) {
        const auto h = static_cast<std::size_t>(t_ms / 10.0);
        double mae = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i + h < seq.size(); ++i) {
            mae += std::abs(seq[i + h] - seq[i]);
            ++n;
        }
        mae /= static_cast<double>(n);
        CHECK(mae == doctest::Approx(t_ms / 1000.0).epsilon(1e-9));
    }
}
