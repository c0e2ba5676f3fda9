#include <doctest.h>

#include <cmath>
#include <vector>

#include "tagnn/autodiff.hpp"
#include "tagnn/errors.hpp"
#include "tagnn/rng.hpp"

using namespace tagnn;

namespace {

// straight-line single-sample cell oracle, gate order [i, f, g, o],
// independent of the tape implementation
struct CellOracle {
    std::size_t in, hidden;
    std::vector<double> w;  // [(in+hidden) x 4*hidden]
    std::vector<double> b;

    static double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

    void step(const std::vector<double>& x, std::vector<double>& h, std::vector<double>& c) const {
        std::vector<double> z(4 * hidden, 0.0);
        for (std::size_t j = 0; j < 4 * hidden; ++j) {
            double acc = b[j];
            for (std::size_t k = 0; k < in; ++k) acc += x[k] * w[k * 4 * hidden + j];
            for (std::size_t k = 0; k < hidden; ++k) acc += h[k] * w[(in + k) * 4 * hidden + j];
            z[j] = acc;
        }
        for (std::size_t k = 0; k < hidden; ++k) {
            const double i = sig(z[k]);
            const double f = sig(z[hidden + k]);
            const double g = std::tanh(z[2 * hidden + k]);
            const double o = sig(z[3 * hidden + k]);
            c[k] = f * c[k] + i * g;
            h[k] = o * std::tanh(c[k]);
        }
    }
};

}  // namespace

TEST_CASE("all-zero weights give identically zero hidden states") {
    const std::size_t hidden = 5, steps = 7;
    Tape t;
    Value w = t.constant(Array({1 + hidden, 4 * hidden}));
    Value b = t.constant(Array({4 * hidden}));
    std::vector<Value> xs;
    Rng rng(1);
    for (std::size_t k = 0; k < steps; ++k)
        xs.push_back(t.constant(Array({2, 1}, {rng.uniform(-3, 3), rng.uniform(-3, 3)})));
    const auto hs = lstm_sequence(t, xs, w, b, hidden);
    for (const Value& h : hs)
        for (double v : t.value(h).vec()) CHECK(v == 0.0);
}

TEST_CASE("one-step sequence equals a single cell application") {
    const std::size_t hidden = 4;
    Rng rng(2);
    Array w({1 + hidden, 4 * hidden});
    Array b({4 * hidden});
    for (double& v : w.vec()) v = rng.uniform(-0.5, 0.5);
    for (double& v : b.vec()) v = rng.uniform(-0.1, 0.1);

    Tape t;
    Value wv = t.constant(w), bv = t.constant(b);
    Value x = t.constant(Array({1, 1}, {0.7}));
    const auto hs = lstm_sequence(t, {&x, 1}, wv, bv, hidden);
    REQUIRE(hs.size() == 1);

    Tape t2;
    Value h0 = t2.constant(Array({1, hidden}));
    Value c0 = t2.constant(Array({1, hidden}));
    auto [h1, c1] = lstm_cell(t2, t2.constant(Array({1, 1}, {0.7})), h0, c0, t2.constant(w),
                              t2.constant(b), hidden);
    for (std::size_t k = 0; k < hidden; ++k)
        CHECK(t.value(hs[0])[k] == doctest::Approx(t2.value(h1)[k]).epsilon(1e-15));
}

TEST_CASE("random instance matches the straight-line oracle below 1e-12") {
    const std::size_t hidden = 6, steps = 16;
    Rng rng(3);
    CellOracle oracle{1, hidden, {}, {}};
    Array w({1 + hidden, 4 * hidden});
    Array b({4 * hidden});
    for (double& v : w.vec()) v = rng.uniform(-0.6, 0.6);
    for (double& v : b.vec()) v = rng.uniform(-0.2, 0.2);
    oracle.w = w.vec();
    oracle.b = b.vec();

    std::vector<double> inputs(steps);
    for (double& v : inputs) v = rng.uniform(-2, 2);

    Tape t;
    std::vector<Value> xs;
    for (double v : inputs) xs.push_back(t.constant(Array({1, 1}, {v})));
    const auto hs = lstm_sequence(t, xs, t.constant(w), t.constant(b), hidden);

    std::vector<double> h(hidden, 0.0), c(hidden, 0.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        oracle.step({inputs[k]}, h, c);
        for (std::size_t j = 0; j < hidden; ++j)
            worst = std::max(worst, std::abs(h[j] - t.value(hs[k])[j]));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("empty sequence is a contract error") {
    Tape t;
    Value w = t.constant(Array({5, 16}));
    Value b = t.constant(Array({16}));
    CHECK_THROWS_AS(lstm_sequence(t, {}, w, b, 4), ContractError);
}
