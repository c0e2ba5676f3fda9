#include <doctest.h>

#include <cmath>

#include "tagnn/autodiff.hpp"
#include "tagnn/errors.hpp"
#include "tagnn/rng.hpp"

using namespace tagnn;

namespace {

Array random_array(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
    Array a(std::move(shape));
    for (double& x : a.vec()) x = rng.uniform(lo, hi);
    return a;
}

}  // namespace

TEST_CASE("forward: affine identity case") {
    Tape t;
    Value x = t.constant(Array({1, 3}, {1, 2, 3}));
    Array eye({3, 3});
    for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
    Value w = t.constant(eye);
    Value b = t.constant(Array({3}));
    const Array& y = t.forward(t.affine(x, w, b));
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 2.0);
    CHECK(y[2] == 3.0);
}

TEST_CASE("forward: tanh at zero") {
    Tape t;
    const Array& y = t.forward(t.tanh_(t.constant(Array({1, 1}))));
    CHECK(y[0] == 0.0);
}

TEST_CASE("backward: d(x^2)/dx at x=3 is 6") {
    Tape t;
    Value x = t.leaf(Array({1, 1}, {3.0}));
    Value loss = t.dot(x, x);
    t.backward(loss);
    CHECK(t.grad(x)[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("backward: mean squared error of w*x over two samples") {
    // loss = mean((w*x - y)^2), w=1, x=[1,1], y=[0,0] -> dLoss/dw = 2
    Tape t;
    Value w = t.leaf(Array({1, 1}, {1.0}));
    Value x = t.constant(Array({1, 2}, {1.0, 1.0}));
    Value y = t.constant(Array({1, 2}, {0.0, 0.0}));
    // w broadcast by matmul: [1,1] x [1,2]
    Value pred = t.matmul(w, x);
    Value loss = t.mse(pred, y);
    t.backward(loss);
    CHECK(t.value(loss)[0] == doctest::Approx(1.0));
    CHECK(t.grad(w)[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("backward: unused parameter gets no gradient") {
    Tape t;
    Value used = t.leaf(Array({1, 1}, {2.0}));
    Value unused = t.leaf(Array({1, 1}, {5.0}));
    Value loss = t.dot(used, used);
    t.backward(loss);
    CHECK(t.has_grad(used));
    CHECK_FALSE(t.has_grad(unused));
}

TEST_CASE("backward: fan-out accumulates additively") {
    Tape t;
    Value x = t.leaf(Array({1, 1}, {1.5}));
    Value y = t.add(x, x);  // y = 2x
    Value one = t.constant(Array({1, 1}, {1.0}));
    Value loss = t.dot(y, one);
    t.backward(loss);
    CHECK(t.grad(x)[0] == doctest::Approx(2.0));
}

TEST_CASE("backward rejects non-scalar roots") {
    Tape t;
    Value x = t.leaf(Array({2, 2}, {1, 2, 3, 4}));
    Value y = t.add(x, x);
    CHECK_THROWS_AS(t.backward(y), ContractError);
}

TEST_CASE("shape mismatch errors carry both shapes") {
    Tape t;
    Value a = t.constant(Array({2, 2}));
    Value b = t.constant(Array({2, 3}));
    CHECK_THROWS_WITH_AS(t.add(a, b), doctest::Contains("[2,2]"), StructuralError);
}

TEST_CASE("concat followed by split recovers operands exactly") {
    Rng rng(17);
    for (int it = 0; it < 30; ++it) {
        const std::size_t rows = 1 + rng.index(6);
        const std::size_t wa = 1 + rng.index(5);
        const std::size_t wb = 1 + rng.index(5);
        Array a = random_array(rng, {rows, wa});
        Array b = random_array(rng, {rows, wb});
        Tape t;
        Value va = t.constant(a);
        Value vb = t.constant(b);
        const Value parts[] = {va, vb};
        Value cat = t.concat_cols(parts);
        const Array& ra = t.value(t.slice_cols(cat, 0, wa));
        const Array& rb = t.value(t.slice_cols(cat, wa, wb));
        for (std::size_t i = 0; i < a.numel(); ++i) CHECK(ra[i] == a[i]);
        for (std::size_t i = 0; i < b.numel(); ++i) CHECK(rb[i] == b[i]);
    }
}

TEST_CASE("forward pass is a pure function of inputs") {
    Rng rng(4);
    Array x = random_array(rng, {3, 4});
    Array w = random_array(rng, {4, 2});
    Array b = random_array(rng, {2});
    auto run = [&]() {
        Tape t;
        Value y = t.tanh_(t.affine(t.constant(x), t.constant(w), t.constant(b)));
        return t.value(y).vec();
    };
    CHECK(run() == run());
}

TEST_CASE("dropout mask statistics and inference identity") {
    Rng rng(21);
    const double rate = 0.3;
    Array m = dropout_mask(rng, {200, 50}, rate);
    std::size_t zeros = 0;
    for (double v : m.vec()) {
        if (v == 0.0) ++zeros;
        else CHECK(v == doctest::Approx(1.0 / 0.7));
    }
    const double frac = static_cast<double>(zeros) / static_cast<double>(m.numel());
    CHECK(frac == doctest::Approx(rate).epsilon(0.05));

    // training-mode expectation is the identity map
    Array x = random_array(rng, {200, 50});
    double mean_ratio = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.numel(); ++i) {
        mean_ratio += x[i] * m[i];
        n += 1;
    }
    double mean_x = 0.0;
    for (double v : x.vec()) mean_x += v;
    CHECK(mean_ratio / static_cast<double>(n) ==
          doctest::Approx(mean_x / static_cast<double>(n)).epsilon(0.15));

    CHECK_THROWS_AS(dropout_mask(rng, {2, 2}, 1.0), ContractError);
}

TEST_CASE("slice_rows and tile_rows are inverse-consistent under backward") {
    Rng rng(8);
    Array x = random_array(rng, {4, 3});
    Tape t;
    Value leaf = t.leaf(x);
    Value tiled = t.tile_rows(leaf, 3);  // [12,3]
    CHECK(t.value(tiled).extent(0) == 12);
    Value ones = t.constant(Array::full({12, 3}, 1.0));
    Value loss = t.dot(tiled, ones);
    t.backward(loss);
    // every element of x feeds 3 tiled copies
    for (std::size_t i = 0; i < x.numel(); ++i) CHECK(t.grad(leaf)[i] == doctest::Approx(3.0));
}
