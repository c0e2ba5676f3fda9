#include <doctest.h>

#include <cmath>

#include "tagnn/autodiff.hpp"
#include "tagnn/diagnostics.hpp"
#include "tagnn/gradcheck.hpp"
#include "tagnn/rng.hpp"

using namespace tagnn;

TEST_CASE("quadratic bowl passes below 1e-9") {
    const GradCheckResult r = quadratic_bowl_gradcheck();
    CHECK(r.coords_checked == 24);
    CHECK(r.max_rel_err < 1e-9);
}

namespace {

// layer-level check harness: one parameter array, loss built on a fresh tape
GradCheckResult check_layer(
    ParamSet& params,
    const std::function<Value(Tape&, const std::vector<Value>&)>& build) {
    auto run = [&](const ParamSet& p, GradStore* g) {
        Tape t;
        std::vector<Value> leaves;
        for (std::size_t i = 0; i < p.count(); ++i) leaves.push_back(t.leaf(p.value(i)));
        Value loss = build(t, leaves);
        if (!g) return t.value(loss)[0];
        t.backward(loss);
        for (std::size_t i = 0; i < p.count(); ++i)
            if (t.has_grad(leaves[i]))
                for (std::size_t k = 0; k < (*g)[i].numel(); ++k)
                    (*g)[i][k] += t.grad(leaves[i])[k];
        return t.value(loss)[0];
    };
    return gradient_check([&](const ParamSet& p) { return run(p, nullptr); },
                          [&](const ParamSet& p, GradStore& g) { run(p, &g); }, params);
}

Array rnd(Rng& rng, Shape s, double lo = -1.0, double hi = 1.0) {
    Array a(std::move(s));
    for (double& x : a.vec()) x = rng.uniform(lo, hi);
    return a;
}

}  // namespace

TEST_CASE("every layer type differentiates correctly") {
    Rng rng(40);
    const Array x = rnd(rng, {3, 4}, -2, 2);
    const Array target = rnd(rng, {3, 2});

    SUBCASE("affine + tanh + mse") {
        ParamSet ps;
        ps.add("w", rnd(rng, {4, 2}));
        ps.add("b", rnd(rng, {2}));
        auto r = check_layer(ps, [&](Tape& t, const std::vector<Value>& leaves) {
            Value y = t.tanh_(t.affine(t.constant(x), leaves[0], leaves[1]));
            return t.mse(y, t.constant(target));
        });
        CHECK(r.max_rel_err < 1e-7);
    }

    SUBCASE("sigmoid, mul, scale, sub") {
        ParamSet ps;
        ps.add("w", rnd(rng, {3, 4}));
        auto r = check_layer(ps, [&](Tape& t, const std::vector<Value>& leaves) {
            Value s = t.sigmoid_(leaves[0]);
            Value m = t.mul(s, t.constant(x));
            Value d = t.sub(t.scale(m, 1.7), t.constant(x));
            return t.dot(d, d);
        });
        CHECK(r.max_rel_err < 1e-7);
    }

    SUBCASE("concat, slice, tile, reshape") {
        ParamSet ps;
        ps.add("a", rnd(rng, {2, 3}));
        ps.add("b", rnd(rng, {2, 2}));
        auto r = check_layer(ps, [&](Tape& t, const std::vector<Value>& leaves) {
            const Value parts[] = {leaves[0], leaves[1]};
            Value cat = t.concat_cols(parts);            // [2,5]
            Value til = t.tile_rows(cat, 3);             // [6,5]
            Value sl = t.slice_cols(til, 1, 3);          // [6,3]
            Value rs = t.reshape(sl, {3, 6});            // [3,6]
            Value rows = t.slice_rows(rs, 1, 2);         // [2,6]
            return t.dot(rows, rows);
        });
        CHECK(r.max_rel_err < 1e-7);
    }

    SUBCASE("adjacency propagation") {
        ParamSet ps;
        ps.add("feat", rnd(rng, {2, 3, 2}));
        Array adj = rnd(rng, {3, 3}, 0.0, 1.0);
        auto r = check_layer(ps, [&](Tape& t, const std::vector<Value>& leaves) {
            Value y = t.adj_prop(leaves[0], t.constant(adj));
            return t.dot(y, y);
        });
        CHECK(r.max_rel_err < 1e-7);
    }

    SUBCASE("lstm sequence") {
        const std::size_t hidden = 3, steps = 5;
        ParamSet ps;
        ps.add("w", rnd(rng, {1 + hidden, 4 * hidden}, -0.5, 0.5));
        ps.add("b", rnd(rng, {4 * hidden}, -0.2, 0.2));
        std::vector<Array> inputs;
        for (std::size_t k = 0; k < steps; ++k) inputs.push_back(rnd(rng, {2, 1}, -2, 2));
        auto r = check_layer(ps, [&](Tape& t, const std::vector<Value>& leaves) {
            std::vector<Value> xs;
            for (const Array& a : inputs) xs.push_back(t.constant(a));
            const auto hs = lstm_sequence(t, xs, leaves[0], leaves[1], hidden);
            return t.dot(hs.back(), hs.back());
        });
        CHECK(r.max_rel_err < 1e-6);
    }
}

TEST_CASE("composed model loss matches finite differences below 1e-4") {
    const GradCheckResult r = composed_loss_gradcheck(4, 2, 5);
    CAPTURE(r.worst_param);
    CHECK(r.max_rel_err < 1e-4);
    CHECK(r.coords_checked > 1000);
}

TEST_CASE("gradient check is deterministic run to run") {
    const GradCheckResult a = composed_loss_gradcheck(4, 2, 9);
    const GradCheckResult b = composed_loss_gradcheck(4, 2, 9);
    CHECK(a.max_rel_err == b.max_rel_err);
    CHECK(a.worst_param == b.worst_param);
}
