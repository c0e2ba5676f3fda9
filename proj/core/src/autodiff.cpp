#include "tagnn/autodiff.hpp"

#include <cmath>
#include <cstring>

#include "tagnn/errors.hpp"

namespace tagnn {

Value Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return Value{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Value Tape::leaf(Array v, bool requires_grad) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(v);
    n.requires_grad = requires_grad;
    return push(std::move(n));
}

static void check_same_shape(const char* op, const Array& a, const Array& b) {
    if (!a.same_shape(b)) {
        throw StructuralError(std::string(op) + ": operand shapes " + a.shape_str() + " vs " +
                              b.shape_str());
    }
}

Value Tape::add(Value a, Value b) {
    const Array& av = nodes_[a.id].value;
    const Array& bv = nodes_[b.id].value;
    check_same_shape("add", av, bv);
    Node n;
    n.op = Op::Add;
    n.p0 = a.id;
    n.p1 = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.value = av;
    double* o = n.value.data();
    const double* q = bv.data();
    for (std::size_t i = 0; i < n.value.numel(); ++i) o[i] += q[i];
    return push(std::move(n));
}

Value Tape::sub(Value a, Value b) {
    const Array& av = nodes_[a.id].value;
    const Array& bv = nodes_[b.id].value;
    check_same_shape("sub", av, bv);
    Node n;
    n.op = Op::Sub;
    n.p0 = a.id;
    n.p1 = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.value = av;
    double* o = n.value.data();
    const double* q = bv.data();
    for (std::size_t i = 0; i < n.value.numel(); ++i) o[i] -= q[i];
    return push(std::move(n));
}

Value Tape::mul(Value a, Value b) {
    const Array& av = nodes_[a.id].value;
    const Array& bv = nodes_[b.id].value;
    check_same_shape("mul", av, bv);
    Node n;
    n.op = Op::Mul;
    n.p0 = a.id;
    n.p1 = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.value = av;
    double* o = n.value.data();
    const double* q = bv.data();
    for (std::size_t i = 0; i < n.value.numel(); ++i) o[i] *= q[i];
    return push(std::move(n));
}

Value Tape::scale(Value a, double c) {
    Node n;
    n.op = Op::Scale;
    n.p0 = a.id;
    n.c = c;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.value = nodes_[a.id].value;
    for (double& x : n.value.vec()) x *= c;
    return push(std::move(n));
}

Value Tape::affine(Value x, Value w, Value b) {
    const Array& xv = nodes_[x.id].value;
    const Array& wv = nodes_[w.id].value;
    const Array& bv = nodes_[b.id].value;
    if (xv.ndim() != 2 || wv.ndim() != 2 || xv.extent(1) != wv.extent(0)) {
        throw StructuralError("affine: input " + xv.shape_str() + " vs weight " + wv.shape_str());
    }
    if (bv.numel() != wv.extent(1)) {
        throw StructuralError("affine: bias " + bv.shape_str() + " vs weight " + wv.shape_str());
    }
    const std::size_t m = xv.extent(0), k = xv.extent(1), out = wv.extent(1);
    Node n;
    n.op = Op::Affine;
    n.p0 = x.id;
    n.p1 = w.id;
    n.p2 = b.id;
    n.requires_grad = nodes_[x.id].requires_grad || nodes_[w.id].requires_grad ||
                      nodes_[b.id].requires_grad;
    n.value = Array({m, out});
    matmul_acc(xv.data(), wv.data(), n.value.data(), m, k, out);
    double* o = n.value.data();
    const double* bias = bv.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < out; ++j) o[i * out + j] += bias[j];
    return push(std::move(n));
}

Value Tape::matmul(Value x, Value w) {
    const Array& xv = nodes_[x.id].value;
    const Array& wv = nodes_[w.id].value;
    if (xv.ndim() != 2 || wv.ndim() != 2 || xv.extent(1) != wv.extent(0)) {
        throw StructuralError("matmul: " + xv.shape_str() + " x " + wv.shape_str());
    }
    Node n;
    n.op = Op::MatMul;
    n.p0 = x.id;
    n.p1 = w.id;
    n.requires_grad = nodes_[x.id].requires_grad || nodes_[w.id].requires_grad;
    n.value = Array({xv.extent(0), wv.extent(1)});
    matmul_acc(xv.data(), wv.data(), n.value.data(), xv.extent(0), xv.extent(1), wv.extent(1));
    return push(std::move(n));
}

Value Tape::adj_prop(Value x, Value adj) {
    const Array& xv = nodes_[x.id].value;
    const Array& av = nodes_[adj.id].value;
    if (xv.ndim() != 3 || av.ndim() != 2 || av.extent(0) != av.extent(1) ||
        xv.extent(1) != av.extent(0)) {
        throw StructuralError("adj_prop: features " + xv.shape_str() + " vs adjacency " +
                              av.shape_str());
    }
    const std::size_t s = xv.extent(0), j = xv.extent(1), f = xv.extent(2);
    Node n;
    n.op = Op::AdjProp;
    n.p0 = x.id;
    n.p1 = adj.id;
    n.requires_grad = nodes_[x.id].requires_grad || nodes_[adj.id].requires_grad;
    n.value = Array({s, j, f});
    for (std::size_t b = 0; b < s; ++b)
        matmul_acc(av.data(), xv.data() + b * j * f, n.value.data() + b * j * f, j, j, f);
    return push(std::move(n));
}

Value Tape::tanh_(Value a) {
    Node n;
    n.op = Op::Tanh;
    n.p0 = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.value = nodes_[a.id].value;
    for (double& x : n.value.vec()) x = std::tanh(x);
    return push(std::move(n));
}

static inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Value Tape::sigmoid_(Value a) {
    Node n;
    n.op = Op::Sigmoid;
    n.p0 = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.value = nodes_[a.id].value;
    for (double& x : n.value.vec()) x = sigmoid(x);
    return push(std::move(n));
}

Value Tape::concat_cols(std::span<const Value> parts) {
    if (parts.empty()) throw ContractError("concat: no operands");
    const std::size_t rows = nodes_[parts[0].id].value.extent(0);
    std::size_t total = 0;
    bool rg = false;
    for (Value p : parts) {
        const Array& v = nodes_[p.id].value;
        if (v.ndim() != 2 || v.extent(0) != rows) {
            throw StructuralError("concat: operand " + v.shape_str() + " does not match " +
                                  std::to_string(rows) + " rows");
        }
        total += v.extent(1);
        rg = rg || nodes_[p.id].requires_grad;
    }
    Node n;
    n.op = Op::ConcatCols;
    n.requires_grad = rg;
    n.value = Array({rows, total});
    n.extra.reserve(parts.size());
    std::size_t col = 0;
    for (Value p : parts) {
        n.extra.push_back(p.id);
        const Array& v = nodes_[p.id].value;
        const std::size_t w = v.extent(1);
        for (std::size_t r = 0; r < rows; ++r)
            std::memcpy(n.value.data() + r * total + col, v.data() + r * w, w * sizeof(double));
        col += w;
    }
    return push(std::move(n));
}

Value Tape::slice_cols(Value a, std::size_t start, std::size_t len) {
    const Array& av = nodes_[a.id].value;
    if (av.ndim() != 2 || start + len > av.extent(1)) {
        throw StructuralError("slice_cols: [" + std::to_string(start) + "," +
                              std::to_string(start + len) + ") out of " + av.shape_str());
    }
    const std::size_t rows = av.extent(0), w = av.extent(1);
    Node n;
    n.op = Op::SliceCols;
    n.p0 = a.id;
    n.a = start;
    n.b = len;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.value = Array({rows, len});
    for (std::size_t r = 0; r < rows; ++r)
        std::memcpy(n.value.data() + r * len, av.data() + r * w + start, len * sizeof(double));
    return push(std::move(n));
}

Value Tape::slice_rows(Value a, std::size_t start, std::size_t len) {
    const Array& av = nodes_[a.id].value;
    if (av.ndim() < 2 || start + len > av.extent(0)) {
        throw StructuralError("slice_rows: [" + std::to_string(start) + "," +
                              std::to_string(start + len) + ") out of " + av.shape_str());
    }
    const std::size_t w = av.cols();
    Shape s = av.shape();
    s[0] = len;
    Node n;
    n.op = Op::SliceRows;
    n.p0 = a.id;
    n.a = start;
    n.b = len;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.value = Array(std::move(s));
    std::memcpy(n.value.data(), av.data() + start * w, len * w * sizeof(double));
    return push(std::move(n));
}

Value Tape::tile_rows(Value a, std::size_t reps) {
    const Array& av = nodes_[a.id].value;
    if (av.ndim() < 1 || reps == 0) throw ContractError("tile_rows: need reps >= 1");
    Shape s = av.shape();
    s[0] *= reps;
    Node n;
    n.op = Op::TileRows;
    n.p0 = a.id;
    n.b = reps;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.value = Array(std::move(s));
    const std::size_t block = av.numel();
    for (std::size_t r = 0; r < reps; ++r)
        std::memcpy(n.value.data() + r * block, av.data(), block * sizeof(double));
    return push(std::move(n));
}

Value Tape::reshape(Value a, Shape shape) {
    const Array& av = nodes_[a.id].value;
    Array out(std::move(shape), av.vec());
    Node n;
    n.op = Op::Reshape;
    n.p0 = a.id;
    n.requires_grad = nodes_[a.id].requires_grad;
    n.value = std::move(out);
    return push(std::move(n));
}

Value Tape::mse(Value a, Value b) {
    const Array& av = nodes_[a.id].value;
    const Array& bv = nodes_[b.id].value;
    check_same_shape("mse", av, bv);
    if (av.numel() == 0) throw ContractError("mse: empty operands");
    double acc = 0.0;
    for (std::size_t i = 0; i < av.numel(); ++i) {
        const double d = av[i] - bv[i];
        acc += d * d;
    }
    Node n;
    n.op = Op::Mse;
    n.p0 = a.id;
    n.p1 = b.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
    n.value = Array::scalar(acc / static_cast<double>(av.numel()));
    return push(std::move(n));
}

Value Tape::dot(Value a, Value w) {
    const Array& av = nodes_[a.id].value;
    const Array& wv = nodes_[w.id].value;
    check_same_shape("dot", av, wv);
    double acc = 0.0;
    for (std::size_t i = 0; i < av.numel(); ++i) acc += av[i] * wv[i];
    Node n;
    n.op = Op::Dot;
    n.p0 = a.id;
    n.p1 = w.id;
    n.requires_grad = nodes_[a.id].requires_grad || nodes_[w.id].requires_grad;
    n.value = Array::scalar(acc);
    return push(std::move(n));
}

const Array& Tape::grad(Value v) const {
    const Node& n = nodes_[v.id];
    if (!n.grad_live) throw ContractError("grad: node has no gradient (backward not run?)");
    return n.grad;
}

void Tape::ensure_grad(std::int32_t id) {
    Node& n = nodes_[id];
    if (!n.grad_live) {
        n.grad = Array(n.value.shape());
        n.grad_live = true;
    }
}

void Tape::backward(Value root) {
    if (!root.valid() || static_cast<std::size_t>(root.id) >= nodes_.size())
        throw ContractError("backward: invalid root");
    if (nodes_[root.id].value.numel() != 1)
        throw ContractError("backward: root must be scalar, got " +
                            nodes_[root.id].value.shape_str());
    if (!nodes_[root.id].requires_grad) return;
    ensure_grad(root.id);
    nodes_[root.id].grad[0] += 1.0;
    for (std::int32_t i = root.id; i >= 0; --i) {
        if (nodes_[i].grad_live && nodes_[i].requires_grad) backprop(i);
    }
}

void Tape::backprop(std::int32_t id) {
    Node& n = nodes_[id];
    const double* g = n.grad.data();
    const std::size_t ne = n.grad.numel();

    auto needs = [&](std::int32_t p) { return p >= 0 && nodes_[p].requires_grad; };
    auto gbuf = [&](std::int32_t p) -> double* {
        ensure_grad(p);
        return nodes_[p].grad.data();
    };

    switch (n.op) {
        case Op::Leaf:
            break;
        case Op::Add: {
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i];
            }
            if (needs(n.p1)) {
                double* d = gbuf(n.p1);
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i];
            }
            break;
        }
        case Op::Sub: {
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i];
            }
            if (needs(n.p1)) {
                double* d = gbuf(n.p1);
                for (std::size_t i = 0; i < ne; ++i) d[i] -= g[i];
            }
            break;
        }
        case Op::Mul: {
            const double* a = nodes_[n.p0].value.data();
            const double* b = nodes_[n.p1].value.data();
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i] * b[i];
            }
            if (needs(n.p1)) {
                double* d = gbuf(n.p1);
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i] * a[i];
            }
            break;
        }
        case Op::Scale: {
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                for (std::size_t i = 0; i < ne; ++i) d[i] += n.c * g[i];
            }
            break;
        }
        case Op::Affine:
        case Op::MatMul: {
            const Array& xv = nodes_[n.p0].value;
            const Array& wv = nodes_[n.p1].value;
            const std::size_t m = xv.extent(0), k = xv.extent(1), out = wv.extent(1);
            if (needs(n.p0)) {
                Array wt = transpose(wv);
                matmul_acc(g, wt.data(), gbuf(n.p0), m, out, k);
            }
            if (needs(n.p1)) {
                Array xt = transpose(xv);
                matmul_acc(xt.data(), g, gbuf(n.p1), k, m, out);
            }
            if (n.op == Op::Affine && needs(n.p2)) {
                double* d = gbuf(n.p2);
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < out; ++j) d[j] += g[i * out + j];
            }
            break;
        }
        case Op::AdjProp: {
            const Array& xv = nodes_[n.p0].value;
            const Array& av = nodes_[n.p1].value;
            const std::size_t s = xv.extent(0), j = xv.extent(1), f = xv.extent(2);
            if (needs(n.p0)) {
                Array at = transpose(av);
                double* d = gbuf(n.p0);
                for (std::size_t b = 0; b < s; ++b)
                    matmul_acc(at.data(), g + b * j * f, d + b * j * f, j, j, f);
            }
            if (needs(n.p1)) {
                double* d = gbuf(n.p1);
                for (std::size_t b = 0; b < s; ++b) {
                    const double* gb = g + b * j * f;
                    const double* xb = xv.data() + b * j * f;
                    for (std::size_t r = 0; r < j; ++r)
                        for (std::size_t cidx = 0; cidx < j; ++cidx) {
                            double acc = 0.0;
                            for (std::size_t ff = 0; ff < f; ++ff)
                                acc += gb[r * f + ff] * xb[cidx * f + ff];
                            d[r * j + cidx] += acc;
                        }
                }
            }
            break;
        }
        case Op::Tanh: {
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                const double* y = n.value.data();
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i] * (1.0 - y[i] * y[i]);
            }
            break;
        }
        case Op::Sigmoid: {
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                const double* y = n.value.data();
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i] * y[i] * (1.0 - y[i]);
            }
            break;
        }
        case Op::ConcatCols: {
            const std::size_t rows = n.value.extent(0), total = n.value.extent(1);
            std::size_t col = 0;
            for (std::int32_t p : n.extra) {
                const std::size_t w = nodes_[p].value.extent(1);
                if (needs(p)) {
                    double* d = gbuf(p);
                    for (std::size_t r = 0; r < rows; ++r)
                        for (std::size_t cidx = 0; cidx < w; ++cidx)
                            d[r * w + cidx] += g[r * total + col + cidx];
                }
                col += w;
            }
            break;
        }
        case Op::SliceCols: {
            if (needs(n.p0)) {
                const std::size_t rows = n.value.extent(0), len = n.b;
                const std::size_t w = nodes_[n.p0].value.extent(1);
                double* d = gbuf(n.p0);
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t cidx = 0; cidx < len; ++cidx)
                        d[r * w + n.a + cidx] += g[r * len + cidx];
            }
            break;
        }
        case Op::SliceRows: {
            if (needs(n.p0)) {
                const std::size_t w = n.value.cols();
                double* d = gbuf(n.p0) + n.a * w;
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i];
            }
            break;
        }
        case Op::TileRows: {
            if (needs(n.p0)) {
                const std::size_t block = nodes_[n.p0].value.numel();
                double* d = gbuf(n.p0);
                for (std::size_t r = 0; r < n.b; ++r) {
                    const double* gr = g + r * block;
                    for (std::size_t i = 0; i < block; ++i) d[i] += gr[i];
                }
            }
            break;
        }
        case Op::Reshape: {
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                for (std::size_t i = 0; i < ne; ++i) d[i] += g[i];
            }
            break;
        }
        case Op::Mse: {
            const Array& av = nodes_[n.p0].value;
            const Array& bv = nodes_[n.p1].value;
            const double s = 2.0 * g[0] / static_cast<double>(av.numel());
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                for (std::size_t i = 0; i < av.numel(); ++i) d[i] += s * (av[i] - bv[i]);
            }
            if (needs(n.p1)) {
                double* d = gbuf(n.p1);
                for (std::size_t i = 0; i < av.numel(); ++i) d[i] -= s * (av[i] - bv[i]);
            }
            break;
        }
        case Op::Dot: {
            const Array& av = nodes_[n.p0].value;
            const Array& wv = nodes_[n.p1].value;
            if (needs(n.p0)) {
                double* d = gbuf(n.p0);
                for (std::size_t i = 0; i < av.numel(); ++i) d[i] += g[0] * wv[i];
            }
            if (needs(n.p1)) {
                double* d = gbuf(n.p1);
                for (std::size_t i = 0; i < av.numel(); ++i) d[i] += g[0] * av[i];
            }
            break;
        }
    }
}

std::pair<Value, Value> lstm_cell(Tape& t, Value x, Value h_prev, Value c_prev, Value w, Value b,
                                  std::size_t hidden) {
    const Value xh[] = {x, h_prev};
    Value z = t.affine(t.concat_cols(xh), w, b);
    Value i = t.sigmoid_(t.slice_cols(z, 0, hidden));
    Value f = t.sigmoid_(t.slice_cols(z, hidden, hidden));
    Value g = t.tanh_(t.slice_cols(z, 2 * hidden, hidden));
    Value o = t.sigmoid_(t.slice_cols(z, 3 * hidden, hidden));
    Value c = t.add(t.mul(f, c_prev), t.mul(i, g));
    Value h = t.mul(o, t.tanh_(c));
    return {h, c};
}

std::vector<Value> lstm_sequence(Tape& t, std::span<const Value> inputs, Value w, Value b,
                                 std::size_t hidden) {
    if (inputs.empty()) throw ContractError("lstm_sequence: empty input sequence");
    const std::size_t rows = t.value(inputs[0]).extent(0);
    Value h = t.constant(Array({rows, hidden}));
    Value c = t.constant(Array({rows, hidden}));
    std::vector<Value> hs;
    hs.reserve(inputs.size());
    for (Value x : inputs) {
        auto [h2, c2] = lstm_cell(t, x, h, c, w, b, hidden);
        h = h2;
        c = c2;
        hs.push_back(h);
    }
    return hs;
}

Array dropout_mask(Rng& rng, Shape shape, double rate) {
    if (rate < 0.0 || rate >= 1.0) throw ContractError("dropout: rate must be in [0,1)");
    Array m(std::move(shape));
    const double keep = 1.0 / (1.0 - rate);
    for (double& x : m.vec()) x = rng.uniform01() < rate ? 0.0 : keep;
    return m;
}

}  // namespace tagnn
