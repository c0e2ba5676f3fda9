#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "tagnn/array.hpp"
#include "tagnn/rng.hpp"

namespace tagnn {

// Handle into a Tape. Plain index; parents always precede children, so the
// creation order is a topological order and the graph is acyclic by
// construction.
struct Value {
    std::int32_t id = -1;
    bool valid() const { return id >= 0; }
};

enum class Op : std::uint8_t {
    Leaf,
    Add,
    Sub,
    Mul,
    Scale,
    Affine,
    MatMul,
    AdjProp,
    Tanh,
    Sigmoid,
    ConcatCols,
    SliceCols,
    SliceRows,
    TileRows,
    Reshape,
    Mse,
    Dot,
};

// Eager reverse-mode tape. Values are computed at op creation; backward()
// sweeps the tape in reverse and accumulates gradients additively, so fan-out
// is handled without bookkeeping.
class Tape {
public:
    Value leaf(Array v, bool requires_grad = true);
    Value constant(Array v) { return leaf(std::move(v), false); }

    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    Value scale(Value a, double c);
    // x [B,n] * w [n,m] + b [m] broadcast over rows
    Value affine(Value x, Value w, Value b);
    Value matmul(Value x, Value w);
    // y[s,i,f] = sum_j adj[i,j] * x[s,j,f]
    Value adj_prop(Value x, Value adj);
    Value tanh_(Value a);
    Value sigmoid_(Value a);
    Value concat_cols(std::span<const Value> parts);
    Value slice_cols(Value a, std::size_t start, std::size_t len);
    Value slice_rows(Value a, std::size_t start, std::size_t len);
    Value tile_rows(Value a, std::size_t reps);
    Value reshape(Value a, Shape shape);
    // mean((a-b)^2) over all elements -> scalar
    Value mse(Value a, Value b);
    // sum(a * w) -> scalar
    Value dot(Value a, Value w);

    // References stay valid while the tape lives: nodes are stored in a deque
    // so later op pushes never relocate existing values.
    const Array& value(Value v) const { return nodes_[v.id].value; }
    // Value of the root; all intermediates are already cached on the tape.
    const Array& forward(Value root) const { return value(root); }

    // Seeds d(root)/d(root) = 1 and accumulates gradients into every
    // requires_grad node reachable from root. Root must be scalar.
    void backward(Value root);

    bool has_grad(Value v) const { return nodes_[v.id].grad_live; }
    const Array& grad(Value v) const;
    bool requires_grad(Value v) const { return nodes_[v.id].requires_grad; }

    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

private:
    struct Node {
        Op op = Op::Leaf;
        Array value;
        Array grad;
        bool requires_grad = false;
        bool grad_live = false;
        std::int32_t p0 = -1, p1 = -1, p2 = -1;
        std::vector<std::int32_t> extra;  // concat parents
        double c = 0.0;
        std::size_t a = 0, b = 0;  // slice start/len, tile reps
    };

    std::deque<Node> nodes_;

    Value push(Node n);
    void ensure_grad(std::int32_t id);
    void backprop(std::int32_t id);
};

// Standard four-gate recurrent cell, gate order [input, forget, cell, output].
// w is [(in+hidden), 4*hidden], b is [4*hidden]; a single bias vector per gate
// block. Returns (h, c).
std::pair<Value, Value> lstm_cell(Tape& t, Value x, Value h_prev, Value c_prev,
                                  Value w, Value b, std::size_t hidden);

// Runs the cell over a sequence starting from zero states and returns all
// hidden states. Throws ContractError on an empty sequence.
std::vector<Value> lstm_sequence(Tape& t, std::span<const Value> inputs, Value w, Value b,
                                 std::size_t hidden);

// Inverted-scaling dropout mask: entries are 0 with probability rate, else
// 1/(1-rate), so inference needs no rescaling.
Array dropout_mask(Rng& rng, Shape shape, double rate);

}  // namespace tagnn
