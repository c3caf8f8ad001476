#pragma once

#include "skillgraph/matrix.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace skillgraph {

// Reverse-mode autodiff over dense double matrices.
//
// A Tape records the forward computation as a flat list of nodes; parents
// always precede children, so one backward sweep in reverse creation order
// propagates exact gradients. Nodes cache whatever forward by-products the
// backward rule needs (softmax outputs, layernorm statistics, ...).
//
// The tape is append-only and single-threaded; independent evaluations use
// independent tapes.
class Tape {
public:
    using Id = int;

    Id leaf(Matrix value);

    Id matmul(Id a, Id b);
    Id transpose(Id a);
    Id add(Id a, Id b);
    // a: m x n, bias: 1 x n broadcast over rows
    Id add_row_broadcast(Id a, Id bias);
    // a: m x n, s: 1 x 1 broadcast everywhere
    Id add_scalar(Id a, Id s);
    Id scale(Id a, double c);
    Id hadamard(Id a, Id b);
    Id concat_cols(Id a, Id b);
    // a: 1 x n replicated to m x n
    Id repeat_rows(Id a, std::size_t m);
    Id softmax_rows(Id a);
    // x: m x n, gamma/beta: 1 x n; normalizes each row over its n entries
    Id layer_norm_rows(Id x, Id gamma, Id beta, double eps = 1e-5);
    Id gelu(Id a);      // exact erf-based GELU
    Id sigmoid(Id a);
    Id tanh_fn(Id a);

    const Matrix& value(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    const Matrix& grad(Id id) const { return nodes_[static_cast<std::size_t>(id)].grad; }

    // Seeds d(output)/d(output) = seed and accumulates gradients into every
    // node reachable backwards from `output`. Grads from a previous backward
    // call are cleared first.
    void backward(Id output, const Matrix& seed);

    std::size_t node_count() const { return nodes_.size(); }

private:
    enum class Op {
        Leaf,
        MatMul,
        Transpose,
        Add,
        AddRowBroadcast,
        AddScalar,
        Scale,
        Hadamard,
        ConcatCols,
        RepeatRows,
        SoftmaxRows,
        LayerNormRows,
        Gelu,
        Sigmoid,
        Tanh,
    };

    struct Node {
        Op op;
        std::array<Id, 3> parent{-1, -1, -1};
        Matrix value;
        Matrix grad;          // lazily sized in backward()
        double scalar = 0.0;  // Scale constant or LayerNorm eps
        Matrix aux;           // LayerNorm: normalized rows (xhat)
        std::vector<double> aux2;  // LayerNorm: per-row 1/sqrt(var+eps)
    };

    Id push(Node n);
    Matrix& grad_buf(Id id);
    void backprop_node(Id id);

    std::vector<Node> nodes_;
};

} // namespace skillgraph
