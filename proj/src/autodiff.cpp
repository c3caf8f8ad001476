#include "skillgraph/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace skillgraph {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double gelu_value(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_derivative(double x) {
    return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

} // namespace

Tape::Id Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::leaf(Matrix value) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::Id Tape::matmul(Id a, Id b) {
    Node n;
    n.op = Op::MatMul;
    n.parent = {a, b, -1};
    n.value = skillgraph::matmul(value(a), value(b));
    return push(std::move(n));
}

Tape::Id Tape::transpose(Id a) {
    Node n;
    n.op = Op::Transpose;
    n.parent = {a, -1, -1};
    n.value = transposed(value(a));
    return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (!va.same_shape(vb)) throw std::invalid_argument("Tape::add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.parent = {a, b, -1};
    n.value = va;
    add_in_place(n.value, vb);
    return push(std::move(n));
}

Tape::Id Tape::add_row_broadcast(Id a, Id bias) {
    const Matrix& va = value(a);
    const Matrix& vb = value(bias);
    if (vb.rows != 1 || vb.cols != va.cols) throw std::invalid_argument("Tape::add_row_broadcast: bias must be 1 x cols");
    Node n;
    n.op = Op::AddRowBroadcast;
    n.parent = {a, bias, -1};
    n.value = va;
    for (std::size_t i = 0; i < va.rows; ++i)
        for (std::size_t j = 0; j < va.cols; ++j) n.value.at(i, j) += vb.at(0, j);
    return push(std::move(n));
}

Tape::Id Tape::add_scalar(Id a, Id s) {
    const Matrix& vs = value(s);
    if (vs.rows != 1 || vs.cols != 1) throw std::invalid_argument("Tape::add_scalar: s must be 1 x 1");
    Node n;
    n.op = Op::AddScalar;
    n.parent = {a, s, -1};
    n.value = value(a);
    for (double& v : n.value.data) v += vs.at(0, 0);
    return push(std::move(n));
}

Tape::Id Tape::scale(Id a, double c) {
    Node n;
    n.op = Op::Scale;
    n.parent = {a, -1, -1};
    n.scalar = c;
    n.value = value(a);
    scale_in_place(n.value, c);
    return push(std::move(n));
}

Tape::Id Tape::hadamard(Id a, Id b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (!va.same_shape(vb)) throw std::invalid_argument("Tape::hadamard: shape mismatch");
    Node n;
    n.op = Op::Hadamard;
    n.parent = {a, b, -1};
    n.value = va;
    for (std::size_t i = 0; i < va.data.size(); ++i) n.value.data[i] *= vb.data[i];
    return push(std::move(n));
}

Tape::Id Tape::concat_cols(Id a, Id b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (va.rows != vb.rows) throw std::invalid_argument("Tape::concat_cols: row counts disagree");
    Node n;
    n.op = Op::ConcatCols;
    n.parent = {a, b, -1};
    n.value = Matrix(va.rows, va.cols + vb.cols);
    for (std::size_t i = 0; i < va.rows; ++i) {
        for (std::size_t j = 0; j < va.cols; ++j) n.value.at(i, j) = va.at(i, j);
        for (std::size_t j = 0; j < vb.cols; ++j) n.value.at(i, va.cols + j) = vb.at(i, j);
    }
    return push(std::move(n));
}

Tape::Id Tape::repeat_rows(Id a, std::size_t m) {
    const Matrix& va = value(a);
    if (va.rows != 1) throw std::invalid_argument("Tape::repeat_rows: input must be a row vector");
    Node n;
    n.op = Op::RepeatRows;
    n.parent = {a, -1, -1};
    n.value = Matrix(m, va.cols);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < va.cols; ++j) n.value.at(i, j) = va.at(0, j);
    return push(std::move(n));
}

Tape::Id Tape::softmax_rows(Id a) {
    const Matrix& va = value(a);
    Node n;
    n.op = Op::SoftmaxRows;
    n.parent = {a, -1, -1};
    n.value = Matrix(va.rows, va.cols);
    for (std::size_t i = 0; i < va.rows; ++i) {
        double mx = va.at(i, 0);
        for (std::size_t j = 1; j < va.cols; ++j) mx = std::max(mx, va.at(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < va.cols; ++j) {
            double e = std::exp(va.at(i, j) - mx);
            n.value.at(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < va.cols; ++j) n.value.at(i, j) /= sum;
    }
    return push(std::move(n));
}

Tape::Id Tape::layer_norm_rows(Id x, Id gamma, Id beta, double eps) {
    const Matrix& vx = value(x);
    const Matrix& vg = value(gamma);
    const Matrix& vb = value(beta);
    if (vg.rows != 1 || vg.cols != vx.cols || vb.rows != 1 || vb.cols != vx.cols)
        throw std::invalid_argument("Tape::layer_norm_rows: gamma/beta must be 1 x cols");
    Node n;
    n.op = Op::LayerNormRows;
    n.parent = {x, gamma, beta};
    n.scalar = eps;
    n.value = Matrix(vx.rows, vx.cols);
    n.aux = Matrix(vx.rows, vx.cols);
    n.aux2.resize(vx.rows);
    const double inv_n = 1.0 / static_cast<double>(vx.cols);
    for (std::size_t i = 0; i < vx.rows; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < vx.cols; ++j) mean += vx.at(i, j);
        mean *= inv_n;
        double var = 0.0;
        for (std::size_t j = 0; j < vx.cols; ++j) {
            double d = vx.at(i, j) - mean;
            var += d * d;
        }
        var *= inv_n;
        double inv_std = 1.0 / std::sqrt(var + eps);
        n.aux2[i] = inv_std;
        for (std::size_t j = 0; j < vx.cols; ++j) {
            double xhat = (vx.at(i, j) - mean) * inv_std;
            n.aux.at(i, j) = xhat;
            n.value.at(i, j) = vg.at(0, j) * xhat + vb.at(0, j);
        }
    }
    return push(std::move(n));
}

Tape::Id Tape::gelu(Id a) {
    Node n;
    n.op = Op::Gelu;
    n.parent = {a, -1, -1};
    n.value = value(a);
    for (double& v : n.value.data) v = gelu_value(v);
    return push(std::move(n));
}

Tape::Id Tape::sigmoid(Id a) {
    Node n;
    n.op = Op::Sigmoid;
    n.parent = {a, -1, -1};
    n.value = value(a);
    for (double& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(n));
}

Tape::Id Tape::tanh_fn(Id a) {
    Node n;
    n.op = Op::Tanh;
    n.parent = {a, -1, -1};
    n.value = value(a);
    for (double& v : n.value.data) v = std::tanh(v);
    return push(std::move(n));
}

Matrix& Tape::grad_buf(Id id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.rows != n.value.rows || n.grad.cols != n.value.cols) {
        n.grad = Matrix(n.value.rows, n.value.cols);
    }
    return n.grad;
}

void Tape::backward(Id output, const Matrix& seed) {
    Node& out = nodes_[static_cast<std::size_t>(output)];
    if (!seed.same_shape(out.value)) throw std::invalid_argument("Tape::backward: seed shape mismatch");
    for (Node& n : nodes_) n.grad = Matrix();
    grad_buf(output) = seed;
    for (Id id = output; id >= 0; --id) backprop_node(id);
}

void Tape::backprop_node(Id id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.data.empty()) return;  // nothing flowed into this node
    const Matrix& g = n.grad;
    switch (n.op) {
        case Op::Leaf:
            break;
        case Op::MatMul: {
            const Matrix& a = value(n.parent[0]);
            const Matrix& b = value(n.parent[1]);
            add_in_place(grad_buf(n.parent[0]), skillgraph::matmul(g, transposed(b)));
            add_in_place(grad_buf(n.parent[1]), skillgraph::matmul(transposed(a), g));
            break;
        }
        case Op::Transpose:
            add_in_place(grad_buf(n.parent[0]), transposed(g));
            break;
        case Op::Add:
            add_in_place(grad_buf(n.parent[0]), g);
            add_in_place(grad_buf(n.parent[1]), g);
            break;
        case Op::AddRowBroadcast: {
            add_in_place(grad_buf(n.parent[0]), g);
            Matrix& gb = grad_buf(n.parent[1]);
            for (std::size_t i = 0; i < g.rows; ++i)
                for (std::size_t j = 0; j < g.cols; ++j) gb.at(0, j) += g.at(i, j);
            break;
        }
        case Op::AddScalar: {
            add_in_place(grad_buf(n.parent[0]), g);
            double total = 0.0;
            for (double v : g.data) total += v;
            grad_buf(n.parent[1]).at(0, 0) += total;
            break;
        }
        case Op::Scale: {
            Matrix ga = g;
            scale_in_place(ga, n.scalar);
            add_in_place(grad_buf(n.parent[0]), ga);
            break;
        }
        case Op::Hadamard: {
            const Matrix& a = value(n.parent[0]);
            const Matrix& b = value(n.parent[1]);
            Matrix ga = g, gb = g;
            for (std::size_t i = 0; i < g.data.size(); ++i) {
                ga.data[i] *= b.data[i];
                gb.data[i] *= a.data[i];
            }
            add_in_place(grad_buf(n.parent[0]), ga);
            add_in_place(grad_buf(n.parent[1]), gb);
            break;
        }
        case Op::ConcatCols: {
            Matrix& ga = grad_buf(n.parent[0]);
            Matrix& gb = grad_buf(n.parent[1]);
            for (std::size_t i = 0; i < g.rows; ++i) {
                for (std::size_t j = 0; j < ga.cols; ++j) ga.at(i, j) += g.at(i, j);
                for (std::size_t j = 0; j < gb.cols; ++j) gb.at(i, j) += g.at(i, ga.cols + j);
            }
            break;
        }
        case Op::RepeatRows: {
            Matrix& ga = grad_buf(n.parent[0]);
            for (std::size_t i = 0; i < g.rows; ++i)
                for (std::size_t j = 0; j < g.cols; ++j) ga.at(0, j) += g.at(i, j);
            break;
        }
        case Op::SoftmaxRows: {
            // dx = y * (dy - <dy, y>) per row
            const Matrix& y = n.value;
            Matrix& ga = grad_buf(n.parent[0]);
            for (std::size_t i = 0; i < y.rows; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < y.cols; ++j) dot += g.at(i, j) * y.at(i, j);
                for (std::size_t j = 0; j < y.cols; ++j) ga.at(i, j) += y.at(i, j) * (g.at(i, j) - dot);
            }
            break;
        }
        case Op::LayerNormRows: {
            const Matrix& gamma = value(n.parent[1]);
            const Matrix& xhat = n.aux;
            Matrix& gx = grad_buf(n.parent[0]);
            Matrix& gg = grad_buf(n.parent[1]);
            Matrix& gb = grad_buf(n.parent[2]);
            const std::size_t cols = g.cols;
            const double inv_n = 1.0 / static_cast<double>(cols);
            for (std::size_t i = 0; i < g.rows; ++i) {
                double mean_dxhat = 0.0;
                double mean_dxhat_xhat = 0.0;
                for (std::size_t j = 0; j < cols; ++j) {
                    const double dy = g.at(i, j);
                    gg.at(0, j) += dy * xhat.at(i, j);
                    gb.at(0, j) += dy;
                    const double dxhat = dy * gamma.at(0, j);
                    mean_dxhat += dxhat;
                    mean_dxhat_xhat += dxhat * xhat.at(i, j);
                }
                mean_dxhat *= inv_n;
                mean_dxhat_xhat *= inv_n;
                const double inv_std = n.aux2[i];
                for (std::size_t j = 0; j < cols; ++j) {
                    const double dxhat = g.at(i, j) * gamma.at(0, j);
                    gx.at(i, j) += inv_std * (dxhat - mean_dxhat - xhat.at(i, j) * mean_dxhat_xhat);
                }
            }
            break;
        }
        case Op::Gelu: {
            const Matrix& x = value(n.parent[0]);
            Matrix ga = g;
            for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] *= gelu_derivative(x.data[i]);
            add_in_place(grad_buf(n.parent[0]), ga);
            break;
        }
        case Op::Sigmoid: {
            const Matrix& y = n.value;
            Matrix ga = g;
            for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] *= y.data[i] * (1.0 - y.data[i]);
            add_in_place(grad_buf(n.parent[0]), ga);
            break;
        }
        case Op::Tanh: {
            const Matrix& y = n.value;
            Matrix ga = g;
            for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] *= 1.0 - y.data[i] * y.data[i];
            add_in_place(grad_buf(n.parent[0]), ga);
            break;
        }
    }
}

} // namespace skillgraph
