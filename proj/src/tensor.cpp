#include "tft/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace tft {

namespace {

thread_local ComputeGraph* g_active_graph = nullptr;

long long shape_count(const std::vector<int>& shape) {
    long long n = 1;
    for (int d : shape) {
        if (d < 0) throw DimensionError("negative dimension in shape " + shape_str(shape));
        n *= d;
    }
    return n;
}

void check_finite(const char* op, const Arr& v) {
    if (!v.allFinite()) {
        throw NumericError(std::string(op) + " produced non-finite values");
    }
}

void require_rank12(const char* op, const Tensor& t) {
    if (t.rank() < 1 || t.rank() > 2) {
        throw DimensionError(std::string(op) + ": unsupported rank for shape " + shape_str(t.shape()));
    }
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                             " vs " + shape_str(b.shape()));
    }
}

bool any_requires_grad(const std::vector<Tensor>& inputs) {
    for (const auto& t : inputs) {
        if (t.requires_grad()) return true;
    }
    return false;
}

Tensor make_result(const char* op, std::vector<int> shape, Arr values,
                   const std::vector<Tensor>& inputs) {
    check_finite(op, values);
    return Tensor::from_array(std::move(shape), std::move(values), any_requires_grad(inputs));
}

void maybe_record(const char* op, std::vector<Tensor> inputs, const Tensor& out,
                  std::function<void()> backward_fn) {
    if (out.requires_grad() && ComputeGraph::active() != nullptr) {
        ComputeGraph::active()->record(op, std::move(inputs), out, std::move(backward_fn));
    }
}

Eigen::Map<const Mat> as_mat(const Tensor& t) { return t.mat(); }

Arr flatten(const Mat& m) {
    return Eigen::Map<const Arr>(m.data(), m.size());
}

// Slices of a rank<=2 tensor along `axis`: rank-1 tensors have one slice,
// rank-2 axis 1 slices are rows, axis 0 slices are columns.
struct SlicePlan {
    int count;        // number of slices
    int len;          // elements per slice
    int step;         // stride between consecutive slice starts
    int elem_stride;  // stride between elements within a slice
};

SlicePlan plan_slices(const char* op, const Tensor& t, int axis) {
    require_rank12(op, t);
    if (t.rank() == 1) {
        if (axis != 0) {
            throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                                 " invalid for shape " + shape_str(t.shape()));
        }
        return {1, t.size(), 0, 1};
    }
    const int r = t.shape()[0], c = t.shape()[1];
    if (axis == 1) return {r, c, c, 1};
    if (axis == 0) return {c, r, 1, c};
    throw DimensionError(std::string(op) + ": axis " + std::to_string(axis) +
                         " invalid for shape " + shape_str(t.shape()));
}

}  // namespace

// ---- Tensor ----------------------------------------------------------------

Tensor Tensor::from_array(std::vector<int> shape, Arr values, bool requires_grad) {
    if (shape_count(shape) != values.size()) {
        throw DimensionError("value count " + std::to_string(values.size()) +
                             " does not match shape " + shape_str(shape));
    }
    Tensor t;
    t.impl_ = std::make_shared<detail::TensorImpl>();
    t.impl_->shape = std::move(shape);
    t.impl_->values = std::move(values);
    t.impl_->requires_grad = requires_grad;
    return t;
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
    const long long n = shape_count(shape);
    return from_array(std::move(shape), Arr::Zero(n), requires_grad);
}

Tensor Tensor::full(std::vector<int> shape, double value, bool requires_grad) {
    const long long n = shape_count(shape);
    return from_array(std::move(shape), Arr::Constant(n, value), requires_grad);
}

Tensor Tensor::from_values(std::vector<int> shape, std::vector<double> values, bool requires_grad) {
    Arr a = Eigen::Map<const Arr>(values.data(), static_cast<Eigen::Index>(values.size()));
    return from_array(std::move(shape), std::move(a), requires_grad);
}

Tensor Tensor::from_matrix(const Eigen::Ref<const Mat>& m, bool requires_grad) {
    Mat copy = m;
    return from_array({static_cast<int>(m.rows()), static_cast<int>(m.cols())}, flatten(copy),
                      requires_grad);
}

Tensor Tensor::vector(std::vector<double> values, bool requires_grad) {
    const int n = static_cast<int>(values.size());
    return from_values({n}, std::move(values), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from_values({1}, {value}, requires_grad);
}

const Arr& Tensor::grad() const {
    if (!has_grad()) throw ContractError("gradient has not been computed for this tensor");
    return impl_->grad;
}

Eigen::Map<const Mat> Tensor::grad_mat() const {
    return Eigen::Map<const Mat>(grad().data(), rows(), cols());
}

void Tensor::accumulate_grad(const Arr& g) const {
    if (g.size() != impl_->values.size()) {
        throw DimensionError("gradient size mismatch: " + std::to_string(g.size()) + " vs " +
                             std::to_string(impl_->values.size()));
    }
    if (impl_->grad.size() == 0) {
        impl_->grad = g;
    } else {
        impl_->grad += g;
    }
}

Tensor Tensor::detach() const {
    return from_array(impl_->shape, impl_->values, false);
}

// ---- ComputeGraph -----------------------------------------------------------

ComputeGraph::ComputeGraph() {
    if (g_active_graph != nullptr) {
        throw ContractError("a compute graph is already active on this thread");
    }
    g_active_graph = this;
}

ComputeGraph::~ComputeGraph() {
    if (g_active_graph == this) g_active_graph = nullptr;
}

ComputeGraph* ComputeGraph::active() { return g_active_graph; }

void ComputeGraph::record(const char* op, std::vector<Tensor> inputs, Tensor output,
                          std::function<void()> backward_fn) {
    records_.push_back({op, std::move(inputs), std::move(output), std::move(backward_fn)});
}

void ComputeGraph::backward(const Tensor& loss) {
    if (consumed_) {
        throw ContractError("backward already ran on this graph; record a new forward pass first");
    }
    if (loss.size() != 1) {
        throw ContractError("backward requires a scalar loss, got shape " + shape_str(loss.shape()));
    }
    if (!loss.requires_grad()) {
        throw ContractError("loss does not depend on any requires_grad tensor");
    }
    consumed_ = true;
    loss.accumulate_grad(Arr::Ones(1));
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
        if (it->output.has_grad()) it->backward_fn();
    }
}

void backward(ComputeGraph& graph, const Tensor& loss) { graph.backward(loss); }

// ---- operations -------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank12("matmul", a);
    require_rank12("matmul", b);
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions disagree, " + shape_str(a.shape()) +
                             " vs " + shape_str(b.shape()));
    }
    Mat c = as_mat(a) * as_mat(b);
    Tensor out = make_result("matmul", {a.rows(), b.cols()}, flatten(c), {a, b});
    maybe_record("matmul", {a, b}, out, [a, b, out] {
        Eigen::Map<const Mat> gc(out.grad().data(), out.rows(), out.cols());
        if (a.requires_grad()) a.accumulate_grad(flatten(Mat(gc * as_mat(b).transpose())));
        if (b.requires_grad()) b.accumulate_grad(flatten(Mat(as_mat(a).transpose() * gc)));
    });
    return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    require_rank12("matmul_nt", a);
    require_rank12("matmul_nt", b);
    if (a.cols() != b.cols()) {
        throw DimensionError("matmul_nt: inner dimensions disagree, " + shape_str(a.shape()) +
                             " vs " + shape_str(b.shape()));
    }
    Mat c = as_mat(a) * as_mat(b).transpose();
    Tensor out = make_result("matmul_nt", {a.rows(), b.rows()}, flatten(c), {a, b});
    maybe_record("matmul_nt", {a, b}, out, [a, b, out] {
        Eigen::Map<const Mat> gc(out.grad().data(), out.rows(), out.cols());
        if (a.requires_grad()) a.accumulate_grad(flatten(Mat(gc * as_mat(b))));
        if (b.requires_grad()) b.accumulate_grad(flatten(Mat(gc.transpose() * as_mat(a))));
    });
    return out;
}

Tensor linear(const Tensor& x, const Tensor& W, const Tensor& b) {
    require_rank12("linear", x);
    require_rank12("linear", W);
    if (x.cols() != W.cols()) {
        throw DimensionError("linear: input dim " + shape_str(x.shape()) +
                             " does not match weight " + shape_str(W.shape()));
    }
    if (b.defined() && b.size() != W.rows()) {
        throw DimensionError("linear: bias length " + shape_str(b.shape()) +
                             " does not match weight " + shape_str(W.shape()));
    }
    Mat y = as_mat(x) * as_mat(W).transpose();
    if (b.defined()) {
        y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.array().data(), b.size());
    }
    std::vector<Tensor> inputs{x, W};
    if (b.defined()) inputs.push_back(b);
    Tensor out = make_result("linear", {x.rows(), W.rows()}, flatten(y), inputs);
    maybe_record("linear", inputs, out, [x, W, b, out] {
        Eigen::Map<const Mat> gy(out.grad().data(), out.rows(), out.cols());
        if (x.requires_grad()) x.accumulate_grad(flatten(Mat(gy * as_mat(W))));
        if (W.requires_grad()) W.accumulate_grad(flatten(Mat(gy.transpose() * as_mat(x))));
        if (b.defined() && b.requires_grad()) {
            b.accumulate_grad(Arr(gy.colwise().sum().transpose().array()));
        }
    });
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape("add", a, b);
    Tensor out = make_result("add", a.shape(), a.array() + b.array(), {a, b});
    maybe_record("add", {a, b}, out, [a, b, out] {
        if (a.requires_grad()) a.accumulate_grad(out.grad());
        if (b.requires_grad()) b.accumulate_grad(out.grad());
    });
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape("sub", a, b);
    Tensor out = make_result("sub", a.shape(), a.array() - b.array(), {a, b});
    maybe_record("sub", {a, b}, out, [a, b, out] {
        if (a.requires_grad()) a.accumulate_grad(out.grad());
        if (b.requires_grad()) b.accumulate_grad(Arr(-out.grad()));
    });
    return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape("hadamard", a, b);
    Tensor out = make_result("hadamard", a.shape(), a.array() * b.array(), {a, b});
    maybe_record("hadamard", {a, b}, out, [a, b, out] {
        if (a.requires_grad()) a.accumulate_grad(Arr(out.grad() * b.array()));
        if (b.requires_grad()) b.accumulate_grad(Arr(out.grad() * a.array()));
    });
    return out;
}

Tensor scale(const Tensor& a, double s) {
    Tensor out = make_result("scale", a.shape(), Arr(a.array() * s), {a});
    maybe_record("scale", {a}, out, [a, s, out] {
        if (a.requires_grad()) a.accumulate_grad(Arr(out.grad() * s));
    });
    return out;
}

Tensor elu(const Tensor& x) {
    Arr y = (x.array() >= 0.0).select(x.array(), x.array().exp() - 1.0);
    Tensor out = make_result("elu", x.shape(), std::move(y), {x});
    maybe_record("elu", {x}, out, [x, out] {
        // d/dx = 1 for x >= 0, exp(x) = y + 1 otherwise
        Arr d = (x.array() >= 0.0).select(Arr::Ones(x.size()), out.array() + 1.0);
        x.accumulate_grad(Arr(out.grad() * d));
    });
    return out;
}

Tensor sigmoid(const Tensor& x) {
    Arr t = (-x.array().abs()).exp();
    Arr y = (x.array() >= 0.0).select(1.0 / (1.0 + t), t / (1.0 + t));
    Tensor out = make_result("sigmoid", x.shape(), std::move(y), {x});
    maybe_record("sigmoid", {x}, out, [x, out] {
        x.accumulate_grad(Arr(out.grad() * out.array() * (1.0 - out.array())));
    });
    return out;
}

Tensor tanh(const Tensor& x) {
    Tensor out = make_result("tanh", x.shape(), Arr(x.array().tanh()), {x});
    maybe_record("tanh", {x}, out, [x, out] {
        x.accumulate_grad(Arr(out.grad() * (1.0 - out.array().square())));
    });
    return out;
}

Tensor relu(const Tensor& x) {
    Tensor out = make_result("relu", x.shape(), Arr(x.array().max(0.0)), {x});
    maybe_record("relu", {x}, out, [x, out] {
        Arr d = (x.array() > 0.0).cast<double>();
        x.accumulate_grad(Arr(out.grad() * d));
    });
    return out;
}

Tensor softmax(const Tensor& x, int axis) {
    const SlicePlan p = plan_slices("softmax", x, axis);
    Arr y(x.size());
    const Arr& v = x.array();
    for (int s = 0; s < p.count; ++s) {
        const int base = s * p.step;
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < p.len; ++i) mx = std::max(mx, v[base + i * p.elem_stride]);
        double total = 0.0;
        for (int i = 0; i < p.len; ++i) {
            const int idx = base + i * p.elem_stride;
            y[idx] = std::exp(v[idx] - mx);
            total += y[idx];
        }
        for (int i = 0; i < p.len; ++i) y[base + i * p.elem_stride] /= total;
    }
    Tensor out = make_result("softmax", x.shape(), std::move(y), {x});
    maybe_record("softmax", {x}, out, [x, out, p] {
        const Arr& g = out.grad();
        const Arr& yv = out.array();
        Arr gx(x.size());
        for (int s = 0; s < p.count; ++s) {
            const int base = s * p.step;
            double dot = 0.0;
            for (int i = 0; i < p.len; ++i) {
                const int idx = base + i * p.elem_stride;
                dot += g[idx] * yv[idx];
            }
            for (int i = 0; i < p.len; ++i) {
                const int idx = base + i * p.elem_stride;
                gx[idx] = yv[idx] * (g[idx] - dot);
            }
        }
        x.accumulate_grad(gx);
    });
    return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, int axis) {
    const SlicePlan p = plan_slices("layer_norm", x, axis);
    if (gain.size() != p.len || bias.size() != p.len) {
        throw DimensionError("layer_norm: affine length " + shape_str(gain.shape()) + "/" +
                             shape_str(bias.shape()) + " does not match normalized axis size " +
                             std::to_string(p.len));
    }
    const Arr& v = x.array();
    const Arr& gn = gain.array();
    const Arr& bs = bias.array();
    Arr y(x.size());
    for (int s = 0; s < p.count; ++s) {
        const int base = s * p.step;
        double mean = 0.0;
        for (int i = 0; i < p.len; ++i) mean += v[base + i * p.elem_stride];
        mean /= p.len;
        double var = 0.0;
        for (int i = 0; i < p.len; ++i) {
            const double d = v[base + i * p.elem_stride] - mean;
            var += d * d;
        }
        var /= p.len;
        const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        for (int i = 0; i < p.len; ++i) {
            const int idx = base + i * p.elem_stride;
            y[idx] = gn[i] * ((v[idx] - mean) * inv) + bs[i];
        }
    }
    Tensor out = make_result("layer_norm", x.shape(), std::move(y), {x, gain, bias});
    maybe_record("layer_norm", {x, gain, bias}, out, [x, gain, bias, out, p] {
        const Arr& g = out.grad();
        const Arr& v = x.array();
        const Arr& gn = gain.array();
        Arr gx = Arr::Zero(x.size());
        Arr ggain = Arr::Zero(p.len);
        Arr gbias = Arr::Zero(p.len);
        Arr xhat(p.len), h(p.len);
        for (int s = 0; s < p.count; ++s) {
            const int base = s * p.step;
            double mean = 0.0;
            for (int i = 0; i < p.len; ++i) mean += v[base + i * p.elem_stride];
            mean /= p.len;
            double var = 0.0;
            for (int i = 0; i < p.len; ++i) {
                const double d = v[base + i * p.elem_stride] - mean;
                var += d * d;
            }
            var /= p.len;
            const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
            double h_mean = 0.0, hx_mean = 0.0;
            for (int i = 0; i < p.len; ++i) {
                const int idx = base + i * p.elem_stride;
                xhat[i] = (v[idx] - mean) * inv;
                h[i] = g[idx] * gn[i];
                ggain[i] += g[idx] * xhat[i];
                gbias[i] += g[idx];
                h_mean += h[i];
                hx_mean += h[i] * xhat[i];
            }
            h_mean /= p.len;
            hx_mean /= p.len;
            for (int i = 0; i < p.len; ++i) {
                gx[base + i * p.elem_stride] = inv * (h[i] - h_mean - xhat[i] * hx_mean);
            }
        }
        if (x.requires_grad()) x.accumulate_grad(gx);
        if (gain.requires_grad()) gain.accumulate_grad(ggain);
        if (bias.requires_grad()) bias.accumulate_grad(gbias);
    });
    return out;
}

Tensor dropout(const Tensor& x, double rate, RngState& rng, bool training) {
    if (rate < 0.0 || rate >= 1.0) {
        throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
    }
    if (!training || rate == 0.0) return x;
    auto mask = std::make_shared<Arr>(x.size());
    const double keep_scale = 1.0 / (1.0 - rate);
    for (int i = 0; i < x.size(); ++i) {
        (*mask)[i] = rng.next_uniform() < rate ? 0.0 : keep_scale;
    }
    Tensor out = make_result("dropout", x.shape(), Arr(x.array() * (*mask)), {x});
    maybe_record("dropout", {x}, out, [x, out, mask] {
        x.accumulate_grad(Arr(out.grad() * (*mask)));
    });
    return out;
}

Tensor sum(const Tensor& x) {
    Tensor out = make_result("sum", {1}, Arr::Constant(1, x.array().sum()), {x});
    maybe_record("sum", {x}, out, [x, out] {
        x.accumulate_grad(Arr(Arr::Constant(x.size(), out.grad()[0])));
    });
    return out;
}

Tensor slice_rows(const Tensor& x, int row_begin, int row_end) {
    require_rank12("slice_rows", x);
    if (row_begin < 0 || row_end > x.rows() || row_begin >= row_end) {
        throw DimensionError("slice_rows: range [" + std::to_string(row_begin) + ", " +
                             std::to_string(row_end) + ") invalid for shape " +
                             shape_str(x.shape()));
    }
    const int n = row_end - row_begin, c = x.cols();
    Mat block = as_mat(x).middleRows(row_begin, n);
    Tensor out = make_result("slice_rows", {n, c}, flatten(block), {x});
    maybe_record("slice_rows", {x}, out, [x, out, row_begin, n, c] {
        Mat full = Mat::Zero(x.rows(), c);
        full.middleRows(row_begin, n) = Eigen::Map<const Mat>(out.grad().data(), n, c);
        x.accumulate_grad(flatten(full));
    });
    return out;
}

Tensor slice_cols(const Tensor& x, int col_begin, int col_end) {
    require_rank12("slice_cols", x);
    if (col_begin < 0 || col_end > x.cols() || col_begin >= col_end) {
        throw DimensionError("slice_cols: range [" + std::to_string(col_begin) + ", " +
                             std::to_string(col_end) + ") invalid for shape " +
                             shape_str(x.shape()));
    }
    const int n = col_end - col_begin, r = x.rows();
    Mat block = as_mat(x).middleCols(col_begin, n);
    Tensor out = make_result("slice_cols", {r, n}, flatten(block), {x});
    maybe_record("slice_cols", {x}, out, [x, out, col_begin, n, r] {
        Mat full = Mat::Zero(r, x.cols());
        full.middleCols(col_begin, n) = Eigen::Map<const Mat>(out.grad().data(), r, n);
        x.accumulate_grad(flatten(full));
    });
    return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw DimensionError("concat_rows: empty input list");
    const int c = parts[0].cols();
    int total = 0;
    for (const auto& t : parts) {
        require_rank12("concat_rows", t);
        if (t.cols() != c) {
            throw DimensionError("concat_rows: column mismatch " + shape_str(t.shape()) +
                                 " vs expected " + std::to_string(c) + " columns");
        }
        total += t.rows();
    }
    Mat y(total, c);
    int r = 0;
    for (const auto& t : parts) {
        y.middleRows(r, t.rows()) = as_mat(t);
        r += t.rows();
    }
    Tensor out = make_result("concat_rows", {total, c}, flatten(y), parts);
    maybe_record("concat_rows", parts, out, [parts, out, c] {
        Eigen::Map<const Mat> g(out.grad().data(), out.rows(), c);
        int r = 0;
        for (const auto& t : parts) {
            if (t.requires_grad()) {
                t.accumulate_grad(flatten(Mat(g.middleRows(r, t.rows()))));
            }
            r += t.rows();
        }
    });
    return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw DimensionError("concat_cols: empty input list");
    const int r = parts[0].rows();
    int total = 0;
    for (const auto& t : parts) {
        require_rank12("concat_cols", t);
        if (t.rows() != r) {
            throw DimensionError("concat_cols: row mismatch " + shape_str(t.shape()) +
                                 " vs expected " + std::to_string(r) + " rows");
        }
        total += t.cols();
    }
    Mat y(r, total);
    int c = 0;
    for (const auto& t : parts) {
        y.middleCols(c, t.cols()) = as_mat(t);
        c += t.cols();
    }
    Tensor out = make_result("concat_cols", {r, total}, flatten(y), parts);
    maybe_record("concat_cols", parts, out, [parts, out, r] {
        Eigen::Map<const Mat> g(out.grad().data(), r, out.cols());
        int c = 0;
        for (const auto& t : parts) {
            if (t.requires_grad()) {
                t.accumulate_grad(flatten(Mat(g.middleCols(c, t.cols()))));
            }
            c += t.cols();
        }
    });
    return out;
}

Tensor rowwise_add(const Tensor& x, const Tensor& v) {
    require_rank12("rowwise_add", x);
    if (v.size() != x.cols()) {
        throw DimensionError("rowwise_add: vector length " + shape_str(v.shape()) +
                             " does not match columns of " + shape_str(x.shape()));
    }
    Mat y = as_mat(x);
    y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(v.array().data(), v.size());
    Tensor out = make_result("rowwise_add", x.shape(), flatten(y), {x, v});
    maybe_record("rowwise_add", {x, v}, out, [x, v, out] {
        Eigen::Map<const Mat> g(out.grad().data(), out.rows(), out.cols());
        if (x.requires_grad()) x.accumulate_grad(out.grad());
        if (v.requires_grad()) v.accumulate_grad(Arr(g.colwise().sum().transpose().array()));
    });
    return out;
}

Tensor rowwise_scale(const Tensor& x, const Tensor& w) {
    require_rank12("rowwise_scale", x);
    if (w.size() != x.rows()) {
        throw DimensionError("rowwise_scale: weight length " + shape_str(w.shape()) +
                             " does not match rows of " + shape_str(x.shape()));
    }
    Mat y = as_mat(x);
    y.array().colwise() *= Eigen::Map<const Eigen::ArrayXd>(w.array().data(), w.size());
    Tensor out = make_result("rowwise_scale", x.shape(), flatten(y), {x, w});
    maybe_record("rowwise_scale", {x, w}, out, [x, w, out] {
        Eigen::Map<const Mat> g(out.grad().data(), out.rows(), out.cols());
        if (x.requires_grad()) {
            Mat gx = g;
            gx.array().colwise() *= Eigen::Map<const Eigen::ArrayXd>(w.array().data(), w.size());
            x.accumulate_grad(flatten(gx));
        }
        if (w.requires_grad()) {
            Arr gw = (g.array() * as_mat(x).array()).rowwise().sum();
            w.accumulate_grad(gw);
        }
    });
    return out;
}

Tensor tile_rows(const Tensor& v, int n) {
    require_rank12("tile_rows", v);
    if (v.rows() != 1) {
        throw DimensionError("tile_rows: expected a single row, got " + shape_str(v.shape()));
    }
    if (n < 1) throw DimensionError("tile_rows: count must be positive");
    Mat y = as_mat(v).replicate(n, 1);
    Tensor out = make_result("tile_rows", {n, v.cols()}, flatten(y), {v});
    maybe_record("tile_rows", {v}, out, [v, out] {
        Eigen::Map<const Mat> g(out.grad().data(), out.rows(), out.cols());
        v.accumulate_grad(Arr(g.colwise().sum().transpose().array()));
    });
    return out;
}

Tensor gather_rows(const Tensor& table, const std::vector<int>& indices) {
    require_rank12("gather_rows", table);
    const int c = table.cols();
    Mat y(static_cast<int>(indices.size()), c);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || indices[i] >= table.rows()) {
            throw DimensionError("gather_rows: index " + std::to_string(indices[i]) +
                                 " out of range for " + shape_str(table.shape()));
        }
        y.row(static_cast<int>(i)) = as_mat(table).row(indices[i]);
    }
    Tensor out = make_result("gather_rows", {static_cast<int>(indices.size()), c}, flatten(y),
                             {table});
    maybe_record("gather_rows", {table}, out, [table, out, indices, c] {
        Eigen::Map<const Mat> g(out.grad().data(), out.rows(), c);
        Mat gt = Mat::Zero(table.rows(), c);
        for (std::size_t i = 0; i < indices.size(); ++i) {
            gt.row(indices[i]) += g.row(static_cast<int>(i));
        }
        table.accumulate_grad(flatten(gt));
    });
    return out;
}

Tensor glorot_uniform(int rows, int cols, RngState& rng) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    Arr v(static_cast<long long>(rows) * cols);
    for (int i = 0; i < v.size(); ++i) v[i] = rng.next_uniform(-limit, limit);
    return Tensor::from_array({rows, cols}, std::move(v), true);
}

}  // namespace tft
