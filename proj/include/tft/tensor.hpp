#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tft/errors.hpp"
#include "tft/rng.hpp"

namespace tft {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Arr = Eigen::ArrayXd;

class ComputeGraph;

namespace detail {
struct TensorImpl {
    std::vector<int> shape;  // rank 1 or 2
    Arr values;              // row-major flat storage
    Arr grad;                // zero-length until first accumulation
    bool requires_grad = false;
};
}  // namespace detail

// Dense 64-bit tensor with value semantics on a shared immutable buffer.
// Rank is 1 or 2; a rank-1 tensor of length n behaves as a 1-by-n matrix in
// matrix operations. Mutation entry points exist for leaves only (parameter
// initialization and optimizer steps); operations never modify their inputs.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
    static Tensor full(std::vector<int> shape, double value, bool requires_grad = false);
    static Tensor from_values(std::vector<int> shape, std::vector<double> values,
                              bool requires_grad = false);
    static Tensor from_array(std::vector<int> shape, Arr values, bool requires_grad = false);
    static Tensor from_matrix(const Eigen::Ref<const Mat>& m, bool requires_grad = false);
    static Tensor vector(std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return impl_ != nullptr; }
    const std::vector<int>& shape() const { return impl_->shape; }
    int rank() const { return static_cast<int>(impl_->shape.size()); }
    int size() const { return static_cast<int>(impl_->values.size()); }
    int rows() const { return rank() == 2 ? impl_->shape[0] : 1; }
    int cols() const { return rank() == 2 ? impl_->shape[1] : impl_->shape[0]; }
    bool requires_grad() const { return impl_->requires_grad; }

    double value(int i) const { return impl_->values[i]; }
    double at(int r, int c) const { return impl_->values[r * cols() + c]; }
    const Arr& array() const { return impl_->values; }
    Eigen::Map<const Mat> mat() const {
        return Eigen::Map<const Mat>(impl_->values.data(), rows(), cols());
    }

    bool has_grad() const { return impl_->grad.size() > 0; }
    const Arr& grad() const;
    Eigen::Map<const Mat> grad_mat() const;
    double grad_or_zero(int i) const { return has_grad() ? impl_->grad[i] : 0.0; }
    void zero_grad() const {
        if (impl_ && impl_->grad.size() > 0) impl_->grad.setZero();
    }
    void accumulate_grad(const Arr& g) const;

    // Leaf-only mutation (init, optimizer, finite-difference probes).
    Arr& values_mut() { return impl_->values; }
    void set_value(int i, double v) { impl_->values[i] = v; }

    Tensor detach() const;  // copy of values, requires_grad off

    bool same_impl(const Tensor& other) const { return impl_ == other.impl_; }

private:
    std::shared_ptr<detail::TensorImpl> impl_;
};

// Reverse-mode tape. One graph is active per thread at a time; operations
// executed while it is active append op records when any input requires
// gradients. Destroying the graph releases every recorded activation.
class ComputeGraph {
public:
    ComputeGraph();
    ~ComputeGraph();
    ComputeGraph(const ComputeGraph&) = delete;
    ComputeGraph& operator=(const ComputeGraph&) = delete;

    // Seeds d(loss)/d(loss)=1 and walks the tape once in reverse topological
    // order, accumulating into the grad buffer of every requires_grad tensor.
    void backward(const Tensor& loss);

    std::size_t size() const { return records_.size(); }
    bool consumed() const { return consumed_; }

    static ComputeGraph* active();
    void record(const char* op, std::vector<Tensor> inputs, Tensor output,
                std::function<void()> backward_fn);

private:
    struct OpRecord {
        const char* op;
        std::vector<Tensor> inputs;
        Tensor output;
        std::function<void()> backward_fn;
    };
    std::vector<OpRecord> records_;
    bool consumed_ = false;
};

void backward(ComputeGraph& graph, const Tensor& loss);

// ---- differentiable operations -------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T
// x[n x d_in] * W^T + b, with W[d_out x d_in], b[d_out]; b may be undefined.
Tensor linear(const Tensor& x, const Tensor& W, const Tensor& b = Tensor());

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

Tensor elu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);

// Normalizes along `axis` (rank-1: axis 0; rank-2: axis 1 = within each row).
Tensor softmax(const Tensor& x, int axis);
// Zero mean / unit variance along `axis` with epsilon inside the sqrt,
// then the learnable affine pair.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, int axis);
// Inverted dropout: training zeroes with probability `rate` and rescales
// survivors by 1/(1-rate); eval mode returns the input unchanged.
Tensor dropout(const Tensor& x, double rate, RngState& rng, bool training);

Tensor sum(const Tensor& x);  // scalar
Tensor slice_rows(const Tensor& x, int row_begin, int row_end);
Tensor slice_cols(const Tensor& x, int col_begin, int col_end);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor rowwise_add(const Tensor& x, const Tensor& v);    // v: length cols(x)
Tensor rowwise_scale(const Tensor& x, const Tensor& w);  // w: length rows(x)
Tensor tile_rows(const Tensor& v, int n);
Tensor gather_rows(const Tensor& table, const std::vector<int>& indices);

// Glorot-uniform matrix [rows x cols] with fan sizes (cols -> in, rows -> out).
Tensor glorot_uniform(int rows, int cols, RngState& rng);

constexpr double kLayerNormEps = 1e-5;

}  // namespace tft
