#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

namespace coverpath {

// Dense 64-bit float tensor with tape-based reverse-mode autodiff.
//
// Every operation builds a node that keeps handles to its parents and a
// closure that maps the node's gradient buffer onto the parents' buffers.
// backward() topologically sorts the graph reachable from a scalar output,
// seeds its gradient with 1 and runs the closures in reverse order. Leaves
// (parameters) accumulate into their gradient buffers, which the optimizer
// consumes. Reshape is a zero-copy view: data and gradient buffers are
// shared with the base tensor, so no closure is needed.
//
// Gradient recording is controlled by a global flag (NoGradGuard); with the
// flag off, ops produce plain value tensors and no graph is retained.

struct TensorImpl;

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape);
  static Tensor full(std::vector<int> shape, double value);
  static Tensor from(std::vector<int> shape, std::vector<double> values);
  static Tensor scalar(double value);

  bool defined() const { return impl_ != nullptr; }
  const std::vector<int>& shape() const;
  int dim(int i) const { return shape()[static_cast<size_t>(i)]; }
  int rank() const { return static_cast<int>(shape().size()); }
  int size() const;

  double* data();
  const double* data() const;
  double value() const;  // single-element tensors
  double at(std::initializer_list<int> idx) const;

  // Marks this tensor as a learnable leaf: allocates a gradient buffer.
  void set_requires_grad();
  bool has_grad() const;
  double* grad();
  const double* grad() const;
  void zero_grad();

  void backward();
  Tensor detach() const;  // value copy, no graph

  TensorImpl* impl() const { return impl_.get(); }

 private:
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<TensorImpl> impl_;
  friend Tensor make_node(std::vector<int> shape, std::vector<Tensor> parents);
  friend Tensor make_view(std::vector<int> shape, const Tensor& base);
};

bool grad_enabled();

struct NoGradGuard {
  NoGradGuard();
  ~NoGradGuard();
  bool prev;
};

// ---- elementwise ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor sigmoid(const Tensor& a);
Tensor tanh_op(const Tensor& a);
Tensor relu(const Tensor& a);

// ---- shape ----
Tensor reshape(const Tensor& a, std::vector<int> shape);  // zero-copy view
Tensor slice_cols(const Tensor& a, int start, int len);   // 2D
// 3D: B x X x Y  ->  B x Y x X
Tensor transpose_12(const Tensor& a);
// B x P x D  ->  (B*heads) x P x (D/heads)
Tensor split_heads(const Tensor& a, int heads);
// (B*heads) x P x dh  ->  B x P x (heads*dh)
Tensor merge_heads(const Tensor& a, int heads);

// ---- linear algebra ----
// 2D matmul; transA/transB select op(A) = A or A^T.
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a = false,
              bool trans_b = false);
// Batched 3D matmul over the leading dimension; transB transposes each slice.
Tensor bmm(const Tensor& a, const Tensor& b, bool trans_b = false);
Tensor add_row_bias(const Tensor& x, const Tensor& bias);     // (R x C) + (C)
Tensor add_tiled_rows(const Tensor& x, const Tensor& table);  // ((B*P) x D) + (P x D)

// ---- reductions / selections ----
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);
Tensor pick_per_row(const Tensor& x, const std::vector<int>& idx);  // (R x C) -> (R)

// ---- nonlinear rows ----
Tensor softmax_rows(const Tensor& a);      // 2D, stable
Tensor log_softmax_rows(const Tensor& a);  // 2D, max-shift

// ---- spatial ----
// x: B x Cin x H x W, w: Cout x Cin x kh x kw, bias: Cout. Cross-correlation.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int pad);
// 2x2/stride-2 max pool; odd extents are replication-padded.
Tensor maxpool2x2(const Tensor& x);

}  // namespace coverpath
