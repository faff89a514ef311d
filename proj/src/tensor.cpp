#include "coverpath/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace coverpath {

struct TensorImpl {
  std::vector<int> shape;
  std::shared_ptr<std::vector<double>> data;
  std::shared_ptr<std::vector<double>> grad;  // null when not part of a grad graph
  std::vector<Tensor> parents;
  // Receives the node itself; closures must not capture the owning Tensor or
  // they would form a shared_ptr cycle and leak the graph.
  std::function<void(TensorImpl&)> backward_fn;
};

namespace {

thread_local bool g_grad_enabled = true;

int shape_size(const std::vector<int>& shape) {
  int n = 1;
  for (int d : shape) n *= d;
  return n;
}

void check(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }
NoGradGuard::NoGradGuard() : prev(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev; }

Tensor Tensor::zeros(std::vector<int> shape) { return full(std::move(shape), 0.0); }

Tensor Tensor::full(std::vector<int> shape, double value) {
  auto impl = std::make_shared<TensorImpl>();
  int n = shape_size(shape);
  impl->shape = std::move(shape);
  impl->data = std::make_shared<std::vector<double>>(static_cast<size_t>(n), value);
  return Tensor(std::move(impl));
}

Tensor Tensor::from(std::vector<int> shape, std::vector<double> values) {
  check(shape_size(shape) == static_cast<int>(values.size()), "from: size mismatch");
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = std::make_shared<std::vector<double>>(std::move(values));
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value) { return from({1}, {value}); }

const std::vector<int>& Tensor::shape() const { return impl_->shape; }
int Tensor::size() const { return shape_size(impl_->shape); }
double* Tensor::data() { return impl_->data->data(); }
const double* Tensor::data() const { return impl_->data->data(); }

double Tensor::value() const {
  check(size() == 1, "value: not a single-element tensor");
  return (*impl_->data)[0];
}

double Tensor::at(std::initializer_list<int> idx) const {
  const auto& s = impl_->shape;
  check(idx.size() == s.size(), "at: rank mismatch");
  int flat = 0;
  size_t i = 0;
  for (int v : idx) {
    flat = flat * s[i] + v;
    ++i;
  }
  return (*impl_->data)[static_cast<size_t>(flat)];
}

void Tensor::set_requires_grad() {
  if (!impl_->grad)
    impl_->grad = std::make_shared<std::vector<double>>(static_cast<size_t>(size()), 0.0);
}

bool Tensor::has_grad() const { return impl_ && impl_->grad != nullptr; }
double* Tensor::grad() { return impl_->grad->data(); }
const double* Tensor::grad() const { return impl_->grad->data(); }

void Tensor::zero_grad() {
  if (impl_->grad) std::fill(impl_->grad->begin(), impl_->grad->end(), 0.0);
}

Tensor Tensor::detach() const {
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = impl_->shape;
  impl->data = std::make_shared<std::vector<double>>(*impl_->data);
  return Tensor(std::move(impl));
}

void Tensor::backward() {
  check(size() == 1, "backward: output must be scalar");
  check(impl_->grad != nullptr, "backward: output not part of a grad graph");
  // Iterative post-order DFS. Views share grad buffers with their base and
  // carry a null backward_fn, so visiting them is a no-op pass-through.
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> seen;
  std::vector<std::pair<TensorImpl*, size_t>> stack;
  stack.push_back({impl_.get(), 0});
  seen.insert(impl_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      TensorImpl* p = node->parents[next].impl();
      ++next;
      if (p->grad && !seen.count(p)) {
        seen.insert(p);
        stack.push_back({p, 0});
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  // Intermediate gradient buffers are scratch space: clear them so repeated
  // backward passes (or graphs that reuse an intermediate) stay correct.
  // Leaf buffers keep accumulating across calls; views may alias a leaf's
  // buffer, so aliases of leaf storage are left untouched too.
  std::unordered_set<const std::vector<double>*> leaf_bufs;
  for (TensorImpl* node : order)
    if (node->parents.empty()) leaf_bufs.insert(node->grad.get());
  for (TensorImpl* node : order)
    if (!node->parents.empty() && !leaf_bufs.count(node->grad.get()))
      std::fill(node->grad->begin(), node->grad->end(), 0.0);
  (*impl_->grad)[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward_fn) (*it)->backward_fn(**it);
}

// Allocates the result node; wires parents and grad buffer when recording.
Tensor make_node(std::vector<int> shape, std::vector<Tensor> parents) {
  auto impl = std::make_shared<TensorImpl>();
  int n = shape_size(shape);
  impl->shape = std::move(shape);
  impl->data = std::make_shared<std::vector<double>>(static_cast<size_t>(n), 0.0);
  if (g_grad_enabled) {
    bool any = false;
    for (const auto& p : parents)
      if (p.has_grad()) any = true;
    if (any) {
      impl->grad = std::make_shared<std::vector<double>>(static_cast<size_t>(n), 0.0);
      impl->parents = std::move(parents);
    }
  }
  return Tensor(std::move(impl));
}

Tensor make_view(std::vector<int> shape, const Tensor& base) {
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->data = base.impl()->data;
  if (g_grad_enabled && base.has_grad()) {
    impl->grad = base.impl()->grad;
    impl->parents = {base};
  }
  return Tensor(std::move(impl));
}

namespace {

void set_backward(Tensor& t, std::function<void(TensorImpl&)> fn) {
  if (t.has_grad()) t.impl()->backward_fn = std::move(fn);
}

double* grad_of(const Tensor& t) { return t.impl()->grad->data(); }

// C(m x n) += or = A(m x k) * B(k x n). The k-middle loop keeps every C row
// accumulating in a fixed order (deterministic) while vectorizing over n.
void mm(double* C, const double* A, const double* B, int m, int k, int n,
        bool accumulate) {
  for (int i = 0; i < m; ++i) {
    double* c = C + static_cast<size_t>(i) * n;
    if (!accumulate) std::memset(c, 0, sizeof(double) * static_cast<size_t>(n));
    const double* a = A + static_cast<size_t>(i) * k;
    for (int l = 0; l < k; ++l) {
      double av = a[l];
      const double* b = B + static_cast<size_t>(l) * n;
      for (int j = 0; j < n; ++j) c[j] += av * b[j];
    }
  }
}

std::vector<double> transpose_copy(const double* src, int rows, int cols) {
  std::vector<double> out(static_cast<size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out[static_cast<size_t>(j) * rows + i] = src[static_cast<size_t>(i) * cols + j];
  return out;
}

}  // namespace

// ---------------- elementwise ----------------

Tensor add(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), "add: shape mismatch");
  Tensor out = make_node(a.shape(), {a, b});
  int n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (int i = 0; i < n; ++i) po[i] = pa[i] + pb[i];
  set_backward(out, [a, b, n](TensorImpl& self) {
    const double* g = self.grad->data();
    if (a.has_grad()) {
      double* d = grad_of(a);
      for (int i = 0; i < n; ++i) d[i] += g[i];
    }
    if (b.has_grad()) {
      double* d = grad_of(b);
      for (int i = 0; i < n; ++i) d[i] += g[i];
    }
  });
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), "sub: shape mismatch");
  Tensor out = make_node(a.shape(), {a, b});
  int n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (int i = 0; i < n; ++i) po[i] = pa[i] - pb[i];
  set_backward(out, [a, b, n](TensorImpl& self) {
    const double* g = self.grad->data();
    if (a.has_grad()) {
      double* d = grad_of(a);
      for (int i = 0; i < n; ++i) d[i] += g[i];
    }
    if (b.has_grad()) {
      double* d = grad_of(b);
      for (int i = 0; i < n; ++i) d[i] -= g[i];
    }
  });
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), "mul: shape mismatch");
  Tensor out = make_node(a.shape(), {a, b});
  int n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (int i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
  set_backward(out, [a, b, n](TensorImpl& self) {
    const double* g = self.grad->data();
    const double* pa = a.data();
    const double* pb = b.data();
    if (a.has_grad()) {
      double* d = grad_of(a);
      for (int i = 0; i < n; ++i) d[i] += g[i] * pb[i];
    }
    if (b.has_grad()) {
      double* d = grad_of(b);
      for (int i = 0; i < n; ++i) d[i] += g[i] * pa[i];
    }
  });
  return out;
}

Tensor scale(const Tensor& a, double s) {
  Tensor out = make_node(a.shape(), {a});
  int n = a.size();
  const double* pa = a.data();
  double* po = out.data();
  for (int i = 0; i < n; ++i) po[i] = pa[i] * s;
  set_backward(out, [a, n, s](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(a);
    for (int i = 0; i < n; ++i) d[i] += s * g[i];
  });
  return out;
}

Tensor add_scalar(const Tensor& a, double s) {
  Tensor out = make_node(a.shape(), {a});
  int n = a.size();
  const double* pa = a.data();
  double* po = out.data();
  for (int i = 0; i < n; ++i) po[i] = pa[i] + s;
  set_backward(out, [a, n](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(a);
    for (int i = 0; i < n; ++i) d[i] += g[i];
  });
  return out;
}

namespace {

template <typename F, typename DF>
Tensor unary_from_output(const Tensor& a, F f, DF df_of_output) {
  Tensor out = make_node(a.shape(), {a});
  int n = a.size();
  const double* pa = a.data();
  double* po = out.data();
  for (int i = 0; i < n; ++i) po[i] = f(pa[i]);
  set_backward(out, [a, n, df_of_output](TensorImpl& self) {
    const double* g = self.grad->data();
    const double* y = self.data->data();
    double* d = grad_of(a);
    for (int i = 0; i < n; ++i) d[i] += g[i] * df_of_output(y[i]);
  });
  return out;
}

}  // namespace

Tensor sigmoid(const Tensor& a) {
  return unary_from_output(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double y) { return y * (1.0 - y); });
}

Tensor tanh_op(const Tensor& a) {
  return unary_from_output(a, [](double x) { return std::tanh(x); },
                           [](double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary_from_output(a, [](double x) { return x > 0.0 ? x : 0.0; },
                           [](double y) { return y > 0.0 ? 1.0 : 0.0; });
}

// ---------------- shape ----------------

Tensor reshape(const Tensor& a, std::vector<int> shape) {
  check(shape_size(shape) == a.size(), "reshape: size mismatch");
  return make_view(std::move(shape), a);
}

Tensor slice_cols(const Tensor& a, int start, int len) {
  check(a.rank() == 2, "slice_cols: want 2D");
  int rows = a.dim(0), cols = a.dim(1);
  check(start >= 0 && len > 0 && start + len <= cols, "slice_cols: out of range");
  Tensor out = make_node({rows, len}, {a});
  const double* pa = a.data();
  double* po = out.data();
  for (int i = 0; i < rows; ++i)
    std::memcpy(po + static_cast<size_t>(i) * len,
                pa + static_cast<size_t>(i) * cols + start,
                sizeof(double) * static_cast<size_t>(len));
  set_backward(out, [a, rows, cols, start, len](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(a);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < len; ++j)
        d[static_cast<size_t>(i) * cols + start + j] += g[static_cast<size_t>(i) * len + j];
  });
  return out;
}

Tensor transpose_12(const Tensor& a) {
  check(a.rank() == 3, "transpose_12: want 3D");
  int B = a.dim(0), X = a.dim(1), Y = a.dim(2);
  Tensor out = make_node({B, Y, X}, {a});
  const double* pa = a.data();
  double* po = out.data();
  for (int b = 0; b < B; ++b) {
    const double* src = pa + static_cast<size_t>(b) * X * Y;
    double* dst = po + static_cast<size_t>(b) * X * Y;
    for (int i = 0; i < X; ++i)
      for (int j = 0; j < Y; ++j)
        dst[static_cast<size_t>(j) * X + i] = src[static_cast<size_t>(i) * Y + j];
  }
  set_backward(out, [a, B, X, Y](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(a);
    for (int b = 0; b < B; ++b) {
      const double* src = g + static_cast<size_t>(b) * X * Y;
      double* dst = d + static_cast<size_t>(b) * X * Y;
      for (int i = 0; i < X; ++i)
        for (int j = 0; j < Y; ++j)
          dst[static_cast<size_t>(i) * Y + j] += src[static_cast<size_t>(j) * X + i];
    }
  });
  return out;
}

Tensor split_heads(const Tensor& a, int heads) {
  check(a.rank() == 3, "split_heads: want 3D");
  int B = a.dim(0), P = a.dim(1), D = a.dim(2);
  check(D % heads == 0, "split_heads: D not divisible by heads");
  int dh = D / heads;
  Tensor out = make_node({B * heads, P, dh}, {a});
  const double* pa = a.data();
  double* po = out.data();
  for (int b = 0; b < B; ++b)
    for (int h = 0; h < heads; ++h)
      for (int p = 0; p < P; ++p)
        std::memcpy(po + ((static_cast<size_t>(b) * heads + h) * P + p) * dh,
                    pa + (static_cast<size_t>(b) * P + p) * D + h * dh,
                    sizeof(double) * static_cast<size_t>(dh));
  set_backward(out, [a, B, P, D, heads, dh](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(a);
    for (int b = 0; b < B; ++b)
      for (int h = 0; h < heads; ++h)
        for (int p = 0; p < P; ++p) {
          const double* src = g + ((static_cast<size_t>(b) * heads + h) * P + p) * dh;
          double* dst = d + (static_cast<size_t>(b) * P + p) * D + h * dh;
          for (int j = 0; j < dh; ++j) dst[j] += src[j];
        }
  });
  return out;
}

Tensor merge_heads(const Tensor& a, int heads) {
  check(a.rank() == 3, "merge_heads: want 3D");
  check(a.dim(0) % heads == 0, "merge_heads: bad batch");
  int B = a.dim(0) / heads, P = a.dim(1), dh = a.dim(2);
  int D = heads * dh;
  Tensor out = make_node({B, P, D}, {a});
  const double* pa = a.data();
  double* po = out.data();
  for (int b = 0; b < B; ++b)
    for (int h = 0; h < heads; ++h)
      for (int p = 0; p < P; ++p)
        std::memcpy(po + (static_cast<size_t>(b) * P + p) * D + h * dh,
                    pa + ((static_cast<size_t>(b) * heads + h) * P + p) * dh,
                    sizeof(double) * static_cast<size_t>(dh));
  set_backward(out, [a, B, P, dh, heads, D](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(a);
    for (int b = 0; b < B; ++b)
      for (int h = 0; h < heads; ++h)
        for (int p = 0; p < P; ++p) {
          const double* src = g + (static_cast<size_t>(b) * P + p) * D + h * dh;
          double* dst = d + ((static_cast<size_t>(b) * heads + h) * P + p) * dh;
          for (int j = 0; j < dh; ++j) dst[j] += src[j];
        }
  });
  return out;
}

// ---------------- linear algebra ----------------

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
  check(a.rank() == 2 && b.rank() == 2, "matmul: want 2D");
  int m = trans_a ? a.dim(1) : a.dim(0);
  int k = trans_a ? a.dim(0) : a.dim(1);
  int kb = trans_b ? b.dim(1) : b.dim(0);
  int n = trans_b ? b.dim(0) : b.dim(1);
  check(k == kb, "matmul: inner dims differ");
  Tensor out = make_node({m, n}, {a, b});
  {
    const double* pa = a.data();
    const double* pb = b.data();
    std::vector<double> at, bt;
    if (trans_a) {
      at = transpose_copy(pa, a.dim(0), a.dim(1));
      pa = at.data();
    }
    if (trans_b) {
      bt = transpose_copy(pb, b.dim(0), b.dim(1));
      pb = bt.data();
    }
    mm(out.data(), pa, pb, m, k, n, false);
  }
  set_backward(out, [a, b, trans_a, trans_b, m, k, n](TensorImpl& self) {
    const double* g = self.grad->data();
    // Effective op: C = A' * B' with A' (m x k), B' (k x n).
    // dA' = g * B'^T, dB' = A'^T * g; un-transpose into the raw layouts.
    std::vector<double> a_eff, b_eff;
    const double* pa = a.data();
    const double* pb = b.data();
    if (trans_a) {
      a_eff = transpose_copy(pa, a.dim(0), a.dim(1));
      pa = a_eff.data();
    }
    if (trans_b) {
      b_eff = transpose_copy(pb, b.dim(0), b.dim(1));
      pb = b_eff.data();
    }
    if (a.has_grad()) {
      std::vector<double> bt = transpose_copy(pb, k, n);  // B'^T (n x k)
      std::vector<double> da(static_cast<size_t>(m) * k);
      mm(da.data(), g, bt.data(), m, n, k, false);
      double* d = grad_of(a);
      if (!trans_a) {
        for (size_t i = 0; i < da.size(); ++i) d[i] += da[i];
      } else {
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < k; ++j)
            d[static_cast<size_t>(j) * m + i] += da[static_cast<size_t>(i) * k + j];
      }
    }
    if (b.has_grad()) {
      std::vector<double> at = transpose_copy(pa, m, k);  // A'^T (k x m)
      std::vector<double> db(static_cast<size_t>(k) * n);
      mm(db.data(), at.data(), g, k, m, n, false);
      double* d = grad_of(b);
      if (!trans_b) {
        for (size_t i = 0; i < db.size(); ++i) d[i] += db[i];
      } else {
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < n; ++j)
            d[static_cast<size_t>(j) * k + i] += db[static_cast<size_t>(i) * n + j];
      }
    }
  });
  return out;
}

Tensor bmm(const Tensor& a, const Tensor& b, bool trans_b) {
  check(a.rank() == 3 && b.rank() == 3, "bmm: want 3D");
  int B = a.dim(0);
  check(b.dim(0) == B, "bmm: batch mismatch");
  int m = a.dim(1), k = a.dim(2);
  int kb = trans_b ? b.dim(2) : b.dim(1);
  int n = trans_b ? b.dim(1) : b.dim(2);
  check(k == kb, "bmm: inner dims differ");
  Tensor out = make_node({B, m, n}, {a, b});
  {
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (int i = 0; i < B; ++i) {
      const double* as = pa + static_cast<size_t>(i) * m * k;
      const double* bs = pb + static_cast<size_t>(i) * (trans_b ? n * k : k * n);
      double* os = po + static_cast<size_t>(i) * m * n;
      if (!trans_b) {
        mm(os, as, bs, m, k, n, false);
      } else {
        std::vector<double> bt = transpose_copy(bs, n, k);
        mm(os, as, bt.data(), m, k, n, false);
      }
    }
  }
  set_backward(out, [a, b, trans_b, B, m, k, n](TensorImpl& self) {
    const double* g = self.grad->data();
    const double* pa = a.data();
    const double* pb = b.data();
    for (int i = 0; i < B; ++i) {
      const double* gs = g + static_cast<size_t>(i) * m * n;
      const double* as = pa + static_cast<size_t>(i) * m * k;
      const double* bs = pb + static_cast<size_t>(i) * (trans_b ? n * k : k * n);
      if (a.has_grad()) {
        double* da = grad_of(a) + static_cast<size_t>(i) * m * k;
        // dA = g * B^T, or g * B directly when forward used B^T
        if (!trans_b) {
          std::vector<double> bt = transpose_copy(bs, k, n);
          mm(da, gs, bt.data(), m, n, k, true);
        } else {
          mm(da, gs, bs, m, n, k, true);
        }
      }
      if (b.has_grad()) {
        double* db = grad_of(b) + static_cast<size_t>(i) * (trans_b ? n * k : k * n);
        if (!trans_b) {
          std::vector<double> at = transpose_copy(as, m, k);  // k x m
          mm(db, at.data(), gs, k, m, n, true);
        } else {
          // dB = g^T * A, shape n x k
          std::vector<double> gt = transpose_copy(gs, m, n);  // n x m
          mm(db, gt.data(), as, n, m, k, true);
        }
      }
    }
  });
  return out;
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
  check(x.rank() == 2 && bias.rank() == 1, "add_row_bias: shapes");
  int R = x.dim(0), C = x.dim(1);
  check(bias.dim(0) == C, "add_row_bias: width mismatch");
  Tensor out = make_node({R, C}, {x, bias});
  const double* px = x.data();
  const double* pb = bias.data();
  double* po = out.data();
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j)
      po[static_cast<size_t>(i) * C + j] = px[static_cast<size_t>(i) * C + j] + pb[j];
  set_backward(out, [x, bias, R, C](TensorImpl& self) {
    const double* g = self.grad->data();
    if (x.has_grad()) {
      double* d = grad_of(x);
      for (int i = 0; i < R * C; ++i) d[i] += g[i];
    }
    if (bias.has_grad()) {
      double* d = grad_of(bias);
      for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) d[j] += g[static_cast<size_t>(i) * C + j];
    }
  });
  return out;
}

Tensor add_tiled_rows(const Tensor& x, const Tensor& table) {
  check(x.rank() == 2 && table.rank() == 2, "add_tiled_rows: shapes");
  int R = x.dim(0), C = x.dim(1);
  int P = table.dim(0);
  check(table.dim(1) == C && P > 0 && R % P == 0, "add_tiled_rows: tiling mismatch");
  Tensor out = make_node({R, C}, {x, table});
  const double* px = x.data();
  const double* pt = table.data();
  double* po = out.data();
  for (int i = 0; i < R; ++i) {
    const double* trow = pt + static_cast<size_t>(i % P) * C;
    for (int j = 0; j < C; ++j)
      po[static_cast<size_t>(i) * C + j] = px[static_cast<size_t>(i) * C + j] + trow[j];
  }
  set_backward(out, [x, table, R, C, P](TensorImpl& self) {
    const double* g = self.grad->data();
    if (x.has_grad()) {
      double* d = grad_of(x);
      for (int i = 0; i < R * C; ++i) d[i] += g[i];
    }
    if (table.has_grad()) {
      double* d = grad_of(table);
      for (int i = 0; i < R; ++i) {
        double* drow = d + static_cast<size_t>(i % P) * C;
        for (int j = 0; j < C; ++j) drow[j] += g[static_cast<size_t>(i) * C + j];
      }
    }
  });
  return out;
}

// ---------------- reductions / selections ----------------

Tensor sum_all(const Tensor& a) {
  Tensor out = make_node({1}, {a});
  int n = a.size();
  const double* pa = a.data();
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += pa[i];
  out.data()[0] = s;
  set_backward(out, [a, n](TensorImpl& self) {
    double g = (*self.grad)[0];
    double* d = grad_of(a);
    for (int i = 0; i < n; ++i) d[i] += g;
  });
  return out;
}

Tensor mean_all(const Tensor& a) { return scale(sum_all(a), 1.0 / a.size()); }

Tensor pick_per_row(const Tensor& x, const std::vector<int>& idx) {
  check(x.rank() == 2, "pick_per_row: want 2D");
  int R = x.dim(0), C = x.dim(1);
  check(static_cast<int>(idx.size()) == R, "pick_per_row: index count");
  for (int v : idx) check(v >= 0 && v < C, "pick_per_row: index range");
  Tensor out = make_node({R}, {x});
  const double* px = x.data();
  double* po = out.data();
  for (int i = 0; i < R; ++i)
    po[i] = px[static_cast<size_t>(i) * C + idx[static_cast<size_t>(i)]];
  set_backward(out, [x, idx, R, C](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(x);
    for (int i = 0; i < R; ++i)
      d[static_cast<size_t>(i) * C + idx[static_cast<size_t>(i)]] += g[i];
  });
  return out;
}

// ---------------- row softmax ----------------

namespace {

// Shared forward: fills probs and/or log-probs row by row with the max-shift
// trick, so logits up to +-700 stay finite.
void softmax_fill(const double* in, double* probs, double* logp, int R, int C) {
  for (int i = 0; i < R; ++i) {
    const double* row = in + static_cast<size_t>(i) * C;
    double mx = row[0];
    for (int j = 1; j < C; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (int j = 0; j < C; ++j) sum += std::exp(row[j] - mx);
    double lse = mx + std::log(sum);
    for (int j = 0; j < C; ++j) {
      double lp = row[j] - lse;
      if (probs) probs[static_cast<size_t>(i) * C + j] = std::exp(lp);
      if (logp) logp[static_cast<size_t>(i) * C + j] = lp;
    }
  }
}

}  // namespace

Tensor softmax_rows(const Tensor& a) {
  check(a.rank() == 2, "softmax_rows: want 2D");
  int R = a.dim(0), C = a.dim(1);
  Tensor out = make_node({R, C}, {a});
  softmax_fill(a.data(), out.data(), nullptr, R, C);
  set_backward(out, [a, R, C](TensorImpl& self) {
    const double* g = self.grad->data();
    const double* y = self.data->data();
    double* d = grad_of(a);
    for (int i = 0; i < R; ++i) {
      const double* gr = g + static_cast<size_t>(i) * C;
      const double* yr = y + static_cast<size_t>(i) * C;
      double dot = 0.0;
      for (int j = 0; j < C; ++j) dot += gr[j] * yr[j];
      double* dr = d + static_cast<size_t>(i) * C;
      for (int j = 0; j < C; ++j) dr[j] += yr[j] * (gr[j] - dot);
    }
  });
  return out;
}

Tensor log_softmax_rows(const Tensor& a) {
  check(a.rank() == 2, "log_softmax_rows: want 2D");
  int R = a.dim(0), C = a.dim(1);
  Tensor out = make_node({R, C}, {a});
  softmax_fill(a.data(), nullptr, out.data(), R, C);
  set_backward(out, [a, R, C](TensorImpl& self) {
    const double* g = self.grad->data();
    const double* lp = self.data->data();
    double* d = grad_of(a);
    for (int i = 0; i < R; ++i) {
      const double* gr = g + static_cast<size_t>(i) * C;
      const double* lr = lp + static_cast<size_t>(i) * C;
      double gsum = 0.0;
      for (int j = 0; j < C; ++j) gsum += gr[j];
      double* dr = d + static_cast<size_t>(i) * C;
      for (int j = 0; j < C; ++j) dr[j] += gr[j] - std::exp(lr[j]) * gsum;
    }
  });
  return out;
}

// ---------------- spatial ----------------

namespace {

// col is (Cin*kh*kw) x (H*W) for one image; same-size output, zero padding.
void im2col(const double* x, int C, int H, int W, int kh, int kw, int pad,
            double* col) {
  int P = H * W;
  size_t r = 0;
  for (int c = 0; c < C; ++c)
    for (int ki = 0; ki < kh; ++ki)
      for (int kj = 0; kj < kw; ++kj, ++r) {
        double* dst = col + r * P;
        for (int i = 0; i < H; ++i) {
          int si = i + ki - pad;
          for (int j = 0; j < W; ++j) {
            int sj = j + kj - pad;
            dst[static_cast<size_t>(i) * W + j] =
                (si >= 0 && si < H && sj >= 0 && sj < W)
                    ? x[(static_cast<size_t>(c) * H + si) * W + sj]
                    : 0.0;
          }
        }
      }
}

void col2im_accum(const double* col, int C, int H, int W, int kh, int kw, int pad,
                  double* dx) {
  int P = H * W;
  size_t r = 0;
  for (int c = 0; c < C; ++c)
    for (int ki = 0; ki < kh; ++ki)
      for (int kj = 0; kj < kw; ++kj, ++r) {
        const double* src = col + r * P;
        for (int i = 0; i < H; ++i) {
          int si = i + ki - pad;
          if (si < 0 || si >= H) continue;
          for (int j = 0; j < W; ++j) {
            int sj = j + kj - pad;
            if (sj < 0 || sj >= W) continue;
            dx[(static_cast<size_t>(c) * H + si) * W + sj] +=
                src[static_cast<size_t>(i) * W + j];
          }
        }
      }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int pad) {
  check(x.rank() == 4 && w.rank() == 4 && bias.rank() == 1, "conv2d: shapes");
  int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  int O = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  check(w.dim(1) == C && bias.dim(0) == O, "conv2d: channel mismatch");
  int P = H * W;
  int K = C * kh * kw;
  Tensor out = make_node({B, O, H, W}, {x, w, bias});
  {
    std::vector<double> col(static_cast<size_t>(K) * P);
    const double* px = x.data();
    const double* pw = w.data();
    const double* pb = bias.data();
    double* po = out.data();
    for (int b = 0; b < B; ++b) {
      im2col(px + static_cast<size_t>(b) * C * P, C, H, W, kh, kw, pad, col.data());
      double* ob = po + static_cast<size_t>(b) * O * P;
      mm(ob, pw, col.data(), O, K, P, false);
      for (int o = 0; o < O; ++o) {
        double bv = pb[o];
        double* orow = ob + static_cast<size_t>(o) * P;
        for (int p = 0; p < P; ++p) orow[p] += bv;
      }
    }
  }
  // im2col buffers are recomputed in backward rather than cached: the training
  // graph holds many conv nodes alive at once and the col matrices dominate
  // memory otherwise.
  set_backward(out, [x, w, bias, B, C, H, W, O, kh, kw, pad, P, K](TensorImpl& self) {
    const double* g = self.grad->data();
    const double* px = x.data();
    const double* pw = w.data();
    std::vector<double> col(static_cast<size_t>(K) * P);
    std::vector<double> colT(static_cast<size_t>(P) * K);
    std::vector<double> wT;
    std::vector<double> dcol(static_cast<size_t>(K) * P);
    if (x.has_grad()) wT = transpose_copy(pw, O, K);
    for (int b = 0; b < B; ++b) {
      const double* gb = g + static_cast<size_t>(b) * O * P;
      if (w.has_grad() || x.has_grad())
        im2col(px + static_cast<size_t>(b) * C * P, C, H, W, kh, kw, pad, col.data());
      if (w.has_grad()) {
        // dW += g_b (O x P) * col^T (P x K)
        for (int i = 0; i < K; ++i)
          for (int p = 0; p < P; ++p)
            colT[static_cast<size_t>(p) * K + i] = col[static_cast<size_t>(i) * P + p];
        mm(grad_of(w), gb, colT.data(), O, P, K, true);
      }
      if (bias.has_grad()) {
        double* db = grad_of(bias);
        for (int o = 0; o < O; ++o) {
          const double* grow = gb + static_cast<size_t>(o) * P;
          double s = 0.0;
          for (int p = 0; p < P; ++p) s += grow[p];
          db[o] += s;
        }
      }
      if (x.has_grad()) {
        mm(dcol.data(), wT.data(), gb, K, O, P, false);
        col2im_accum(dcol.data(), C, H, W, kh, kw, pad,
                     grad_of(x) + static_cast<size_t>(b) * C * P);
      }
    }
  });
  return out;
}

Tensor maxpool2x2(const Tensor& x) {
  check(x.rank() == 4, "maxpool2x2: want 4D");
  int B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  int OH = (H + 1) / 2, OW = (W + 1) / 2;
  Tensor out = make_node({B, C, OH, OW}, {x});
  auto argmax = std::make_shared<std::vector<int>>(static_cast<size_t>(B) * C * OH * OW);
  {
    const double* px = x.data();
    double* po = out.data();
    size_t oidx = 0;
    for (int b = 0; b < B; ++b)
      for (int c = 0; c < C; ++c) {
        const double* plane = px + (static_cast<size_t>(b) * C + c) * H * W;
        int base = static_cast<int>((static_cast<size_t>(b) * C + c) * H * W);
        for (int i = 0; i < OH; ++i)
          for (int j = 0; j < OW; ++j, ++oidx) {
            double best = -1e300;
            int besti = -1;
            // Replication padding: coordinates past the edge clamp to the
            // border cell, so odd extents reuse the last row/column.
            for (int di = 0; di < 2; ++di)
              for (int dj = 0; dj < 2; ++dj) {
                int si = std::min(2 * i + di, H - 1);
                int sj = std::min(2 * j + dj, W - 1);
                double v = plane[static_cast<size_t>(si) * W + sj];
                if (v > best) {
                  best = v;
                  besti = si * W + sj;
                }
              }
            po[oidx] = best;
            (*argmax)[oidx] = base + besti;
          }
      }
  }
  int n = out.size();
  set_backward(out, [x, argmax, n](TensorImpl& self) {
    const double* g = self.grad->data();
    double* d = grad_of(x);
    for (int i = 0; i < n; ++i) d[(*argmax)[static_cast<size_t>(i)]] += g[i];
  });
  return out;
}

}  // namespace coverpath
