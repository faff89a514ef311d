#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "coverpath/tensor.hpp"

namespace coverpath {

// Adaptive moment estimation over a fixed parameter list.  Standard update:
//   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2
//   p <- p - lr * mhat / (sqrt(vhat) + eps)
// with bias-corrected mhat/vhat.
class Adam {
 public:
  Adam() = default;
  Adam(std::vector<Tensor> params, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)),
        lr_(lr),
        beta1_(beta1),
        beta2_(beta2),
        eps_(eps) {
    for (const Tensor& p : params_) {
      if (!p.has_grad())
        throw std::invalid_argument("Adam: parameter without gradient");
      m_.emplace_back(static_cast<size_t>(p.size()), 0.0);
      v_.emplace_back(static_cast<size_t>(p.size()), 0.0);
    }
  }

  void step() {
    ++t_;
    double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
      double* data = params_[i].data();
      const double* grad = params_[i].grad();
      std::vector<double>& m = m_[i];
      std::vector<double>& v = v_[i];
      for (size_t j = 0; j < m.size(); ++j) {
        double g = grad[j];
        m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
        v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
        data[j] -= lr_ * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps_);
      }
    }
  }

  void zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
  }

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  int64_t step_count() const { return t_; }

  // checkpoint plumbing
  const std::vector<std::vector<double>>& m() const { return m_; }
  const std::vector<std::vector<double>>& v() const { return v_; }
  void restore(int64_t t, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v) {
    if (m.size() != params_.size() || v.size() != params_.size())
      throw std::invalid_argument("Adam::restore: moment count mismatch");
    for (size_t i = 0; i < params_.size(); ++i) {
      size_t want = static_cast<size_t>(params_[i].size());
      if (m[i].size() != want || v[i].size() != want)
        throw std::invalid_argument("Adam::restore: moment shape mismatch");
    }
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_, v_;
  double lr_ = 1e-3, beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int64_t t_ = 0;
};

}  // namespace coverpath
