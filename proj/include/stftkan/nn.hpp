#pragma once

#include "stftkan/core.hpp"
#include "stftkan/layer.hpp"
#include "stftkan/serialize.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace stftkan {

template <typename S>
class LinearLayer : public Layer<S> {
 public:
  LinearLayer(int d_in, int d_out) : d_in_(d_in), d_out_(d_out) {
    if (d_in < 1 || d_out < 1) throw ConfigError("linear: dims must be >= 1");
    weight_.setZero(d_out_, d_in_);
    bias_.setZero(d_out_, 1);
    grad_weight_.setZero(d_out_, d_in_);
    grad_bias_.setZero(d_out_, 1);
  }

  // Kaiming-uniform fan-in init, matching the usual default for ReLU stacks.
  static LinearLayer init(int d_in, int d_out, Rng& rng) {
    LinearLayer layer(d_in, d_out);
    const double bound = std::sqrt(1.0 / d_in);
    layer.weight_ = rng_uniform<S>(rng, -bound, bound, d_out, d_in);
    layer.bias_ = rng_uniform<S>(rng, -bound, bound, d_out, 1);
    return layer;
  }

  Matrix<S> forward(const Matrix<S>& x) override {
    if (x.cols() != d_in_)
      throw DimensionError("linear forward: expected " + std::to_string(d_in_) +
                           " columns");
    x_ = x;
    Matrix<S> y = x * weight_.transpose();
    y.rowwise() += bias_.col(0).transpose();
    return y;
  }

  Matrix<S> backward(const Matrix<S>& grad_out) override {
    if (grad_out.rows() != x_.rows() || grad_out.cols() != d_out_)
      throw DimensionError("linear backward: gradient shape mismatch");
    grad_weight_ += grad_out.transpose() * x_;
    grad_bias_.col(0) += grad_out.colwise().sum().transpose();
    return grad_out * weight_;
  }

  void collect_params(std::vector<ParamRef<S>>& out) override {
    out.push_back({&weight_, &grad_weight_, this->name_ + ".weight"});
    out.push_back({&bias_, &grad_bias_, this->name_ + ".bias"});
  }

  std::int64_t param_count() const override {
    return static_cast<std::int64_t>(d_out_) * d_in_ + d_out_;
  }

  int input_dim() const override { return d_in_; }
  int output_dim() const override { return d_out_; }

  Matrix<S>& weight() { return weight_; }
  Matrix<S>& bias() { return bias_; }

  std::uint8_t tag() const override { return 0; }

  void write_config(std::ostream& os) const override {
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d_in_));
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d_out_));
  }

  void write_params(std::ostream& os) const override {
    io::write_tensor(os, weight_);
    io::write_tensor(os, bias_);
  }

  void read_params(std::istream& is) override {
    io::read_tensor_into(is, weight_);
    io::read_tensor_into(is, bias_);
  }

 private:
  int d_in_, d_out_;
  Matrix<S> weight_, bias_;
  Matrix<S> grad_weight_, grad_bias_;
  Matrix<S> x_;
};

// max(0, x); subgradient at 0 is 0
template <typename S>
class ReluLayer : public Layer<S> {
 public:
  explicit ReluLayer(int dim) : dim_(dim) {}

  Matrix<S> forward(const Matrix<S>& x) override {
    mask_ = (x.array() > S(0)).template cast<S>();
    return x.cwiseMax(S(0));
  }

  Matrix<S> backward(const Matrix<S>& grad_out) override {
    if (grad_out.rows() != mask_.rows() || grad_out.cols() != mask_.cols())
      throw DimensionError("relu backward: gradient shape mismatch");
    return grad_out.cwiseProduct(mask_);
  }

  void collect_params(std::vector<ParamRef<S>>&) override {}
  std::int64_t param_count() const override { return 0; }
  int input_dim() const override { return dim_; }
  int output_dim() const override { return dim_; }

  std::uint8_t tag() const override { return 1; }
  void write_config(std::ostream& os) const override {
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(dim_));
  }
  void write_params(std::ostream&) const override {}
  void read_params(std::istream&) override {}

 private:
  int dim_;
  Matrix<S> mask_;
};

// Weighted softmax cross-entropy over a batch of logit rows:
//   loss = sum_i w[y_i] * (logsumexp(l_i) - l_i[y_i]) / sum_i w[y_i]
template <typename S>
struct CrossEntropyResult {
  S loss;
  Matrix<S> grad_logits;
};

template <typename S>
CrossEntropyResult<S> weighted_cross_entropy(const Matrix<S>& logits,
                                             const std::vector<int>& labels,
                                             const Vector<S>& class_weights) {
  const Eigen::Index batch = logits.rows();
  const Eigen::Index C = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != batch)
    throw DimensionError("cross-entropy: labels/logits length mismatch");
  if (class_weights.size() != C)
    throw DimensionError("cross-entropy: class weight length mismatch");

  S weight_sum = S(0);
  for (Eigen::Index i = 0; i < batch; ++i) {
    if (labels[i] < 0 || labels[i] >= C)
      throw DataError("cross-entropy: label out of range");
    weight_sum += class_weights(labels[i]);
  }

  CrossEntropyResult<S> out;
  out.loss = S(0);
  out.grad_logits.resize(batch, C);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const S w = class_weights(labels[i]);
    const S max_logit = logits.row(i).maxCoeff();
    const Vector<S> shifted = (logits.row(i).array() - max_logit).transpose();
    const Vector<S> exps = shifted.array().exp();
    const S z = exps.sum();
    const S lse = max_logit + std::log(z);
    out.loss += w * (lse - logits(i, labels[i]));
    out.grad_logits.row(i) = (w / weight_sum) * (exps / z).transpose();
    out.grad_logits(i, labels[i]) -= w / weight_sum;
  }
  out.loss /= weight_sum;
  return out;
}

// Classic Adam with L2-coupled weight decay: g <- g + wd * p before the
// moment update, then the bias-corrected step.
template <typename S>
class Adam {
 public:
  Adam(double lr = 1e-3, double weight_decay = 0.0, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }
  std::int64_t timestep() const { return t_; }

  void step(std::vector<ParamRef<S>>& params) {
    if (m_.empty()) {
      for (const auto& p : params) {
        m_.push_back(Matrix<S>::Zero(p.value->rows(), p.value->cols()));
        v_.push_back(Matrix<S>::Zero(p.value->rows(), p.value->cols()));
      }
    }
    if (m_.size() != params.size())
      throw DimensionError("adam: parameter set changed between steps");
    ++t_;
    const S bc1 = static_cast<S>(1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const S bc2 = static_cast<S>(1.0 - std::pow(beta2_, static_cast<double>(t_)));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Matrix<S> g = *params[i].grad;
      if (wd_ != 0.0) g += static_cast<S>(wd_) * (*params[i].value);
      m_[i] = static_cast<S>(beta1_) * m_[i] + static_cast<S>(1.0 - beta1_) * g;
      v_[i] = static_cast<S>(beta2_) * v_[i] +
              static_cast<S>(1.0 - beta2_) * g.cwiseProduct(g);
      const Matrix<S> m_hat = m_[i] / bc1;
      const Matrix<S> v_hat = v_[i] / bc2;
      params[i].value->array() -=
          static_cast<S>(lr_) * m_hat.array() /
          (v_hat.array().sqrt() + static_cast<S>(eps_));
    }
  }

 private:
  double lr_, wd_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<Matrix<S>> m_, v_;
};

// lr(e) = eta_min + 0.5 * (base - eta_min) * (1 + cos(pi * e / total))
struct CosineSchedule {
  double base_lr = 1e-3;
  double eta_min = 1e-3;
  int total_epochs = 300;

  double lr_at(int epoch) const {
    constexpr double pi = 3.14159265358979323846;
    return eta_min + 0.5 * (base_lr - eta_min) *
                         (1.0 + std::cos(pi * epoch / total_epochs));
  }
};

}  // namespace stftkan
