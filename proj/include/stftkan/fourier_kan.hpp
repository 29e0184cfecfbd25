#pragma once

#include "stftkan/core.hpp"
#include "stftkan/layer.hpp"
#include "stftkan/serialize.hpp"

#include <cmath>
#include <cstdint>

namespace stftkan {

// Full Fourier-series KAN layer, one series per input coordinate:
//
//   y[o] = sum_i sum_k a[o,i,k] * cos(k * x_i) + b[o,i,k] * sin(k * x_i) + bias[o]
//
// Nonlinear in the input (the harmonics are taken of x itself), unlike the
// framed layer. Harmonics run k = 1..G.
template <typename S>
class FourierKanLayer : public Layer<S> {
 public:
  FourierKanLayer(int d_in, int d_out, int grid_size)
      : d_in_(d_in), d_out_(d_out), grid_(grid_size) {
    if (d_in < 1 || d_out < 1 || grid_size < 1)
      throw ConfigError("fourier-kan: dims and grid size must be >= 1");
    a_.setZero(d_out_, d_in_ * grid_);
    b_.setZero(d_out_, d_in_ * grid_);
    bias_.setZero(d_out_, 1);
    grad_a_.setZero(a_.rows(), a_.cols());
    grad_b_.setZero(b_.rows(), b_.cols());
    grad_bias_.setZero(d_out_, 1);
  }

  static FourierKanLayer init(int d_in, int d_out, int grid_size, Rng& rng) {
    FourierKanLayer layer(d_in, d_out, grid_size);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(d_in) * grid_size);
    layer.a_ = rng_normal<S>(rng, sigma, layer.a_.rows(), layer.a_.cols());
    layer.b_ = rng_normal<S>(rng, sigma, layer.b_.rows(), layer.b_.cols());
    return layer;
  }

  Matrix<S> forward(const Matrix<S>& x) override {
    if (x.cols() != d_in_)
      throw DimensionError("fourier-kan forward: expected " +
                           std::to_string(d_in_) + " columns");
    require_finite(x, "input of layer " + this->name_);
    const Eigen::Index batch = x.rows();
    x_ = x;
    phi_cos_.resize(batch, d_in_ * grid_);
    phi_sin_.resize(batch, d_in_ * grid_);
    for (Eigen::Index r = 0; r < batch; ++r)
      for (int i = 0; i < d_in_; ++i)
        for (int k = 1; k <= grid_; ++k) {
          const S arg = static_cast<S>(k) * x(r, i);
          phi_cos_(r, i * grid_ + k - 1) = std::cos(arg);
          phi_sin_(r, i * grid_ + k - 1) = std::sin(arg);
        }
    Matrix<S> y = phi_cos_ * a_.transpose() + phi_sin_ * b_.transpose();
    y.rowwise() += bias_.col(0).transpose();
    return y;
  }

  Matrix<S> backward(const Matrix<S>& grad_out) override {
    if (grad_out.rows() != x_.rows() || grad_out.cols() != d_out_)
      throw DimensionError("fourier-kan backward: gradient shape mismatch");
    grad_a_ += grad_out.transpose() * phi_cos_;
    grad_b_ += grad_out.transpose() * phi_sin_;
    grad_bias_.col(0) += grad_out.colwise().sum().transpose();

    const Matrix<S> d_cos = grad_out * a_;
    const Matrix<S> d_sin = grad_out * b_;
    Matrix<S> grad_x = Matrix<S>::Zero(x_.rows(), d_in_);
    for (Eigen::Index r = 0; r < x_.rows(); ++r)
      for (int i = 0; i < d_in_; ++i) {
        S acc = S(0);
        for (int k = 1; k <= grid_; ++k) {
          const Eigen::Index c = i * grid_ + k - 1;
          acc += static_cast<S>(k) *
                 (d_sin(r, c) * phi_cos_(r, c) - d_cos(r, c) * phi_sin_(r, c));
        }
        grad_x(r, i) = acc;
      }
    return grad_x;
  }

  void collect_params(std::vector<ParamRef<S>>& out) override {
    out.push_back({&a_, &grad_a_, this->name_ + ".a"});
    out.push_back({&b_, &grad_b_, this->name_ + ".b"});
    out.push_back({&bias_, &grad_bias_, this->name_ + ".bias"});
  }

  std::int64_t param_count() const override {
    return 2LL * d_out_ * d_in_ * grid_ + d_out_;
  }

  int input_dim() const override { return d_in_; }
  int output_dim() const override { return d_out_; }
  int grid_size() const { return grid_; }

  Matrix<S>& a() { return a_; }
  Matrix<S>& b() { return b_; }
  Matrix<S>& bias() { return bias_; }

  std::uint8_t tag() const override { return 3; }

  void write_config(std::ostream& os) const override {
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d_in_));
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(d_out_));
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(grid_));
  }

  void write_params(std::ostream& os) const override {
    io::write_tensor(os, a_);
    io::write_tensor(os, b_);
    io::write_tensor(os, bias_);
  }

  void read_params(std::istream& is) override {
    io::read_tensor_into(is, a_);
    io::read_tensor_into(is, b_);
    io::read_tensor_into(is, bias_);
  }

 private:
  int d_in_, d_out_, grid_;
  Matrix<S> a_, b_, bias_;
  Matrix<S> grad_a_, grad_b_, grad_bias_;
  Matrix<S> x_, phi_cos_, phi_sin_;
};

}  // namespace stftkan
