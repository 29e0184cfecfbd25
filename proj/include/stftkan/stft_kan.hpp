#pragma once

#include "stftkan/core.hpp"
#include "stftkan/layer.hpp"
#include "stftkan/serialize.hpp"
#include "stftkan/windows.hpp"

#include <cmath>
#include <cstdint>

namespace stftkan {

struct FramingInfo {
  int num_windows;  // N_w
  int padded_len;   // L = (N_w - 1) * S + W
};

// N_w = floor((max(d_in, W) - W) / S) + 1. Inputs shorter than one window
// are zero-padded to a single frame.
inline FramingInfo num_windows(int d_in, int window_size, int stride) {
  if (window_size < 1 || stride < 1)
    throw ConfigError("framing: window size and stride must be >= 1");
  const int eff = d_in > window_size ? d_in : window_size;
  const int n_w = (eff - window_size) / stride + 1;
  return {n_w, (n_w - 1) * stride + window_size};
}

struct StftKanConfig {
  int d_in = 1;
  int d_out = 1;
  int window_size = 1;  // W
  int stride = 1;       // S
  int grid_size = 1;    // G
  WindowKind window = WindowKind::Boxcar;
  double kaiser_beta = 8.0;
  bool smooth_init = false;
  bool use_bias = true;

  void validate() const {
    if (d_in < 1 || d_out < 1) throw ConfigError("stft-kan: dims must be >= 1");
    if (window_size < 1 || stride < 1 || grid_size < 1)
      throw ConfigError("stft-kan: W, S, G must be >= 1");
  }
};

// Harmonic bases cos(2*pi*k*n/W), sin(2*pi*k*n/W) for k in [1, G]. Angles
// are reduced modulo W before evaluation so that exact zeros (e.g. every
// sine at W = 2) come out exactly zero and gradients of dead parameters
// vanish identically.
template <typename S>
void harmonic_bases(int grid_size, int window_size, Matrix<S>& cos_basis,
                    Matrix<S>& sin_basis) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const int W = window_size;
  cos_basis.resize(grid_size, W);
  sin_basis.resize(grid_size, W);
  for (int k = 1; k <= grid_size; ++k) {
    for (int n = 0; n < W; ++n) {
      const long r = (static_cast<long>(k) * n) % W;
      double c, s;
      if (r == 0) {
        c = 1.0, s = 0.0;
      } else if (2 * r == W) {
        c = -1.0, s = 0.0;
      } else if (4 * r == W) {
        c = 0.0, s = 1.0;
      } else if (4 * r == 3L * W) {
        c = 0.0, s = -1.0;
      } else {
        const double theta = two_pi * static_cast<double>(r) / W;
        c = std::cos(theta);
        s = std::sin(theta);
      }
      cos_basis(k - 1, n) = static_cast<S>(c);
      sin_basis(k - 1, n) = static_cast<S>(s);
    }
  }
}

// Windowed-Fourier layer: the input is framed into N_w windows of W samples
// (stride S, tail zero-pad / tail truncation to L), each frame is modulated
// by the window vector and projected onto G cosine/sine harmonics, and the
// projections are combined with trainable per-output coefficients:
//
//   y[o] = sum_w sum_k a[o,w,k] * Yc[w,k] + b[o,w,k] * Ys[w,k] + bias[o]
//
// Linear in the input for fixed parameters.
template <typename S>
class StftKanLayer : public Layer<S> {
 public:
  explicit StftKanLayer(const StftKanConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const auto fr = num_windows(cfg_.d_in, cfg_.window_size, cfg_.stride);
    n_w_ = fr.num_windows;
    len_ = fr.padded_len;
    harmonic_bases<S>(cfg_.grid_size, cfg_.window_size, cos_basis_, sin_basis_);
    window_ = make_window<S>({cfg_.window, cfg_.window_size, cfg_.kaiser_beta});
    a_.setZero(cfg_.d_out, n_w_ * cfg_.grid_size);
    b_.setZero(cfg_.d_out, n_w_ * cfg_.grid_size);
    grad_a_.setZero(a_.rows(), a_.cols());
    grad_b_.setZero(b_.rows(), b_.cols());
    if (cfg_.use_bias) {
      bias_.setZero(cfg_.d_out, 1);
      grad_bias_.setZero(cfg_.d_out, 1);
    }
  }

  static StftKanLayer init(const StftKanConfig& cfg, Rng& rng) {
    StftKanLayer layer(cfg);
    const double sigma =
        1.0 / std::sqrt(static_cast<double>(layer.n_w_) * cfg.grid_size *
                        cfg.window_size);
    layer.a_ = rng_normal<S>(rng, sigma, layer.a_.rows(), layer.a_.cols());
    layer.b_ = rng_normal<S>(rng, sigma, layer.b_.rows(), layer.b_.cols());
    if (cfg.smooth_init) {
      for (int w = 0; w < layer.n_w_; ++w)
        for (int k = 1; k <= cfg.grid_size; ++k) {
          const S gamma = static_cast<S>(1.0 / (static_cast<double>(k) * k));
          layer.a_.col(w * cfg.grid_size + k - 1) *= gamma;
          layer.b_.col(w * cfg.grid_size + k - 1) *= gamma;
        }
    }
    return layer;
  }

  // Frames one signal: pad/truncate to L, slice at offsets w*S, modulate by h.
  Matrix<S> frame(const Vector<S>& x) const {
    if (x.size() != cfg_.d_in) throw DimensionError("frame: wrong input length");
    Vector<S> padded = Vector<S>::Zero(len_);
    const Eigen::Index copy = std::min<Eigen::Index>(x.size(), len_);
    padded.head(copy) = x.head(copy);
    Matrix<S> frames(n_w_, cfg_.window_size);
    for (int w = 0; w < n_w_; ++w)
      frames.row(w) = padded.segment(w * cfg_.stride, cfg_.window_size)
                          .cwiseProduct(window_)
                          .transpose();
    return frames;
  }

  Matrix<S> forward(const Matrix<S>& x) override {
    if (x.cols() != cfg_.d_in)
      throw DimensionError("stft-kan forward: expected " +
                           std::to_string(cfg_.d_in) + " columns");
    require_finite(x, "input of layer " + this->name_);
    const Eigen::Index batch = x.rows();
    const int G = cfg_.grid_size;

    Matrix<S> padded = Matrix<S>::Zero(batch, len_);
    const Eigen::Index copy = std::min<Eigen::Index>(cfg_.d_in, len_);
    padded.leftCols(copy) = x.leftCols(copy);

    proj_cos_.resize(batch, n_w_ * G);
    proj_sin_.resize(batch, n_w_ * G);
    for (int w = 0; w < n_w_; ++w) {
      const auto frames = padded.middleCols(w * cfg_.stride, cfg_.window_size) *
                          window_.asDiagonal();
      proj_cos_.middleCols(w * G, G) = frames * cos_basis_.transpose();
      proj_sin_.middleCols(w * G, G) = frames * sin_basis_.transpose();
    }

    Matrix<S> y = proj_cos_ * a_.transpose() + proj_sin_ * b_.transpose();
    if (cfg_.use_bias) y.rowwise() += bias_.col(0).transpose();
    batch_ = batch;
    return y;
  }

  Matrix<S> backward(const Matrix<S>& grad_out) override {
    if (grad_out.rows() != batch_ || grad_out.cols() != cfg_.d_out)
      throw DimensionError("stft-kan backward: gradient shape mismatch");
    const int G = cfg_.grid_size;

    grad_a_ += grad_out.transpose() * proj_cos_;
    grad_b_ += grad_out.transpose() * proj_sin_;
    if (cfg_.use_bias)
      grad_bias_.col(0) += grad_out.colwise().sum().transpose();

    const Matrix<S> d_cos = grad_out * a_;  // batch x (N_w * G)
    const Matrix<S> d_sin = grad_out * b_;
    Matrix<S> d_padded = Matrix<S>::Zero(batch_, len_);
    for (int w = 0; w < n_w_; ++w) {
      // overlapping windows (S < W) accumulate
      d_padded.middleCols(w * cfg_.stride, cfg_.window_size) +=
          (d_cos.middleCols(w * G, G) * cos_basis_ +
           d_sin.middleCols(w * G, G) * sin_basis_) *
          window_.asDiagonal();
    }
    Matrix<S> grad_x = Matrix<S>::Zero(batch_, cfg_.d_in);
    const Eigen::Index copy = std::min<Eigen::Index>(cfg_.d_in, len_);
    grad_x.leftCols(copy) = d_padded.leftCols(copy);
    return grad_x;
  }

  void collect_params(std::vector<ParamRef<S>>& out) override {
    out.push_back({&a_, &grad_a_, this->name_ + ".a"});
    out.push_back({&b_, &grad_b_, this->name_ + ".b"});
    if (cfg_.use_bias) out.push_back({&bias_, &grad_bias_, this->name_ + ".bias"});
  }

  std::int64_t param_count() const override {
    return 2LL * cfg_.d_out * n_w_ * cfg_.grid_size +
           (cfg_.use_bias ? cfg_.d_out : 0);
  }

  int input_dim() const override { return cfg_.d_in; }
  int output_dim() const override { return cfg_.d_out; }
  int windows() const { return n_w_; }
  int padded_len() const { return len_; }
  const StftKanConfig& config() const { return cfg_; }

  Matrix<S>& a() { return a_; }
  Matrix<S>& b() { return b_; }
  Matrix<S>& bias() { return bias_; }
  const Matrix<S>& grad_b() const { return grad_b_; }

  std::uint8_t tag() const override { return 2; }

  void write_config(std::ostream& os) const override {
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(cfg_.d_in));
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(cfg_.d_out));
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(cfg_.window_size));
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(cfg_.stride));
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(cfg_.grid_size));
    io::write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(cfg_.window));
    io::write_pod<double>(os, cfg_.kaiser_beta);
    io::write_pod<std::uint8_t>(os, cfg_.smooth_init ? 1 : 0);
    io::write_pod<std::uint8_t>(os, cfg_.use_bias ? 1 : 0);
  }

  static StftKanConfig read_config(std::istream& is) {
    StftKanConfig cfg;
    cfg.d_in = static_cast<int>(io::read_pod<std::uint32_t>(is));
    cfg.d_out = static_cast<int>(io::read_pod<std::uint32_t>(is));
    cfg.window_size = static_cast<int>(io::read_pod<std::uint32_t>(is));
    cfg.stride = static_cast<int>(io::read_pod<std::uint32_t>(is));
    cfg.grid_size = static_cast<int>(io::read_pod<std::uint32_t>(is));
    cfg.window = static_cast<WindowKind>(io::read_pod<std::uint8_t>(is));
    cfg.kaiser_beta = io::read_pod<double>(is);
    cfg.smooth_init = io::read_pod<std::uint8_t>(is) != 0;
    cfg.use_bias = io::read_pod<std::uint8_t>(is) != 0;
    return cfg;
  }

  void write_params(std::ostream& os) const override {
    io::write_tensor(os, a_);
    io::write_tensor(os, b_);
    if (cfg_.use_bias) io::write_tensor(os, bias_);
  }

  void read_params(std::istream& is) override {
    io::read_tensor_into(is, a_);
    io::read_tensor_into(is, b_);
    if (cfg_.use_bias) io::read_tensor_into(is, bias_);
  }

 private:
  StftKanConfig cfg_;
  int n_w_ = 1;
  int len_ = 1;
  Matrix<S> a_, b_, bias_;
  Matrix<S> grad_a_, grad_b_, grad_bias_;
  Matrix<S> cos_basis_, sin_basis_;  // G x W, constant
  Vector<S> window_;
  // forward cache
  Matrix<S> proj_cos_, proj_sin_;
  Eigen::Index batch_ = 0;
};

}  // namespace stftkan
