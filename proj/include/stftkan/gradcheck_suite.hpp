#pragma once

#include "stftkan/gradcheck.hpp"
#include "stftkan/model.hpp"
#include "stftkan/nn.hpp"
#include "stftkan/train.hpp"

#include <string>
#include <vector>

namespace stftkan {

struct GradCheckReport {
  std::string what;
  double max_rel_error = 0.0;
  bool passed = false;
};

// Checks every parameter tensor and the input gradient of one layer
// against central finite differences of loss = sum(u .* forward(x)).
inline GradCheckResult check_layer_gradients(Layer<double>& layer,
                                             Matrix<double> x, Rng& rng,
                                             double h = 1e-6) {
  const Matrix<double> u =
      rng_uniform<double>(rng, -1.0, 1.0, x.rows(), layer.output_dim());
  auto loss = [&]() { return (u.array() * layer.forward(x).array()).sum(); };

  layer.zero_grads();
  layer.forward(x);
  const Matrix<double> grad_x = layer.backward(u);

  GradCheckResult worst;
  std::vector<ParamRef<double>> params;
  layer.collect_params(params);
  for (auto& p : params) {
    const auto r = finite_difference_check(*p.value, *p.grad, loss, h);
    worst.max_rel_error = std::max(worst.max_rel_error, r.max_rel_error);
    worst.max_abs_error = std::max(worst.max_abs_error, r.max_abs_error);
  }
  const auto rx = finite_difference_check(x, grad_x, loss, h);
  worst.max_rel_error = std::max(worst.max_rel_error, rx.max_rel_error);
  worst.max_abs_error = std::max(worst.max_abs_error, rx.max_abs_error);
  return worst;
}

// End-to-end check on a scaled-down model: weighted cross-entropy of the
// logits for a small random cloud, finite differences over every
// trainable tensor.
inline GradCheckResult check_model_gradients(ModelVariant variant,
                                             std::uint64_t seed,
                                             double h = 1e-6) {
  Rng rng(seed);
  ModelDims dims;
  dims.k = 4;
  dims.hidden1 = 8;
  dims.hidden2 = 16;
  dims.emb = 32;
  const int classes = 3;
  StftModelConfig stft;
  stft.ecl1 = {6, 8, 2, 2, 2, WindowKind::Boxcar, 8.0, true, true};
  stft.ecl2 = {8, 16, 4, 2, 2, WindowKind::Blackman, 8.0, false, true};
  stft.fel = {16, 32, 6, 3, 3, WindowKind::Bartlett, 8.0, true, true};
  stft.cl = {64, 3, 12, 5, 2, WindowKind::Hann, 8.0, false, true};
  auto model =
      LiteDgcnnModel<double>::build(variant, classes, rng, dims, stft);

  const Matrix<double> cloud = rng_uniform<double>(rng, -1.0, 1.0, 32, 3);
  const int label = 1;
  Vector<double> weights = Vector<double>::Ones(classes);
  weights(0) = 1.5;

  auto loss = [&]() {
    const Vector<double> logits = model.forward(cloud);
    auto [term, grad] =
        detail::ce_sample_term<double>(logits, label, weights(label), weights(label));
    (void)grad;
    return static_cast<double>(term);
  };

  model.zero_grads();
  const Vector<double> logits = model.forward(cloud);
  auto [term, grad] =
      detail::ce_sample_term<double>(logits, label, weights(label), weights(label));
  (void)term;
  model.backward(grad);

  GradCheckResult worst;
  std::vector<ParamRef<double>> params;
  model.collect_params(params);
  for (auto& p : params) {
    const auto r = finite_difference_check(*p.value, *p.grad, loss, h);
    worst.max_rel_error = std::max(worst.max_rel_error, r.max_rel_error);
    worst.max_abs_error = std::max(worst.max_abs_error, r.max_abs_error);
  }
  return worst;
}

// Layer-by-layer and end-to-end finite-difference suite, 64-bit.
inline std::vector<GradCheckReport> run_gradcheck_suite(std::uint64_t seed) {
  std::vector<GradCheckReport> reports;
  Rng rng(seed);
  auto add = [&](const std::string& what, double err, double tol) {
    reports.push_back({what, err, err < tol});
  };

  {
    StftKanConfig cfg{10, 4, 4, 2, 3, WindowKind::Hann, 8.0, false, true};
    auto layer = StftKanLayer<double>::init(cfg, rng);
    const auto x = rng_uniform<double>(rng, -1.0, 1.0, 3, cfg.d_in);
    add("stft-kan (overlap S<W)", check_layer_gradients(layer, x, rng).max_rel_error,
        1e-5);
  }
  {
    // d_in < W: single zero-padded frame
    StftKanConfig cfg{3, 2, 5, 1, 2, WindowKind::Blackman, 8.0, true, true};
    auto layer = StftKanLayer<double>::init(cfg, rng);
    const auto x = rng_uniform<double>(rng, -1.0, 1.0, 2, cfg.d_in);
    add("stft-kan (pad d_in<W)", check_layer_gradients(layer, x, rng).max_rel_error,
        1e-5);
  }
  {
    FourierKanLayer<double> layer = FourierKanLayer<double>::init(5, 3, 2, rng);
    const auto x = rng_uniform<double>(rng, -1.0, 1.0, 3, 5);
    add("fourier-kan", check_layer_gradients(layer, x, rng).max_rel_error, 1e-5);
  }
  {
    auto layer = LinearLayer<double>::init(6, 4, rng);
    const auto x = rng_uniform<double>(rng, -1.0, 1.0, 3, 6);
    add("linear", check_layer_gradients(layer, x, rng).max_rel_error, 1e-5);
  }
  {
    // away from the kink at 0
    ReluLayer<double> layer(4);
    Matrix<double> x = rng_uniform<double>(rng, 0.2, 1.0, 3, 4);
    x.row(1) *= -1.0;
    add("relu", check_layer_gradients(layer, x, rng).max_rel_error, 1e-5);
  }
  for (auto variant : {ModelVariant::Mlp, ModelVariant::StftKan,
                       ModelVariant::StftKanMlp, ModelVariant::FourierKan}) {
    add(std::string("model end-to-end (") + variant_name(variant) + ")",
        check_model_gradients(variant, seed + 7).max_rel_error, 1e-4);
  }
  return reports;
}

}  // namespace stftkan
