#include "stftkan/model.hpp"

#include "stftkan/gradcheck_suite.hpp"
#include "stftkan/train.hpp"

#include <doctest.h>

using namespace stftkan;

TEST_CASE("parameter counts reproduce the published table") {
  CHECK(reference_param_count(ModelVariant::StftKan, 7) == 77391);
  CHECK(reference_param_count(ModelVariant::Mlp, 7) == 155207);
  CHECK(reference_param_count(ModelVariant::StftKanMlp, 7) == 93113);
  CHECK(reference_param_count(ModelVariant::FourierKan, 7) == 309191);

  SUBCASE("assembled models agree with the closed form") {
    Rng rng(0);
    for (auto v : {ModelVariant::Mlp, ModelVariant::StftKan,
                   ModelVariant::StftKanMlp, ModelVariant::FourierKan}) {
      auto model = LiteDgcnnModel<float>::build(v, 7, rng);
      CHECK(model.param_count() == reference_param_count(v, 7));
    }
  }
  SUBCASE("rounding to millions matches 0.08 / 0.16 / 0.09 / 0.31") {
    auto mrounded = [](std::int64_t c) {
      return std::round(static_cast<double>(c) / 1e6 * 100.0) / 100.0;
    };
    CHECK(mrounded(77391) == doctest::Approx(0.08));
    CHECK(mrounded(155207) == doctest::Approx(0.16));
    CHECK(mrounded(93113) == doctest::Approx(0.09));
    CHECK(mrounded(309191) == doctest::Approx(0.31));
  }
}

namespace {

ModelDims small_dims() {
  ModelDims d;
  d.k = 4;
  d.hidden1 = 8;
  d.hidden2 = 16;
  d.emb = 32;
  return d;
}

StftModelConfig small_stft() {
  StftModelConfig s;
  s.ecl1 = {6, 8, 2, 2, 2, WindowKind::Boxcar, 8.0, true, true};
  s.ecl2 = {8, 16, 4, 2, 2, WindowKind::Blackman, 8.0, false, true};
  s.fel = {16, 32, 6, 3, 3, WindowKind::Bartlett, 8.0, true, true};
  s.cl = {64, 3, 12, 5, 2, WindowKind::Hann, 8.0, false, true};
  return s;
}

}  // namespace

TEST_CASE("forward determinism and permutation invariance") {
  Rng rng(8);
  auto model = LiteDgcnnModel<double>::build(ModelVariant::Mlp, 3, rng,
                                             small_dims(), small_stft());
  const auto cloud = rng_uniform<double>(rng, -1.0, 1.0, 16, 3);
  const Vector<double> l1 = model.forward(cloud);
  const Vector<double> l2 = model.forward(cloud);
  CHECK(l1 == l2);

  Matrix<double> shuffled(16, 3);
  std::vector<int> perm(16);
  for (int i = 0; i < 16; ++i) perm[i] = (i * 5) % 16;  // 5 coprime to 16
  for (int i = 0; i < 16; ++i) shuffled.row(i) = cloud.row(perm[i]);
  const Vector<double> lp = model.forward(shuffled);
  // mean pooling sums in permuted order, so allow float-reassociation slack
  CHECK(((lp - l1).array().abs() < 1e-12).all());
}

TEST_CASE("too-small clouds rejected") {
  Rng rng(0);
  auto model = LiteDgcnnModel<double>::build(ModelVariant::Mlp, 3, rng,
                                             small_dims());
  CHECK_THROWS_AS(model.forward(Matrix<double>::Zero(4, 3)), DataError);
}

TEST_CASE("end-to-end gradients match finite differences (all variants)") {
  for (auto v : {ModelVariant::Mlp, ModelVariant::StftKan,
                 ModelVariant::StftKanMlp, ModelVariant::FourierKan}) {
    CAPTURE(variant_name(v));
    CHECK(check_model_gradients(v, 99).max_rel_error < 1e-4);
  }
}

TEST_CASE("shared edge weights: batched gradient equals per-edge loop oracle") {
  Rng rng(4);
  auto layer = LinearLayer<double>::init(6, 5, rng);
  const auto edges = rng_uniform<double>(rng, -1.0, 1.0, 4, 6);
  const auto u = rng_uniform<double>(rng, -1.0, 1.0, 4, 5);

  layer.zero_grads();
  layer.forward(edges);
  layer.backward(u);
  std::vector<ParamRef<double>> refs;
  layer.collect_params(refs);
  const Matrix<double> batched_gw = *refs[0].grad;
  const Matrix<double> batched_gb = *refs[1].grad;

  Matrix<double> loop_gw = Matrix<double>::Zero(5, 6);
  Matrix<double> loop_gb = Matrix<double>::Zero(5, 1);
  for (int e = 0; e < 4; ++e) {
    layer.zero_grads();
    layer.forward(edges.row(e));
    layer.backward(u.row(e));
    loop_gw += *refs[0].grad;
    loop_gb += *refs[1].grad;
  }
  CHECK(((batched_gw - loop_gw).array().abs() < 1e-12).all());
  CHECK(((batched_gb - loop_gb).array().abs() < 1e-12).all());
}

TEST_CASE("zero logit gradient produces zero parameter gradients") {
  Rng rng(6);
  auto model = LiteDgcnnModel<double>::build(ModelVariant::StftKan, 3, rng,
                                             small_dims(), small_stft());
  const auto cloud = rng_uniform<double>(rng, -1.0, 1.0, 16, 3);
  model.zero_grads();
  model.forward(cloud);
  model.backward(Vector<double>::Zero(3));
  std::vector<ParamRef<double>> refs;
  model.collect_params(refs);
  for (auto& r : refs) CHECK(r.grad->isZero());
}

TEST_CASE("one small optimizer step decreases single-example loss") {
  for (auto v : {ModelVariant::Mlp, ModelVariant::StftKan,
                 ModelVariant::StftKanMlp, ModelVariant::FourierKan}) {
    CAPTURE(variant_name(v));
    Rng rng(12);
    auto model =
        LiteDgcnnModel<double>::build(v, 3, rng, small_dims(), small_stft());
    const auto cloud = rng_uniform<double>(rng, -1.0, 1.0, 16, 3);
    const int label = 1;
    const Vector<double> weights = Vector<double>::Ones(3);

    auto loss_now = [&]() {
      const Vector<double> logits = model.forward(cloud);
      return static_cast<double>(
          detail::ce_sample_term<double>(logits, label, 1.0, 1.0).first);
    };
    const double before = loss_now();

    model.zero_grads();
    const Vector<double> logits = model.forward(cloud);
    const auto [term, grad] =
        detail::ce_sample_term<double>(logits, label, 1.0, 1.0);
    (void)term;
    model.backward(grad);
    std::vector<ParamRef<double>> refs;
    model.collect_params(refs);
    Adam<double> adam(1e-4, 0.0);
    adam.step(refs);

    CHECK(loss_now() < before);
  }
}
