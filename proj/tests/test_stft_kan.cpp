#include "stftkan/stft_kan.hpp"

#include "stftkan/gradcheck_suite.hpp"

#include <doctest.h>

#include <cmath>

using namespace stftkan;

TEST_CASE("num_windows framing arithmetic") {
  SUBCASE("sliding offsets 0,2,4") {
    const auto fr = num_windows(6, 2, 2);
    CHECK(fr.num_windows == 3);
    CHECK(fr.padded_len == 6);
  }
  SUBCASE("classifier-width framing") {
    const auto fr = num_windows(2048, 197, 10);
    CHECK(fr.num_windows == 186);
    CHECK(fr.padded_len == 2047);
  }
  SUBCASE("exact single frame") {
    CHECK(num_windows(28, 28, 5).num_windows == 1);
    CHECK(num_windows(28, 28, 1).num_windows == 1);
  }
  SUBCASE("short input pads to one frame") {
    const auto fr = num_windows(3, 5, 1);
    CHECK(fr.num_windows == 1);
    CHECK(fr.padded_len == 5);
  }
}

TEST_CASE("frame extraction") {
  SUBCASE("boxcar exact slicing") {
    StftKanConfig cfg{4, 1, 2, 2, 1, WindowKind::Boxcar};
    StftKanLayer<double> layer(cfg);
    Vector<double> x(4);
    x << 1, 2, 3, 4;
    const auto frames = layer.frame(x);
    REQUIRE(frames.rows() == 2);
    CHECK(frames(0, 0) == 1);
    CHECK(frames(0, 1) == 2);
    CHECK(frames(1, 0) == 3);
    CHECK(frames(1, 1) == 4);
  }
  SUBCASE("tail beyond the last full frame is dropped") {
    StftKanConfig cfg{3, 1, 2, 2, 1, WindowKind::Boxcar};
    StftKanLayer<double> layer(cfg);
    Vector<double> x(3);
    x << 1, 2, 3;
    const auto frames = layer.frame(x);
    REQUIRE(frames.rows() == 1);
    CHECK(frames(0, 0) == 1);
    CHECK(frames(0, 1) == 2);
  }
  SUBCASE("d_in < W pads within the single frame") {
    StftKanConfig cfg{1, 1, 3, 1, 1, WindowKind::Hamming};
    StftKanLayer<double> layer(cfg);
    const auto h = make_window<double>({WindowKind::Hamming, 3});
    Vector<double> x(1);
    x << 5;
    const auto frames = layer.frame(x);
    REQUIRE(frames.rows() == 1);
    CHECK(frames(0, 0) == doctest::Approx(5 * h(0)));
    CHECK(frames(0, 1) == 0);
    CHECK(frames(0, 2) == 0);
  }
}

TEST_CASE("forward hand example") {
  // W=2 basis: cos(pi*n) = {1,-1}, sin identically 0
  StftKanConfig cfg{4, 1, 2, 2, 1, WindowKind::Boxcar, 8.0, false, true};
  StftKanLayer<double> layer(cfg);
  layer.a().setOnes();
  layer.b().setZero();
  layer.bias().setZero();
  Matrix<double> x(1, 4);
  x << 1, 2, 3, 4;
  const auto y = layer.forward(x);
  CHECK(y(0, 0) == doctest::Approx(-2.0));

  SUBCASE("matching backward hand example") {
    layer.zero_grads();
    Matrix<double> grad_out(1, 1);
    grad_out << 1;
    layer.forward(x);
    layer.backward(grad_out);
    std::vector<ParamRef<double>> params;
    layer.collect_params(params);
    // grad_a = Y_cos = [-1, -1]; grad_bias = 1
    CHECK((*params[0].grad)(0, 0) == doctest::Approx(-1.0));
    CHECK((*params[0].grad)(0, 1) == doctest::Approx(-1.0));
    CHECK((*params[2].grad)(0, 0) == doctest::Approx(1.0));
  }
}

TEST_CASE("forward linearity") {
  Rng rng(5);
  StftKanConfig cfg{12, 3, 4, 3, 2, WindowKind::Hann, 8.0, false, true};
  auto layer = StftKanLayer<double>::init(cfg, rng);
  const auto x1 = rng_uniform<double>(rng, -1.0, 1.0, 2, 12);
  const auto x2 = rng_uniform<double>(rng, -1.0, 1.0, 2, 12);

  SUBCASE("all-zero input gives exactly the bias") {
    const auto y = layer.forward(Matrix<double>::Zero(2, 12));
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c) CHECK(y(r, c) == layer.bias()(c, 0));
  }
  SUBCASE("additivity up to bias") {
    const auto y1 = layer.forward(x1);
    const auto y2 = layer.forward(x2);
    const auto y12 = layer.forward(x1 + x2);
    Matrix<double> bias_row = layer.bias().transpose().replicate(2, 1);
    CHECK(((y12 - (y1 + y2 - bias_row)).array().abs() < 1e-10).all());
  }
  SUBCASE("scaling") {
    const auto y1 = layer.forward(x1);
    const auto ys = layer.forward(Matrix<double>(2.5 * x1));
    Matrix<double> bias_row = layer.bias().transpose().replicate(2, 1);
    const Matrix<double> expected = 2.5 * (y1 - bias_row) + bias_row;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c)
        CHECK(ys(r, c) ==
              doctest::Approx(expected(r, c)).epsilon(1e-5));
  }
  SUBCASE("doubling all parameters doubles the output") {
    const auto y1 = layer.forward(x1);
    layer.a() *= 2.0;
    layer.b() *= 2.0;
    layer.bias() *= 2.0;
    const auto y2 = layer.forward(x1);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c)
        CHECK(y2(r, c) == doctest::Approx(2.0 * y1(r, c)));
  }
}

TEST_CASE("parameter count formula") {
  Rng rng(1);
  for (auto [d_in, d_out, W, S, G, bias] :
       {std::tuple{6, 64, 2, 2, 3, true}, std::tuple{64, 128, 28, 5, 1, true},
        std::tuple{128, 1024, 52, 20, 7, true},
        std::tuple{2048, 7, 197, 10, 6, false}}) {
    StftKanConfig cfg{d_in, d_out, W, S, G, WindowKind::Boxcar, 8.0, false, bias};
    auto layer = StftKanLayer<double>::init(cfg, rng);
    const auto n_w = num_windows(d_in, W, S).num_windows;
    CHECK(layer.param_count() ==
          2LL * d_out * n_w * G + (bias ? d_out : 0));
  }
}

TEST_CASE("initialization") {
  StftKanConfig cfg{16, 4, 4, 2, 3, WindowKind::Hann, 8.0, true, true};
  SUBCASE("seed-fixed determinism") {
    Rng r1(9), r2(9);
    auto l1 = StftKanLayer<double>::init(cfg, r1);
    auto l2 = StftKanLayer<double>::init(cfg, r2);
    CHECK(l1.a() == l2.a());
    CHECK(l1.b() == l2.b());
  }
  SUBCASE("smooth init scales harmonic k by k^-2") {
    Rng r1(9);
    auto smooth = StftKanLayer<double>::init(cfg, r1);
    cfg.smooth_init = false;
    Rng r2(9);
    auto plain = StftKanLayer<double>::init(cfg, r2);
    const int G = cfg.grid_size;
    const int n_w = smooth.windows();
    for (int w = 0; w < n_w; ++w)
      for (int k = 1; k <= G; ++k)
        for (int o = 0; o < cfg.d_out; ++o) {
          const double scale = 1.0 / (k * k);
          CHECK(smooth.a()(o, w * G + k - 1) ==
                doctest::Approx(scale * plain.a()(o, w * G + k - 1)));
        }
  }
  SUBCASE("bias starts at zero") {
    Rng r(3);
    auto layer = StftKanLayer<double>::init(cfg, r);
    CHECK(layer.bias().isZero());
  }
}

TEST_CASE("gradients match finite differences") {
  Rng rng(21);
  // overlap (S < W), padding (d_in < W), and a plain config
  for (auto cfg : {StftKanConfig{10, 4, 4, 2, 3, WindowKind::Hann, 8.0, false, true},
                   StftKanConfig{3, 2, 5, 1, 2, WindowKind::Blackman, 8.0, true, true},
                   StftKanConfig{8, 3, 4, 4, 2, WindowKind::Kaiser, 4.0, false, true},
                   StftKanConfig{9, 2, 4, 3, 2, WindowKind::Bartlett, 8.0, false, false}}) {
    auto layer = StftKanLayer<double>::init(cfg, rng);
    const auto x = rng_uniform<double>(rng, -1.0, 1.0, 3, cfg.d_in);
    const auto r = check_layer_gradients(layer, x, rng);
    CHECK(r.max_rel_error < 1e-5);
  }
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  Rng rng(2);
  StftKanConfig cfg{8, 2, 4, 2, 2, WindowKind::Hann, 8.0, false, true};
  auto layer = StftKanLayer<double>::init(cfg, rng);
  const auto x = rng_uniform<double>(rng, -1.0, 1.0, 2, 8);
  layer.zero_grads();
  layer.forward(x);
  const auto grad_x = layer.backward(Matrix<double>::Zero(2, 2));
  CHECK(grad_x.isZero());
  std::vector<ParamRef<double>> params;
  layer.collect_params(params);
  for (auto& p : params) CHECK(p.grad->isZero());
}

TEST_CASE("W=2 sine basis is dead: grad_b is exactly zero") {
  Rng rng(13);
  StftKanConfig cfg{6, 3, 2, 2, 4, WindowKind::Boxcar, 8.0, false, true};
  auto layer = StftKanLayer<double>::init(cfg, rng);
  const auto x = rng_uniform<double>(rng, -1.0, 1.0, 4, 6);
  layer.zero_grads();
  layer.forward(x);
  layer.backward(rng_uniform<double>(rng, -1.0, 1.0, 4, 3));
  CHECK((layer.grad_b().array() == 0.0).all());
}

TEST_CASE("non-finite input is rejected with the layer name") {
  StftKanConfig cfg{4, 1, 2, 2, 1, WindowKind::Boxcar};
  StftKanLayer<double> layer(cfg);
  layer.set_name("ecl1.0");
  Matrix<double> x = Matrix<double>::Zero(1, 4);
  x(0, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(layer.forward(x),
                       doctest::Contains("ecl1.0"), NumericError);
}

TEST_CASE("uniform-convergence surrogate: truncation gap under the tail bound") {
  // phi_{G,w} with a_k = b_k = k^-2 on a fixed windowed frame; the gap to
  // the 4G-term evaluation must sit under the Cauchy-Schwarz tail bound
  // and shrink monotonically in G.
  const int W = 64;
  const auto h = make_window<double>({WindowKind::Hann, W});
  Rng rng(3);
  Vector<double> x(W);
  for (int n = 0; n < W; ++n) x(n) = rng.uniform(-1.0, 1.0);

  auto partial = [&](int terms, int n) {
    double s = 0.0;
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int k = 1; k <= terms; ++k) {
      const double theta = two_pi * k * n / W;
      s += (std::cos(theta) + std::sin(theta)) / (static_cast<double>(k) * k);
    }
    return h(n) * x(n) * s;
  };

  double bound_c = 0.0;
  for (int n = 0; n < W; ++n) bound_c = std::max(bound_c, std::abs(h(n) * x(n)));

  double prev_gap = std::numeric_limits<double>::infinity();
  for (int G : {1, 2, 4, 8, 16}) {
    double gap = 0.0;
    for (int n = 0; n < W; ++n)
      gap = std::max(gap, std::abs(partial(4 * G, n) - partial(G, n)));
    double tail = 0.0;  // sum_{k>G} 2 k^-4
    for (int k = G + 1; k <= 1000000; ++k)
      tail += 2.0 / (static_cast<double>(k) * k * k * k);
    const double bound = bound_c * std::sqrt(2.0) * std::sqrt(tail);
    CHECK(gap <= bound);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}
