#include "stftkan/fourier_kan.hpp"

#include "stftkan/gradcheck_suite.hpp"

#include <doctest.h>

#include <cmath>

using namespace stftkan;

TEST_CASE("fourier-kan forward") {
  SUBCASE("x = 0 gives sum of cosine coefficients plus bias") {
    Rng rng(1);
    auto layer = FourierKanLayer<double>::init(4, 3, 2, rng);
    const auto y = layer.forward(Matrix<double>::Zero(1, 4));
    for (int o = 0; o < 3; ++o) {
      const double expected = layer.a().row(o).sum() + layer.bias()(o, 0);
      CHECK(y(0, o) == doctest::Approx(expected));
    }
  }
  SUBCASE("pure sine unit: sin(pi/2) = 1") {
    FourierKanLayer<double> layer(1, 1, 1);
    layer.b()(0, 0) = 1.0;
    Matrix<double> x(1, 1);
    x << 1.5707963267948966;
    CHECK(layer.forward(x)(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("2-pi periodicity per coordinate") {
    Rng rng(7);
    auto layer = FourierKanLayer<double>::init(3, 2, 3, rng);
    const auto x = rng_uniform<double>(rng, -1.0, 1.0, 1, 3);
    const auto y = layer.forward(x);
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < 3; ++i) {
      Matrix<double> shifted = x;
      shifted(0, i) += two_pi;
      const auto ys = layer.forward(shifted);
      for (int o = 0; o < 2; ++o)
        CHECK(ys(0, o) == doctest::Approx(y(0, o)).epsilon(1e-5));
    }
  }
}

TEST_CASE("fourier-kan parameter count is linear in d_in") {
  Rng rng(2);
  for (int d_in : {1, 8, 64}) {
    auto layer = FourierKanLayer<double>::init(d_in, 5, 3, rng);
    CHECK(layer.param_count() == 2LL * 5 * d_in * 3 + 5);
  }
}

TEST_CASE("fourier-kan gradients match finite differences") {
  Rng rng(17);
  for (auto [d_in, d_out, g] : {std::tuple{5, 3, 2}, std::tuple{2, 4, 5}}) {
    auto layer = FourierKanLayer<double>::init(d_in, d_out, g, rng);
    const auto x = rng_uniform<double>(rng, -2.0, 2.0, 3, d_in);
    CHECK(check_layer_gradients(layer, x, rng).max_rel_error < 1e-5);
  }
}

TEST_CASE("fourier-kan rejects non-finite input") {
  FourierKanLayer<double> layer(2, 1, 1);
  layer.set_name("fel.0");
  Matrix<double> x(1, 2);
  x << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(layer.forward(x), NumericError);
}
