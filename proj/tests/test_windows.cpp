#include "stftkan/windows.hpp"

#include <doctest.h>

#include <cmath>

using namespace stftkan;

namespace {

// independent I0: integral form, trapezoid quadrature
double i0_quadrature(double x) {
  constexpr double pi = 3.14159265358979323846;
  const int steps = 20000;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double theta = pi * i / steps;
    const double f = std::exp(x * std::cos(theta));
    sum += (i == 0 || i == steps) ? 0.5 * f : f;
  }
  return sum / steps;
}

}  // namespace

TEST_CASE("window table values") {
  SUBCASE("boxcar W=4") {
    const auto h = make_window<double>({WindowKind::Boxcar, 4});
    for (int n = 0; n < 4; ++n) CHECK(h(n) == 1.0);
  }
  SUBCASE("hann W=3") {
    const auto h = make_window<double>({WindowKind::Hann, 3});
    CHECK(h(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(h(1) == doctest::Approx(1.0));
    CHECK(h(2) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("hamming W=2") {
    const auto h = make_window<double>({WindowKind::Hamming, 2});
    CHECK(h(0) == doctest::Approx(0.08));
    CHECK(h(1) == doctest::Approx(0.08));
  }
  SUBCASE("blackman W=3 endpoint") {
    const auto h = make_window<double>({WindowKind::Blackman, 3});
    CHECK(h(0) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("kaiser beta=0 is boxcar") {
    const auto h = make_window<double>({WindowKind::Kaiser, 5, 0.0});
    for (int n = 0; n < 5; ++n) CHECK(h(n) == doctest::Approx(1.0));
  }
  SUBCASE("kaiser beta=8 W=7 against quadrature oracle") {
    const auto h = make_window<double>({WindowKind::Kaiser, 7, 8.0});
    CHECK(h(0) == doctest::Approx(h(6)));
    CHECK(h(3) == h.maxCoeff());
    const double i0b = i0_quadrature(8.0);
    for (int n = 0; n < 7; ++n) {
      const double t = 2.0 * n / 6.0 - 1.0;
      const double expected = i0_quadrature(8.0 * std::sqrt(1.0 - t * t)) / i0b;
      CHECK(h(n) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
  SUBCASE("W=1 returns [1] for every kind") {
    for (auto kind : {WindowKind::Boxcar, WindowKind::Hann, WindowKind::Hamming,
                      WindowKind::Bartlett, WindowKind::Blackman,
                      WindowKind::Kaiser}) {
      const auto h = make_window<double>({kind, 1});
      REQUIRE(h.size() == 1);
      CHECK(h(0) == 1.0);
    }
  }
}

TEST_CASE("window properties") {
  for (auto kind : {WindowKind::Boxcar, WindowKind::Hann, WindowKind::Hamming,
                    WindowKind::Bartlett, WindowKind::Blackman,
                    WindowKind::Kaiser}) {
    for (int W : {2, 3, 8, 17, 64}) {
      const auto h = make_window<double>({kind, W, 4.0});
      for (int n = 0; n < W; ++n) {
        CHECK(h(n) == doctest::Approx(h(W - 1 - n)).epsilon(1e-12));
        CHECK(h(n) >= -1e-12);
        CHECK(h(n) <= 1.0 + 1e-12);
      }
    }
  }
  SUBCASE("bartlett midpoint is 1 for odd W") {
    for (int W : {3, 5, 21}) {
      const auto h = make_window<double>({WindowKind::Bartlett, W});
      CHECK(h(W / 2) == doctest::Approx(1.0));
    }
  }
  SUBCASE("name round-trip and unknown names") {
    for (auto kind : {WindowKind::Boxcar, WindowKind::Kaiser})
      CHECK(window_from_name(window_name(kind)) == kind);
    CHECK_THROWS_AS(window_from_name("tukey"), ConfigError);
  }
}
