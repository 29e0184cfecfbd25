#pragma once

#include "stftkan/core.hpp"

#include <cmath>
#include <string>

namespace stftkan {

enum class WindowKind : std::uint8_t {
  Boxcar = 0,
  Hann = 1,
  Hamming = 2,
  Bartlett = 3,
  Blackman = 4,
  Kaiser = 5,
};

struct WindowSpec {
  WindowKind kind = WindowKind::Boxcar;
  int width = 1;
  double beta = 8.0;  // Kaiser only, ignored otherwise
};

inline const char* window_name(WindowKind k) {
  switch (k) {
    case WindowKind::Boxcar: return "boxcar";
    case WindowKind::Hann: return "hann";
    case WindowKind::Hamming: return "hamming";
    case WindowKind::Bartlett: return "bartlett";
    case WindowKind::Blackman: return "blackman";
    case WindowKind::Kaiser: return "kaiser";
  }
  throw ConfigError("unknown window kind");
}

inline WindowKind window_from_name(const std::string& name) {
  if (name == "boxcar") return WindowKind::Boxcar;
  if (name == "hann") return WindowKind::Hann;
  if (name == "hamming") return WindowKind::Hamming;
  if (name == "bartlett") return WindowKind::Bartlett;
  if (name == "blackman") return WindowKind::Blackman;
  if (name == "kaiser") return WindowKind::Kaiser;
  throw ConfigError("unknown window kind: " + name);
}

// Modified Bessel function of the first kind, order zero.
// Power series summed until the term drops below 1e-12 relative.
inline double bessel_i0(double x) {
  const double half = x / 2.0;
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < 1000; ++j) {
    term *= (half / j) * (half / j);
    sum += term;
    if (term < 1e-12 * sum) break;
  }
  return sum;
}

template <typename S>
Vector<S> make_window(const WindowSpec& spec) {
  const int W = spec.width;
  if (W < 1) throw ConfigError("window width must be >= 1");
  Vector<S> h(W);
  if (W == 1) {
    // single-sample window is the identity for every kind
    h(0) = S(1);
    return h;
  }
  constexpr double pi = 3.14159265358979323846;
  const double denom = W - 1.0;
  switch (spec.kind) {
    case WindowKind::Boxcar:
      h.setOnes();
      break;
    case WindowKind::Hann:
      for (int n = 0; n < W; ++n)
        h(n) = static_cast<S>(0.5 * (1.0 - std::cos(2.0 * pi * n / denom)));
      break;
    case WindowKind::Hamming:
      for (int n = 0; n < W; ++n)
        h(n) = static_cast<S>(0.54 - 0.46 * std::cos(2.0 * pi * n / denom));
      break;
    case WindowKind::Bartlett:
      for (int n = 0; n < W; ++n)
        h(n) = static_cast<S>(1.0 - std::abs(2.0 * n / denom - 1.0));
      break;
    case WindowKind::Blackman:
      for (int n = 0; n < W; ++n)
        h(n) = static_cast<S>(0.42 - 0.5 * std::cos(2.0 * pi * n / denom) +
                              0.08 * std::cos(4.0 * pi * n / denom));
      break;
    case WindowKind::Kaiser: {
      if (spec.beta < 0.0) throw ConfigError("kaiser beta must be >= 0");
      const double i0b = bessel_i0(spec.beta);
      for (int n = 0; n < W; ++n) {
        const double t = 2.0 * n / denom - 1.0;
        h(n) = static_cast<S>(bessel_i0(spec.beta * std::sqrt(1.0 - t * t)) / i0b);
      }
      break;
    }
    default:
      throw ConfigError("unknown window kind");
  }
  return h;
}

}  // namespace stftkan
