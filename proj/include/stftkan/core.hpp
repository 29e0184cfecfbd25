#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stftkan {

// Dense row-major types templated on scalar. Training runs in float;
// gradient checking instantiates everything in double.
template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using IndexMatrix =
    Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexVector = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, 1>;

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const std::string& where) {
  if (!m.allFinite()) throw NumericError("non-finite values in " + where);
}

template <typename S>
Matrix<S> matmul(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions disagree (" +
                         std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + ")");
  return a * b;
}

// Axis convention: axis 0 reduces over rows (one result per column),
// axis 1 reduces over columns (one result per row).
template <typename S>
struct MaxReduction {
  Vector<S> values;
  IndexVector argmax;  // ties broken by lowest index
};

template <typename S>
MaxReduction<S> reduce_max(const Matrix<S>& t, int axis) {
  if (axis != 0 && axis != 1) throw DimensionError("reduce: axis out of range");
  const Eigen::Index out = axis == 0 ? t.cols() : t.rows();
  const Eigen::Index extent = axis == 0 ? t.rows() : t.cols();
  if (extent < 1) throw DimensionError("reduce: empty reduction axis");
  MaxReduction<S> r;
  r.values.resize(out);
  r.argmax.resize(out);
  for (Eigen::Index i = 0; i < out; ++i) {
    S best = axis == 0 ? t(0, i) : t(i, 0);
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < extent; ++j) {
      const S v = axis == 0 ? t(j, i) : t(i, j);
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    r.values(i) = best;
    r.argmax(i) = arg;
  }
  return r;
}

template <typename S>
Vector<S> reduce_sum(const Matrix<S>& t, int axis) {
  if (axis != 0 && axis != 1) throw DimensionError("reduce: axis out of range");
  const Eigen::Index extent = axis == 0 ? t.rows() : t.cols();
  if (extent < 1) throw DimensionError("reduce: empty reduction axis");
  return axis == 0 ? Vector<S>(t.colwise().sum().transpose())
                   : Vector<S>(t.rowwise().sum());
}

template <typename S>
Vector<S> reduce_mean(const Matrix<S>& t, int axis) {
  const Eigen::Index extent = axis == 0 ? t.rows() : t.cols();
  return reduce_sum<S>(t, axis) / static_cast<S>(extent);
}

// Counter-based deterministic generator (splitmix64 over a draw counter).
// Identical seeds give bit-identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("rng: uniform requires lo < hi");
    return lo + (hi - lo) * next_double();
  }

  // uniform integer in [lo, hi] inclusive
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ConfigError("rng: uniform_int requires lo <= hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  double normal() {
    // Box-Muller; two fresh uniforms per draw keeps the stream
    // independent of call grouping.
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j =
          static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

template <typename S>
Matrix<S> rng_uniform(Rng& rng, double lo, double hi, Eigen::Index rows,
                      Eigen::Index cols) {
  if (!(lo < hi)) throw ConfigError("rng_uniform: requires lo < hi");
  Matrix<S> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = static_cast<S>(lo + (hi - lo) * rng.next_double());
  return m;
}

template <typename S>
Matrix<S> rng_normal(Rng& rng, double sigma, Eigen::Index rows, Eigen::Index cols) {
  Matrix<S> m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = static_cast<S>(sigma * rng.normal());
  return m;
}

}  // namespace stftkan
