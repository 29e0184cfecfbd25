#pragma once

#include "stftkan/core.hpp"

#include <cmath>
#include <functional>

namespace stftkan {

// Central finite differences against a scalar-valued function of one
// tensor. Runs in double; h = 1e-6 by default.
struct GradCheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

// The 1e-5 denominator floor keeps near-zero gradients (where central
// differences are roundoff-limited, noise ~ eps*|L|/2h ~ 1e-10) judged by
// absolute rather than relative error.
inline double relative_error(double analytic, double numeric) {
  if (std::abs(analytic) < 1e-10 && std::abs(numeric) < 1e-10) return 0.0;
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-5});
  return std::abs(analytic - numeric) / denom;
}

inline GradCheckResult finite_difference_check(
    Matrix<double>& param, const Matrix<double>& analytic_grad,
    const std::function<double()>& loss, double h = 1e-6) {
  GradCheckResult r;
  for (Eigen::Index i = 0; i < param.rows(); ++i)
    for (Eigen::Index j = 0; j < param.cols(); ++j) {
      const double saved = param(i, j);
      param(i, j) = saved + h;
      const double up = loss();
      param(i, j) = saved - h;
      const double down = loss();
      param(i, j) = saved;
      const double numeric = (up - down) / (2.0 * h);
      r.max_rel_error =
          std::max(r.max_rel_error, relative_error(analytic_grad(i, j), numeric));
      r.max_abs_error =
          std::max(r.max_abs_error, std::abs(analytic_grad(i, j) - numeric));
    }
  return r;
}

}  // namespace stftkan
