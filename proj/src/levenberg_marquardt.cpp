// Copyright 2026 The nerfplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nerfplan/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nerfplan {
namespace {

constexpr double kMaxLambda = 1e20;

// Central differences, falling back to a one-sided difference when one of
// the probes leaves the domain.
bool numeric_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& r0, double rel_step,
                      Eigen::MatrixXd& jac) {
  const Eigen::Index n = x.size();
  const Eigen::Index m = r0.size();
  Eigen::VectorXd plus(m);
  Eigen::VectorXd minus(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = rel_step * std::max(std::abs(x[i]), 1.0);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h;
    xm[i] -= h;
    const bool ok_plus = fn(xp, plus);
    const bool ok_minus = fn(xm, minus);
    if (ok_plus && ok_minus) {
      jac.col(i) = (plus - minus) / (xp[i] - xm[i]);
    } else if (ok_plus) {
      jac.col(i) = (plus - r0) / (xp[i] - x[i]);
    } else if (ok_minus) {
      jac.col(i) = (r0 - minus) / (x[i] - xm[i]);
    } else {
      return false;
    }
  }
  return jac.allFinite();
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residual_fn,
                             const Eigen::VectorXd& start, int residual_count,
                             const LmOptions& options) {
  LmResult result;
  result.params = start;
  result.sse = std::numeric_limits<double>::infinity();

  Eigen::VectorXd r(residual_count);
  if (!residual_fn(start, r) || !r.allFinite()) return result;
  double sse = r.squaredNorm();

  const Eigen::Index n = start.size();
  Eigen::VectorXd x = start;
  Eigen::MatrixXd jac(residual_count, n);
  Eigen::VectorXd trial_r(residual_count);
  double lambda = options.initial_lambda;
  bool need_jacobian = true;

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (sse == 0.0) {
      result.converged = true;
      break;
    }
    if (need_jacobian) {
      if (!numeric_jacobian(residual_fn, x, r, options.fd_step, jac)) break;
      need_jacobian = false;
    }

    // Marquardt scaling: damp each direction by its own curvature.
    Eigen::VectorXd diag = jac.colwise().squaredNorm().transpose();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (diag[i] <= 0.0) diag[i] = 1.0;
    }
    const Eigen::VectorXd col_scale = diag.cwiseSqrt();

    // Solve min |J d + r|^2 + lambda |D d|^2 in scaled variables y = D d.
    Eigen::MatrixXd aug(residual_count + n, n);
    aug.topRows(residual_count) = jac * col_scale.cwiseInverse().asDiagonal();
    aug.bottomRows(n) =
        std::sqrt(lambda) * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(residual_count + n);
    rhs.head(residual_count) = -r;
    const Eigen::VectorXd y = aug.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd step = y.cwiseQuotient(col_scale);

    const Eigen::VectorXd trial = x + step;
    const bool ok = step.allFinite() && residual_fn(trial, trial_r) &&
                    trial_r.allFinite();
    const double trial_sse = ok ? trial_r.squaredNorm()
                                : std::numeric_limits<double>::infinity();
    if (trial_sse < sse) {
      const double drop = (sse - trial_sse) / sse;
      x = trial;
      r = trial_r;
      sse = trial_sse;
      lambda = std::max(lambda / options.lambda_factor, 1e-300);
      need_jacobian = true;
      if (drop < options.relative_tolerance) {
        result.converged = true;
        ++iter;
        break;
      }
    } else {
      lambda *= options.lambda_factor;
      if (lambda > kMaxLambda) {
        // No descent direction left at working precision.
        result.converged = true;
        break;
      }
    }
  }

  result.params = x;
  result.sse = sse;
  result.iterations = iter;
  return result;
}

}  // namespace nerfplan
