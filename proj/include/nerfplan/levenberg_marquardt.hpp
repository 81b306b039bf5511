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

#pragma once

#include <functional>

#include <Eigen/Dense>

namespace nerfplan {

struct LmOptions {
  int max_iterations = 200;
  // Stop after an accepted step whose relative drop in the residual sum of
  // squares falls below this.
  double relative_tolerance = 1e-10;
  double initial_lambda = 1e-3;
  double lambda_factor = 10.0;
  // Relative central-difference step per parameter.
  double fd_step = 1e-6;
};

struct LmResult {
  Eigen::VectorXd params;
  double sse = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Fills `residuals` (already sized) for the given parameters. Returns false
// when the parameters lie outside the model's domain; the step that produced
// them is then rejected like any step that fails to reduce the residual.
using ResidualFn =
    std::function<bool(const Eigen::VectorXd& params, Eigen::VectorXd& residuals)>;

// Levenberg-Marquardt with Marquardt diagonal damping and a central
// finite-difference Jacobian. Damping starts at initial_lambda, is
// multiplied by lambda_factor after a rejected step and divided by it after
// an accepted one. The damped subproblem is solved by column-pivoting QR on
// the augmented Jacobian. The result has sse = +inf when
// the starting point itself is outside the domain.
LmResult levenberg_marquardt(const ResidualFn& residual_fn,
                             const Eigen::VectorXd& start, int residual_count,
                             const LmOptions& options = {});

}  // namespace nerfplan
