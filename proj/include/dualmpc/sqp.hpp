/*
 Copyright 2026 The dualmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "dualmpc/ocp.hpp"
#include "dualmpc/program.hpp"

namespace dualmpc
{

  enum class HessianApproximation
  {
    GaussNewtonIdentity,
    DampedBFGS,
  };

  struct SolverConfig
  {
    double kkt_tolerance = 1e-8;
    double feasibility_tolerance = 1e-8;
    std::size_t max_iterations = 200;
    HessianApproximation hessian = HessianApproximation::DampedBFGS;
    double penalty_growth = 10.0;
    double finite_difference_step = 1e-7; // only for programs without exact derivatives

    void validate() const;
    bool operator==(const SolverConfig &) const = default;
  };

  struct SolveResult
  {
    Vector u_star;
    SolveStatus status = SolveStatus::NumericalFailure;
    double kkt_residual = 0.0;
    double constraint_violation = 0.0;
    std::size_t iterations = 0;
    double objective = 0.0;
    std::size_t evaluations = 0;
    Vector multipliers;       // inequality constraints, >= 0
    Vector lower_multipliers; // active lower bounds, >= 0
    Vector upper_multipliers; // active upper bounds, >= 0
    Vector block_multipliers; // one per simplex row (free sign)
  };

  /// Dense SQP: damped-BFGS Hessian, l1 exact-penalty Armijo line search and
  /// a Goldfarb-Idnani QP subproblem over the block simplex, bounds and the
  /// linearized inequalities. An infeasible QP switches to elastic mode with a
  /// single shared slack. The guess is first projected onto the feasible
  /// polytope of the linear constraints; every iterate stays on it.
  SolveResult solve(const SmoothProgram &program, std::span<const double> initial_guess,
                    const SolverConfig &config = {});

  /// Euclidean projection of v onto {sum(u) = 1, lb <= u <= ub}.
  Vector project_simplex_box(std::span<const double> v, std::span<const double> lb, std::span<const double> ub);

  /// Blockwise projection for a program's linear constraint set.
  Vector project_onto_blocks(const SmoothProgram &program, std::span<const double> v);

  /// Central-difference derivatives of `program.evaluate`.
  ProgramDerivatives finite_difference_derivatives(const SmoothProgram &program, std::span<const double> u,
                                                   double step);

  /// Every stage set to 1 / n_x.
  Vector uniform_guess(std::size_t stages, std::size_t n_x);

  /// Previous plan shifted by one stage with its last stage duplicated,
  /// resized to `stages`.
  Vector shifted_guess(const Plan &previous, std::size_t stages);

  Plan make_plan(const ScrapSelectionProblem &problem, const SolveResult &result);

  using ProblemBuilder = std::function<ScrapSelectionProblem(const BeliefState &)>;

  /// Builds the problem at `belief` and solves it from the shifted previous
  /// plan (or the uniform guess when there is none).
  Plan solve_receding(const ProblemBuilder &builder, const BeliefState &belief,
                      const std::optional<Plan> &previous_plan, const SolverConfig &config = {});

} // namespace dualmpc
