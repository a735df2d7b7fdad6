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
#include <span>
#include <string_view>

#include "dualmpc/linalg.hpp"

namespace dualmpc
{

  struct ProgramValues
  {
    double objective = 0.0;
    Vector constraints; // g(u) <= 0
  };

  struct ProgramDerivatives
  {
    double objective = 0.0;
    Vector constraints;
    Vector gradient; // d objective / du
    Matrix jacobian; // d constraints / du, one row per constraint
  };

  /// A smooth program over `num_blocks()` blocks of `block_dim()` variables:
  ///
  ///     min f(u)  s.t.  g(u) <= 0,  lb <= u <= ub,  sum of each block = 1.
  ///
  /// The linear equality structure is fixed (one simplex row per block); the
  /// solver relies on it for projection and for keeping iterates on the
  /// equality manifold.
  class SmoothProgram
  {
  public:
    virtual ~SmoothProgram() = default;

    virtual std::size_t num_blocks() const = 0;
    virtual std::size_t block_dim() const = 0;
    virtual std::size_t num_inequalities() const = 0;
    virtual const Vector &lower_bounds() const = 0;
    virtual const Vector &upper_bounds() const = 0;

    virtual ProgramValues evaluate(std::span<const double> u) const = 0;
    virtual ProgramDerivatives evaluate_with_derivatives(std::span<const double> u) const = 0;

    /// Programs without exact derivatives return false here; the solver then
    /// differentiates `evaluate` by central differences.
    virtual bool has_analytic_derivatives() const { return true; }

    std::size_t num_variables() const { return num_blocks() * block_dim(); }
  };

  enum class SolveStatus
  {
    Optimal,
    MaxIterations,
    Infeasible,
    NumericalFailure,
  };

  std::string_view to_string(SolveStatus status) noexcept;

  struct SolverStats
  {
    SolveStatus status = SolveStatus::NumericalFailure;
    std::size_t iterations = 0;
    double kkt_residual = 0.0;
    double constraint_violation = 0.0;
    std::size_t evaluations = 0;
  };

} // namespace dualmpc
