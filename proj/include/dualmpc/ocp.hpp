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

#include <atomic>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "dualmpc/belief.hpp"
#include "dualmpc/plant.hpp"
#include "dualmpc/program.hpp"

namespace dualmpc
{

  enum class FormulationKind
  {
    Nominal,
    Robust,
    ImplicitDual,
    ExplicitDual,
  };

  inline constexpr FormulationKind kAllKinds[] = {FormulationKind::Nominal, FormulationKind::Robust,
                                                  FormulationKind::ImplicitDual, FormulationKind::ExplicitDual};

  /// "nominal", "robust", "implicit-dual", "explicit-dual".
  std::string_view to_string(FormulationKind kind) noexcept;
  std::optional<FormulationKind> parse_kind(std::string_view name) noexcept;

  inline bool is_dual(FormulationKind kind)
  {
    return kind == FormulationKind::ImplicitDual || kind == FormulationKind::ExplicitDual;
  }

  /// Scrap selection over `stages` stacked controls u_0..u_{S-1}:
  ///
  ///     min  sum_k p^T u_k + alpha ||F_k||_F^2
  ///     s.t. u_k^T x_hat + gamma ||F_k u_k|| - y_max <= 0,  k = 0..S-1
  ///          u_min <= u_k <= u_max,  1^T u_k = 1
  ///
  /// with F_0 the current prior factor and F_{k+1} = propagate_sqrt(F_k, u_k).
  /// Nominal is S = 1, gamma = 0; robust is S = 1; the dual kinds use S = N + 1.
  class ScrapSelectionProblem final : public SmoothProgram
  {
  public:
    ScrapSelectionProblem(FormulationKind kind, std::size_t stages, const BeliefState &belief,
                          const SystemParams &params, double gamma, double alpha);
    ScrapSelectionProblem(const ScrapSelectionProblem &other);
    ScrapSelectionProblem &operator=(const ScrapSelectionProblem &) = delete;

    FormulationKind kind() const noexcept { return kind_; }
    std::size_t stages() const noexcept { return stages_; }
    double gamma() const noexcept { return gamma_; }
    double alpha() const noexcept { return alpha_; }
    const BeliefState &belief() const noexcept { return belief_; }

    std::size_t num_blocks() const override { return stages_; }
    std::size_t block_dim() const override { return n_; }
    std::size_t num_inequalities() const override { return stages_; }
    const Vector &lower_bounds() const override { return lower_; }
    const Vector &upper_bounds() const override { return upper_; }

    /// Throws NonFinite if any intermediate is NaN or Inf.
    ProgramValues evaluate(std::span<const double> u) const override;
    ProgramDerivatives evaluate_with_derivatives(std::span<const double> u) const override;

    /// Predicted prior factors F_0..F_{S-1} along u.
    std::vector<UpperTriangular> predicted_factors(std::span<const double> u) const;

    /// gamma ||F_k u_k|| per stage.
    Vector backoffs(std::span<const double> u) const;

    std::size_t evaluation_count() const noexcept { return evaluations_.load(std::memory_order_relaxed); }

  private:
    template <typename T>
    void accumulate_stages(std::span<const T> u, std::size_t first_stage, BasicUpperTriangular<T> factor,
                           T &objective, std::span<T> constraints,
                           std::vector<UpperTriangular> *factors_out) const;

    FormulationKind kind_;
    std::size_t stages_;
    std::size_t n_;
    BeliefState belief_;
    Vector prices_;
    double y_max_;
    double gamma_;
    double alpha_;
    UpperTriangular Q_sqrt_;
    double R_sqrt_;
    Vector lower_;
    Vector upper_;
    mutable std::atomic<std::size_t> evaluations_{0};
  };

  ScrapSelectionProblem build_nominal(const BeliefState &belief, const SystemParams &params);
  ScrapSelectionProblem build_robust(const BeliefState &belief, const SystemParams &params);
  /// N + 1 stages from params.N; ImplicitDual when alpha == 0, ExplicitDual otherwise.
  ScrapSelectionProblem build_dual(const BeliefState &belief, const SystemParams &params, double alpha);
  /// Dispatch on kind; ExplicitDual takes its weight from params.alpha.
  ScrapSelectionProblem build_problem(FormulationKind kind, const BeliefState &belief, const SystemParams &params);

  /// Solved plan over the problem's stages.
  struct Plan
  {
    std::vector<Vector> controls;
    double objective_value = 0.0;
    Vector backoffs;
    std::vector<UpperTriangular> predicted_sqrt_factors; // dual kinds only
    SolverStats solver_stats;
    Vector multipliers; // inequality multipliers of the last QP
  };

} // namespace dualmpc
