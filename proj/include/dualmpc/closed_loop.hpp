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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dualmpc/belief.hpp"
#include "dualmpc/ocp.hpp"
#include "dualmpc/sqp.hpp"
#include "dualmpc/stochastic.hpp"

namespace dualmpc
{

  /// Disturbance realizations for one run: w_t ~ N(0, Q) and v_t ~ N(0, R)
  /// for t = 0..T-1, drawn up front so every formulation consumes the same
  /// sequence regardless of when (or whether) it fails.
  struct RunNoise
  {
    std::vector<Vector> w;
    Vector v;

    static RunNoise draw(RngStream &process, RngStream &measurement, const SystemParams &params);
    static RunNoise zero(const SystemParams &params);

    /// Hash of the exact bit patterns of all draws.
    std::uint64_t fingerprint() const;
  };

  struct CastRecord
  {
    std::size_t t = 0;
    Vector x_true;
    Vector x_hat;           // prior mean used to plan cast t
    UpperTriangular P_sqrt; // prior factor used to plan cast t
    Vector u;
    double y = 0.0;
    double stage_cost = 0.0;
    double backoff = 0.0;
    SolverStats solver;
    std::size_t starts = 0; // solver starts tried for this cast
  };

  struct RunOutcome
  {
    double total_cost = 0.0;
    std::size_t violations = 0;         // casts with measured y_t > y_max
    std::size_t content_violations = 0; // casts with noiseless u_t^T x_t > y_max
    bool failed = false;
    std::size_t failure_cast = 0;
    std::string failure_reason;
  };

  struct ClosedLoopTrace
  {
    FormulationKind kind = FormulationKind::Nominal;
    double alpha = 0.0;
    double y_max = 0.0;
    std::uint64_t noise_fingerprint = 0;
    bool multistart = false;
    std::vector<CastRecord> casts;
    bool failed = false;
    std::size_t failure_cast = 0;
    std::string failure_reason;

    double total_cost() const;
    /// Casts whose measured output exceeds y_max.
    std::size_t violations() const;
    /// Casts whose noiseless copper content u_t^T x_t exceeds y_max.
    std::size_t content_violations() const;
    RunOutcome outcome() const;
  };

  struct ClosedLoopOptions
  {
    SolverConfig solver;
    /// Solve dual kinds from both the shifted plan and the uniform guess and
    /// keep the better feasible result.
    bool multistart = false;
    /// Replaces the optimizer when set (used for open-loop excitation studies).
    std::function<Vector(const BeliefState &belief)> control_override;
  };

  /// Receding-horizon loop: plan at the current belief, apply the first
  /// control, measure, advance the plant, update the belief; T casts.
  /// Never throws for solver trouble: a failing cast ends the run and marks
  /// the trace failed.
  ClosedLoopTrace run_closed_loop(const SystemParams &params, FormulationKind kind, const RunNoise &noise,
                                  const BeliefState &initial, const ClosedLoopOptions &options = {});

  ClosedLoopTrace run_closed_loop(const SystemParams &params, FormulationKind kind, const RunNoise &noise,
                                  const Vector &x_hat_0, const ClosedLoopOptions &options = {});

  /// (sum of violations) / (runs * T); throws EmptyInput for no runs.
  double violation_share(std::span<const RunOutcome> outcomes, std::size_t T);

  /// Same ratio for the noiseless content u_t^T x_t.
  double content_violation_share(std::span<const RunOutcome> outcomes, std::size_t T);

  /// Columns: t, x_true_i, x_hat_i, P_diag_i, u_i, y, y_max, stage_cost,
  /// backoff, solver_status. Copper values are fractions.
  void write_trace_csv(const ClosedLoopTrace &trace, std::ostream &out);

  // Plotting data; copper is in % by weight.

  /// t, x_true_i, x_hat_i, sigma_i (sqrt of the prior variance).
  void write_states_figure_csv(const ClosedLoopTrace &trace, std::ostream &out);
  /// t, u_i (mass fractions).
  void write_controls_figure_csv(const ClosedLoopTrace &trace, std::ostream &out);
  /// t, y, y_max, content (u^T x_true), backoff.
  void write_output_figure_csv(const ClosedLoopTrace &trace, std::ostream &out);

} // namespace dualmpc
