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

#include "dualmpc/ocp.hpp"

#include <cmath>

namespace dualmpc
{

  namespace
  {
    constexpr std::size_t kChunk = 8;
    using ChunkDual = Dual<kChunk>;

    void require_finite(double x, const char *what)
    {
      if (!std::isfinite(x))
        fail(ErrorCode::NonFinite, std::string("non-finite ") + what + " in problem evaluation");
    }

    BasicUpperTriangular<ChunkDual> lift(const UpperTriangular &f)
    {
      BasicUpperTriangular<ChunkDual> out(f.dim());
      for (std::size_t i = 0; i < f.dim(); ++i)
        for (std::size_t j = i; j < f.dim(); ++j)
          out.upper(i, j) = ChunkDual(f(i, j));
      return out;
    }
  } // namespace

  std::string_view to_string(FormulationKind kind) noexcept
  {
    switch (kind)
    {
    case FormulationKind::Nominal:
      return "nominal";
    case FormulationKind::Robust:
      return "robust";
    case FormulationKind::ImplicitDual:
      return "implicit-dual";
    case FormulationKind::ExplicitDual:
      return "explicit-dual";
    }
    return "unknown";
  }

  std::optional<FormulationKind> parse_kind(std::string_view name) noexcept
  {
    for (FormulationKind k : kAllKinds)
      if (to_string(k) == name)
        return k;
    return std::nullopt;
  }

  std::string_view to_string(SolveStatus status) noexcept
  {
    switch (status)
    {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::MaxIterations:
      return "MaxIterations";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::NumericalFailure:
      return "NumericalFailure";
    }
    return "Unknown";
  }

  ScrapSelectionProblem::ScrapSelectionProblem(FormulationKind kind, std::size_t stages, const BeliefState &belief,
                                               const SystemParams &params, double gamma, double alpha)
      : kind_(kind), stages_(stages), n_(belief.x_hat.size()), belief_(belief), prices_(params.prices),
        y_max_(params.y_max), gamma_(gamma), alpha_(alpha),
        Q_sqrt_(cholesky_upper_semidefinite(params.Q)), R_sqrt_(std::sqrt(params.R))
  {
    if (stages_ == 0)
      fail(ErrorCode::DimensionMismatch, "a scrap selection problem needs at least one stage");
    if (belief_.P_sqrt.dim() != n_ || prices_.size() != n_ || params.u_min.size() != n_ ||
        params.u_max.size() != n_ || Q_sqrt_.dim() != n_)
      fail(ErrorCode::DimensionMismatch, "belief and parameters disagree on the number of heaps");
    lower_.reserve(stages_ * n_);
    upper_.reserve(stages_ * n_);
    for (std::size_t k = 0; k < stages_; ++k)
    {
      lower_.insert(lower_.end(), params.u_min.begin(), params.u_min.end());
      upper_.insert(upper_.end(), params.u_max.begin(), params.u_max.end());
    }
  }

  ScrapSelectionProblem::ScrapSelectionProblem(const ScrapSelectionProblem &o)
      : kind_(o.kind_), stages_(o.stages_), n_(o.n_), belief_(o.belief_), prices_(o.prices_), y_max_(o.y_max_),
        gamma_(o.gamma_), alpha_(o.alpha_), Q_sqrt_(o.Q_sqrt_), R_sqrt_(o.R_sqrt_), lower_(o.lower_),
        upper_(o.upper_), evaluations_(o.evaluation_count()) {}

  template <typename T>
  void ScrapSelectionProblem::accumulate_stages(std::span<const T> u, std::size_t first_stage,
                                                BasicUpperTriangular<T> factor, T &objective,
                                                std::span<T> constraints,
                                                std::vector<UpperTriangular> *factors_out) const
  {
    for (std::size_t k = first_stage; k < stages_; ++k)
    {
      const std::span<const T> uk = u.subspan(k * n_, n_);
      T cost(0.0);
      T mean(0.0);
      for (std::size_t i = 0; i < n_; ++i)
      {
        cost += uk[i] * prices_[i];
        mean += uk[i] * belief_.x_hat[i];
      }
      if (alpha_ != 0.0)
        cost += frobenius_squared(factor) * alpha_;
      objective += cost;

      T c = mean - y_max_;
      if (gamma_ != 0.0)
      {
        const std::vector<T> fu = multiply(factor, uk);
        c += two_norm(std::span<const T>(fu)) * gamma_;
      }
      constraints[k] = c;

      if constexpr (std::is_same_v<T, double>)
        if (factors_out)
          factors_out->push_back(factor);

      const bool needs_next = k + 1 < stages_ && (gamma_ != 0.0 || alpha_ != 0.0 || factors_out);
      if (needs_next)
        factor = propagate_sqrt<T>(factor, uk, Q_sqrt_, R_sqrt_).next;
    }
  }

  ProgramValues ScrapSelectionProblem::evaluate(std::span<const double> u) const
  {
    if (u.size() != num_variables())
      fail(ErrorCode::DimensionMismatch, "control vector has the wrong length");
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    ProgramValues out{0.0, Vector(stages_, 0.0)};
    accumulate_stages<double>(u, 0, belief_.P_sqrt, out.objective, out.constraints, nullptr);
    require_finite(out.objective, "objective");
    for (double c : out.constraints)
      require_finite(c, "constraint");
    return out;
  }

  ProgramDerivatives ScrapSelectionProblem::evaluate_with_derivatives(std::span<const double> u) const
  {
    if (u.size() != num_variables())
      fail(ErrorCode::DimensionMismatch, "control vector has the wrong length");
    evaluations_.fetch_add(1, std::memory_order_relaxed);

    const std::size_t nv = num_variables();
    ProgramDerivatives out;
    out.constraints.assign(stages_, 0.0);
    out.gradient.assign(nv, 0.0);
    out.jacobian = Matrix(stages_, nv);

    std::vector<UpperTriangular> factors;
    factors.reserve(stages_);
    accumulate_stages<double>(u, 0, belief_.P_sqrt, out.objective, out.constraints, &factors);

    // Chunked forward mode: a chunk of variables starting in stage s only
    // influences stages >= s, so propagation restarts from the value factor F_s.
    std::vector<ChunkDual> ud(nv);
    std::vector<ChunkDual> cd(stages_);
    for (std::size_t v0 = 0; v0 < nv; v0 += kChunk)
    {
      const std::size_t width = std::min(kChunk, nv - v0);
      const std::size_t first_stage = v0 / n_;
      for (std::size_t i = first_stage * n_; i < nv; ++i)
        ud[i] = ChunkDual(u[i]);
      for (std::size_t dir = 0; dir < width; ++dir)
        ud[v0 + dir].d[dir] = 1.0;
      ChunkDual objective(0.0);
      accumulate_stages<ChunkDual>(ud, first_stage, lift(factors[first_stage]), objective, cd, nullptr);
      for (std::size_t dir = 0; dir < width; ++dir)
      {
        out.gradient[v0 + dir] = objective.d[dir];
        for (std::size_t k = first_stage; k < stages_; ++k)
          out.jacobian(k, v0 + dir) = cd[k].d[dir];
      }
    }

    require_finite(out.objective, "objective");
    for (double c : out.constraints)
      require_finite(c, "constraint");
    for (double g : out.gradient)
      require_finite(g, "gradient");
    if (!is_finite(out.jacobian))
      fail(ErrorCode::NonFinite, "non-finite constraint Jacobian");
    return out;
  }

  std::vector<UpperTriangular> ScrapSelectionProblem::predicted_factors(std::span<const double> u) const
  {
    if (u.size() != num_variables())
      fail(ErrorCode::DimensionMismatch, "control vector has the wrong length");
    std::vector<UpperTriangular> factors;
    factors.reserve(stages_);
    double objective = 0.0;
    Vector constraints(stages_);
    accumulate_stages<double>(u, 0, belief_.P_sqrt, objective, constraints, &factors);
    return factors;
  }

  Vector ScrapSelectionProblem::backoffs(std::span<const double> u) const
  {
    Vector out(stages_, 0.0);
    if (gamma_ == 0.0)
      return out;
    const std::vector<UpperTriangular> factors = predicted_factors(u);
    for (std::size_t k = 0; k < stages_; ++k)
    {
      const Vector fu = multiply(factors[k], u.subspan(k * n_, n_));
      out[k] = gamma_ * two_norm(fu);
    }
    return out;
  }

  ScrapSelectionProblem build_nominal(const BeliefState &belief, const SystemParams &params)
  {
    return ScrapSelectionProblem(FormulationKind::Nominal, 1, belief, params, 0.0, 0.0);
  }

  ScrapSelectionProblem build_robust(const BeliefState &belief, const SystemParams &params)
  {
    return ScrapSelectionProblem(FormulationKind::Robust, 1, belief, params, params.gamma, 0.0);
  }

  ScrapSelectionProblem build_dual(const BeliefState &belief, const SystemParams &params, double alpha)
  {
    if (alpha < 0.0)
      fail(ErrorCode::OutOfDomain, "exploration weight must be >= 0");
    const FormulationKind kind = alpha > 0.0 ? FormulationKind::ExplicitDual : FormulationKind::ImplicitDual;
    return ScrapSelectionProblem(kind, params.N + 1, belief, params, params.gamma, alpha);
  }

  ScrapSelectionProblem build_problem(FormulationKind kind, const BeliefState &belief, const SystemParams &params)
  {
    switch (kind)
    {
    case FormulationKind::Nominal:
      return build_nominal(belief, params);
    case FormulationKind::Robust:
      return build_robust(belief, params);
    case FormulationKind::ImplicitDual:
      return build_dual(belief, params, 0.0);
    case FormulationKind::ExplicitDual:
      return build_dual(belief, params, params.alpha);
    }
    fail(ErrorCode::OutOfDomain, "unknown formulation kind");
  }

} // namespace dualmpc
