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

#include "dualmpc/sqp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "dualmpc/qp.hpp"

namespace dualmpc
{

  void SolverConfig::validate() const
  {
    if (!(kkt_tolerance > 0.0) || !(feasibility_tolerance > 0.0) || !(finite_difference_step > 0.0))
      fail(ErrorCode::ValidationError, "solver tolerances must be > 0");
    if (!(penalty_growth > 1.0))
      fail(ErrorCode::ValidationError, "penalty_growth must be > 1");
    if (max_iterations == 0)
      fail(ErrorCode::ValidationError, "max_iterations must be >= 1");
  }

  Vector project_simplex_box(std::span<const double> v, std::span<const double> lb, std::span<const double> ub)
  {
    const std::size_t n = v.size();
    if (lb.size() != n || ub.size() != n)
      fail(ErrorCode::DimensionMismatch, "projection bounds dimension mismatch");
    double lb_sum = 0.0, ub_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      lb_sum += lb[i];
      ub_sum += ub[i];
    }
    if (n == 0 || lb_sum > 1.0 + 1e-12 || ub_sum < 1.0 - 1e-12)
      fail(ErrorCode::OutOfDomain, "box does not meet the simplex");
    auto mass = [&](double tau)
    {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        acc += std::clamp(v[i] - tau, lb[i], ub[i]);
      return acc;
    };
    double lo = v[0] - ub[0];
    double hi = v[0] - lb[0];
    for (std::size_t i = 1; i < n; ++i)
    {
      lo = std::min(lo, v[i] - ub[i]);
      hi = std::max(hi, v[i] - lb[i]);
    }
    // mass(lo) = sum(ub) >= 1 >= sum(lb) = mass(hi); mass is nonincreasing.
    for (int it = 0; it < 200; ++it)
    {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi)
        break;
      (mass(mid) > 1.0 ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = std::clamp(v[i] - tau, lb[i], ub[i]);
    return out;
  }

  Vector project_onto_blocks(const SmoothProgram &program, std::span<const double> v)
  {
    const std::size_t nb = program.num_blocks();
    const std::size_t bd = program.block_dim();
    if (v.size() != nb * bd)
      fail(ErrorCode::DimensionMismatch, "initial guess has the wrong length");
    const std::span<const double> lb(program.lower_bounds());
    const std::span<const double> ub(program.upper_bounds());
    Vector out;
    out.reserve(v.size());
    for (std::size_t b = 0; b < nb; ++b)
    {
      const Vector block = project_simplex_box(v.subspan(b * bd, bd), lb.subspan(b * bd, bd), ub.subspan(b * bd, bd));
      out.insert(out.end(), block.begin(), block.end());
    }
    return out;
  }

  ProgramDerivatives finite_difference_derivatives(const SmoothProgram &program, std::span<const double> u,
                                                   double step)
  {
    const std::size_t n = u.size();
    const ProgramValues base = program.evaluate(u);
    ProgramDerivatives out{base.objective, base.constraints, Vector(n, 0.0),
                           Matrix(base.constraints.size(), n)};
    Vector probe(u.begin(), u.end());
    for (std::size_t i = 0; i < n; ++i)
    {
      const double h = step * std::max(1.0, std::abs(u[i]));
      probe[i] = u[i] + h;
      const ProgramValues plus = program.evaluate(probe);
      probe[i] = u[i] - h;
      const ProgramValues minus = program.evaluate(probe);
      probe[i] = u[i];
      out.gradient[i] = (plus.objective - minus.objective) / (2.0 * h);
      for (std::size_t j = 0; j < base.constraints.size(); ++j)
        out.jacobian(j, i) = (plus.constraints[j] - minus.constraints[j]) / (2.0 * h);
    }
    return out;
  }

  namespace
  {
    double max_violation(const Vector &c)
    {
      double v = 0.0;
      for (double ci : c)
        v = std::max(v, ci);
      return v;
    }

    double total_violation(const Vector &c)
    {
      double v = 0.0;
      for (double ci : c)
        v += std::max(0.0, ci);
      return v;
    }

    double inf_norm(std::span<const double> v)
    {
      double m = 0.0;
      for (double x : v)
        m = std::max(m, std::abs(x));
      return m;
    }

    /// Gradient of the Lagrangian part that changes with u: grad f + J^T lambda.
    Vector lagrangian_gradient(const ProgramDerivatives &d, const Vector &lambda)
    {
      Vector g = d.gradient;
      for (std::size_t j = 0; j < lambda.size(); ++j)
        if (lambda[j] != 0.0)
          for (std::size_t i = 0; i < g.size(); ++i)
            g[i] += lambda[j] * d.jacobian(j, i);
      return g;
    }

    void damped_bfgs_update(Matrix &B, const Vector &s, Vector y)
    {
      const std::size_t n = s.size();
      const Vector bs = multiply(B, s);
      const double sbs = dot(s, bs);
      if (!(sbs > 1e-300))
        return;
      const double sy = dot(s, y);
      // Powell damping keeps B positive definite.
      if (sy < 0.2 * sbs)
      {
        const double theta = 0.8 * sbs / (sbs - sy);
        for (std::size_t i = 0; i < n; ++i)
          y[i] = theta * y[i] + (1.0 - theta) * bs[i];
      }
      const double sy_damped = dot(s, y);
      if (!(sy_damped > 0.0))
        return;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          B(i, j) += y[i] * y[j] / sy_damped - bs[i] * bs[j] / sbs;
      // Symmetrize against rounding drift.
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
        {
          const double avg = 0.5 * (B(i, j) + B(j, i));
          B(i, j) = avg;
          B(j, i) = avg;
        }
    }

    Matrix simplex_basis(std::size_t bd)
    {
      // Columns 1..bd-1 of the Householder reflector sending e_0 to 1/sqrt(bd)
      // form an orthonormal basis of {z : sum(z) = 0}.
      Matrix z(bd, bd > 0 ? bd - 1 : 0);
      if (bd < 2)
        return z;
      const double q = 1.0 / std::sqrt(static_cast<double>(bd));
      Vector v(bd, q);
      v[0] -= 1.0;
      const double vv = dot(v, v);
      for (std::size_t c = 1; c < bd; ++c)
        for (std::size_t k = 0; k < bd; ++k)
          z(k, c - 1) = (k == c ? 1.0 : 0.0) - 2.0 * v[k] * v[c] / vv;
      return z;
    }

    class Sqp
    {
    public:
      Sqp(const SmoothProgram &program, const SolverConfig &config)
          : program_(program), config_(config), n_(program.num_variables()), nb_(program.num_blocks()),
            bd_(program.block_dim()), m_(program.num_inequalities()), lb_(program.lower_bounds()),
            ub_(program.upper_bounds()), basis_(simplex_basis(program.block_dim()))
      {
        if (lb_.size() != n_ || ub_.size() != n_)
          fail(ErrorCode::DimensionMismatch, "program bounds have the wrong length");
      }

      SolveResult run(std::span<const double> guess);

    private:
      ProgramDerivatives derivatives(const Vector &u)
      {
        ++evaluations_;
        if (program_.has_analytic_derivatives())
          return program_.evaluate_with_derivatives(u);
        evaluations_ += 2 * n_;
        return finite_difference_derivatives(program_, u, config_.finite_difference_step);
      }

      ProgramValues values(const Vector &u)
      {
        ++evaluations_;
        return program_.evaluate(u);
      }

      /// Reduced QP over the null space of the block sums (plus the elastic
      /// slack when requested); bounds and linearized constraints are rows.
      QuadraticProgram build_qp(const Vector &u, const ProgramDerivatives &d, const Matrix &B, bool elastic,
                                double elastic_weight) const;
      Vector sum_correction(const Vector &u) const;
      Vector expand_step(const Vector &u, std::span<const double> p) const;

      const SmoothProgram &program_;
      const SolverConfig &config_;
      std::size_t n_, nb_, bd_, m_;
      const Vector &lb_;
      const Vector &ub_;
      Matrix basis_;
      std::size_t evaluations_ = 0;
    };

    QuadraticProgram Sqp::build_qp(const Vector &u, const ProgramDerivatives &d, const Matrix &B, bool elastic,
                                   double elastic_weight) const
    {
      const std::size_t rd = bd_ - 1;
      const std::size_t nr = nb_ * rd;
      const std::size_t nv = nr + (elastic ? 1 : 0);

      // Full-space step d = d0 + Z p; d0 restores the block sums.
      const Vector d0 = sum_correction(u);

      // BZ, one block column at a time.
      Matrix bz(n_, nr);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t b = 0; b < nb_; ++b)
          for (std::size_t c = 0; c < rd; ++c)
          {
            double acc = 0.0;
            for (std::size_t k = 0; k < bd_; ++k)
              acc += B(i, b * bd_ + k) * basis_(k, c);
            bz(i, b * rd + c) = acc;
          }

      QuadraticProgram qp;
      qp.hessian = Matrix(nv, nv);
      qp.linear.assign(nv, 0.0);
      const Vector bd0 = multiply(B, d0);
      for (std::size_t b = 0; b < nb_; ++b)
        for (std::size_t c = 0; c < rd; ++c)
        {
          const std::size_t col = b * rd + c;
          double lin = 0.0;
          for (std::size_t k = 0; k < bd_; ++k)
          {
            const std::size_t i = b * bd_ + k;
            lin += basis_(k, c) * (d.gradient[i] + bd0[i]);
          }
          qp.linear[col] = lin;
          for (std::size_t b2 = 0; b2 < nb_; ++b2)
            for (std::size_t c2 = 0; c2 < rd; ++c2)
            {
              double acc = 0.0;
              for (std::size_t k = 0; k < bd_; ++k)
                acc += basis_(k, c) * bz(b * bd_ + k, b2 * rd + c2);
              qp.hessian(col, b2 * rd + c2) = acc;
            }
        }
      for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = i + 1; j < nr; ++j)
        {
          const double avg = 0.5 * (qp.hessian(i, j) + qp.hessian(j, i));
          qp.hessian(i, j) = avg;
          qp.hessian(j, i) = avg;
        }
      if (elastic)
      {
        qp.hessian(nr, nr) = 1e-8 * std::max(1.0, elastic_weight);
        qp.linear[nr] = elastic_weight;
      }

      qp.eq = Matrix(0, nv);
      const std::size_t rows = 2 * n_ + m_ + (elastic ? 1 : 0);
      qp.ineq = Matrix(rows, nv);
      qp.ineq_rhs.assign(rows, 0.0);
      for (std::size_t b = 0; b < nb_; ++b)
        for (std::size_t k = 0; k < bd_; ++k)
        {
          const std::size_t i = b * bd_ + k;
          for (std::size_t c = 0; c < rd; ++c)
          {
            qp.ineq(i, b * rd + c) = basis_(k, c);
            qp.ineq(n_ + i, b * rd + c) = -basis_(k, c);
          }
          qp.ineq_rhs[i] = lb_[i] - u[i] - d0[i];
          qp.ineq_rhs[n_ + i] = u[i] + d0[i] - ub_[i];
        }
      for (std::size_t j = 0; j < m_; ++j)
      {
        const std::size_t r = 2 * n_ + j;
        double jd0 = 0.0;
        for (std::size_t b = 0; b < nb_; ++b)
          for (std::size_t k = 0; k < bd_; ++k)
          {
            const std::size_t i = b * bd_ + k;
            jd0 += d.jacobian(j, i) * d0[i];
            for (std::size_t c = 0; c < rd; ++c)
              qp.ineq(r, b * rd + c) -= d.jacobian(j, i) * basis_(k, c);
          }
        // A gradient parallel to the block sums projects to rounding noise;
        // left in place it would read as a steep direction.
        double jscale = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
          jscale = std::max(jscale, std::abs(d.jacobian(j, i)));
        for (std::size_t c = 0; c < nr; ++c)
          if (std::abs(qp.ineq(r, c)) <= 64.0 * std::numeric_limits<double>::epsilon() * jscale)
            qp.ineq(r, c) = 0.0;
        if (elastic)
          qp.ineq(r, nr) = 1.0;
        qp.ineq_rhs[r] = d.constraints[j] + jd0;
      }
      if (elastic)
        qp.ineq(rows - 1, nr) = 1.0;
      return qp;
    }

    Vector Sqp::sum_correction(const Vector &u) const
    {
      Vector d0(n_, 0.0);
      for (std::size_t b = 0; b < nb_; ++b)
      {
        double sum = 0.0;
        for (std::size_t k = 0; k < bd_; ++k)
          sum += u[b * bd_ + k];
        const double share = (1.0 - sum) / static_cast<double>(bd_);
        for (std::size_t k = 0; k < bd_; ++k)
          d0[b * bd_ + k] = share;
      }
      return d0;
    }

    Vector Sqp::expand_step(const Vector &u, std::span<const double> p) const
    {
      Vector step = sum_correction(u);
      const std::size_t rd = bd_ - 1;
      for (std::size_t b = 0; b < nb_; ++b)
        for (std::size_t k = 0; k < bd_; ++k)
          for (std::size_t c = 0; c < rd; ++c)
            step[b * bd_ + k] += basis_(k, c) * p[b * rd + c];
      return step;
    }

    /// Nonmonotone line search: compare against the worst of the last few merit values.
    constexpr std::size_t kMeritMemory = 5;
    constexpr std::size_t kStallIterations = 15;
    constexpr double kStallRelative = 1e-13;

    SolveResult Sqp::run(std::span<const double> guess)
    {
      SolveResult result;
      Vector u = project_onto_blocks(program_, guess);
      ProgramDerivatives d = derivatives(u);

      Matrix B = Matrix::identity(n_);
      bool b_is_identity = true;
      double merit_weight = 1.0;
      double elastic_weight = 10.0;
      std::vector<std::pair<double, double>> history;
      double best_merit = std::numeric_limits<double>::infinity();
      double best_kkt = std::numeric_limits<double>::infinity();
      std::size_t stalled = 0;

      // Best feasible iterate seen, returned when the solve ends short of
      // optimality at a worse or infeasible point.
      std::optional<std::pair<Vector, ProgramDerivatives>> incumbent;
      auto remember = [&]
      {
        if (max_violation(d.constraints) <= config_.feasibility_tolerance &&
            (!incumbent || d.objective < incumbent->second.objective))
          incumbent.emplace(u, d);
      };
      remember();

      auto finish = [&](SolveStatus status, double kkt)
      {
        if (status != SolveStatus::Optimal && incumbent &&
            (max_violation(d.constraints) > config_.feasibility_tolerance ||
             incumbent->second.objective < d.objective))
        {
          u = incumbent->first;
          d = incumbent->second;
          status = SolveStatus::MaxIterations;
        }
        result.u_star = u;
        result.status = status;
        result.kkt_residual = kkt;
        result.constraint_violation = std::max(0.0, max_violation(d.constraints));
        result.objective = d.objective;
        result.evaluations = evaluations_;
        return result;
      };

      double kkt = std::numeric_limits<double>::infinity();
      for (std::size_t iter = 0; iter < config_.max_iterations; ++iter)
      {
        result.iterations = iter;
        bool elastic = false;
        QpSolution qp = solve_qp(build_qp(u, d, B, false, elastic_weight));
        if (qp.status == QpStatus::Infeasible)
        {
          elastic = true;
          qp = solve_qp(build_qp(u, d, B, true, elastic_weight));
        }
        if (qp.status != QpStatus::Optimal)
          return finish(SolveStatus::NumericalFailure, kkt);

        const std::size_t nr = nb_ * (bd_ - 1);
        const Vector step = expand_step(u, std::span<const double>(qp.x).first(nr));
        const double slack = elastic ? qp.x[nr] : 0.0;

        result.lower_multipliers.assign(qp.ineq_multipliers.begin(),
                                        qp.ineq_multipliers.begin() + static_cast<std::ptrdiff_t>(n_));
        result.upper_multipliers.assign(qp.ineq_multipliers.begin() + static_cast<std::ptrdiff_t>(n_),
                                        qp.ineq_multipliers.begin() + static_cast<std::ptrdiff_t>(2 * n_));
        result.multipliers.assign(qp.ineq_multipliers.begin() + static_cast<std::ptrdiff_t>(2 * n_),
                                  qp.ineq_multipliers.begin() + static_cast<std::ptrdiff_t>(2 * n_ + m_));
        const Vector &lambda = result.multipliers;

        // Block multipliers from the full-space QP stationarity, which the
        // reduced solve leaves constant within each block.
        {
          Vector r = lagrangian_gradient(d, lambda);
          const Vector bstep = multiply(B, step);
          result.block_multipliers.assign(nb_, 0.0);
          for (std::size_t i = 0; i < n_; ++i)
            result.block_multipliers[i / bd_] +=
                (r[i] + bstep[i] - result.lower_multipliers[i] + result.upper_multipliers[i]) /
                static_cast<double>(bd_);
        }

        // First-order optimality of the current point with the QP multipliers.
        Vector stationarity = lagrangian_gradient(d, lambda);
        double complementarity = 0.0;
        for (std::size_t i = 0; i < n_; ++i)
        {
          stationarity[i] += -result.lower_multipliers[i] + result.upper_multipliers[i] -
                             result.block_multipliers[i / bd_];
          complementarity = std::max(complementarity, result.lower_multipliers[i] * std::abs(u[i] - lb_[i]));
          complementarity = std::max(complementarity, result.upper_multipliers[i] * std::abs(ub_[i] - u[i]));
        }
        for (std::size_t j = 0; j < m_; ++j)
          complementarity = std::max(complementarity, lambda[j] * std::abs(d.constraints[j]));
        kkt = std::max(inf_norm(stationarity), complementarity);
        const double violation = std::max(0.0, max_violation(d.constraints));

        if (!elastic && kkt <= config_.kkt_tolerance && violation <= config_.feasibility_tolerance)
          return finish(SolveStatus::Optimal, kkt);
        if (elastic && slack > config_.feasibility_tolerance)
        {
          if (inf_norm(step) <= 1e-12 || elastic_weight > 1e12)
            return finish(SolveStatus::Infeasible, kkt);
          elastic_weight *= config_.penalty_growth;
        }

        // l1 merit function phi(u) = f + w * sum max(0, g).
        double lambda_max = 0.0;
        for (double l : lambda)
          lambda_max = std::max(lambda_max, l);
        if (merit_weight < 1.1 * lambda_max)
          merit_weight = std::max(1.5 * lambda_max, merit_weight * 1.5);

        const double phi0 = d.objective + merit_weight * total_violation(d.constraints);
        history.emplace_back(d.objective, total_violation(d.constraints));
        if (history.size() > kMeritMemory)
          history.erase(history.begin());
        double phi_ref = phi0;
        for (const auto &[f, v] : history)
          phi_ref = std::max(phi_ref, f + merit_weight * v);
        double linearized_violation = 0.0;
        if (elastic)
          for (std::size_t j = 0; j < m_; ++j)
          {
            double lin = d.constraints[j];
            for (std::size_t i = 0; i < n_; ++i)
              lin += d.jacobian(j, i) * step[i];
            linearized_violation += std::max(0.0, lin);
          }
        const double slope = dot(d.gradient, step) + merit_weight * (linearized_violation - total_violation(d.constraints));

        double t = 1.0;
        Vector trial(n_);
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls)
        {
          for (std::size_t i = 0; i < n_; ++i)
            trial[i] = std::clamp(u[i] + t * step[i], lb_[i], ub_[i]);
          const ProgramValues pv = values(trial);
          const double phi = pv.objective + merit_weight * total_violation(pv.constraints);
          if (phi <= phi_ref + 1e-4 * t * std::min(slope, 0.0) + 1e-14 * std::abs(phi0))
          {
            accepted = true;
            break;
          }
          t *= 0.5;
        }
        if (!accepted)
        {
          if (!b_is_identity)
          {
            B = Matrix::identity(n_);
            b_is_identity = true;
            continue;
          }
          return finish(violation <= config_.feasibility_tolerance ? SolveStatus::MaxIterations
                                                                   : SolveStatus::NumericalFailure,
                        kkt);
        }

        ProgramDerivatives next = derivatives(trial);
        if (config_.hessian == HessianApproximation::DampedBFGS)
        {
          Vector s(n_), y = lagrangian_gradient(next, lambda);
          const Vector g_old = lagrangian_gradient(d, lambda);
          for (std::size_t i = 0; i < n_; ++i)
          {
            s[i] = trial[i] - u[i];
            y[i] -= g_old[i];
          }
          damped_bfgs_update(B, s, std::move(y));
          b_is_identity = false;
        }
        u = trial;
        d = std::move(next);
        remember();

        // Stagnation (neither the merit nor the KKT residual improving) at the
        // rounding floor: stop early rather than spin until max_iterations.
        const double merit = d.objective + merit_weight * total_violation(d.constraints);
        const bool merit_progress = merit < best_merit - kStallRelative * std::max(1.0, std::abs(merit));
        const bool kkt_progress = kkt < 0.9 * best_kkt;
        best_merit = std::min(best_merit, merit);
        best_kkt = std::min(best_kkt, kkt);
        if (merit_progress || kkt_progress)
          stalled = 0;
        else if (++stalled >= kStallIterations && max_violation(d.constraints) <= config_.feasibility_tolerance)
        {
          result.iterations = iter + 1;
          return finish(SolveStatus::MaxIterations, kkt);
        }
      }
      result.iterations = config_.max_iterations;
      const double violation = std::max(0.0, max_violation(d.constraints));
      return finish(violation <= config_.feasibility_tolerance ? SolveStatus::MaxIterations : SolveStatus::Infeasible,
                    kkt);
    }
  } // namespace

  SolveResult solve(const SmoothProgram &program, std::span<const double> initial_guess, const SolverConfig &config)
  {
    config.validate();
    Sqp sqp(program, config);
    return sqp.run(initial_guess);
  }

  Vector uniform_guess(std::size_t stages, std::size_t n_x)
  {
    return Vector(stages * n_x, 1.0 / static_cast<double>(n_x));
  }

  Vector shifted_guess(const Plan &previous, std::size_t stages)
  {
    if (previous.controls.empty())
      fail(ErrorCode::EmptyInput, "previous plan has no controls");
    Vector out;
    const std::size_t have = previous.controls.size();
    for (std::size_t k = 0; k < stages; ++k)
    {
      const std::size_t src = std::min(k + 1, have - 1);
      out.insert(out.end(), previous.controls[src].begin(), previous.controls[src].end());
    }
    return out;
  }

  Plan make_plan(const ScrapSelectionProblem &problem, const SolveResult &result)
  {
    Plan plan;
    const std::size_t n = problem.block_dim();
    for (std::size_t k = 0; k < problem.stages(); ++k)
      plan.controls.emplace_back(result.u_star.begin() + static_cast<std::ptrdiff_t>(k * n),
                                 result.u_star.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
    plan.objective_value = result.objective;
    plan.backoffs = problem.backoffs(result.u_star);
    if (is_dual(problem.kind()))
      plan.predicted_sqrt_factors = problem.predicted_factors(result.u_star);
    plan.solver_stats = SolverStats{result.status, result.iterations, result.kkt_residual,
                                    result.constraint_violation, result.evaluations};
    plan.multipliers = result.multipliers;
    return plan;
  }

  Plan solve_receding(const ProblemBuilder &builder, const BeliefState &belief,
                      const std::optional<Plan> &previous_plan, const SolverConfig &config)
  {
    const ScrapSelectionProblem problem = builder(belief);
    const Vector guess = previous_plan && !previous_plan->controls.empty()
                             ? shifted_guess(*previous_plan, problem.stages())
                             : uniform_guess(problem.stages(), problem.block_dim());
    return make_plan(problem, solve(problem, guess, config));
  }

} // namespace dualmpc
