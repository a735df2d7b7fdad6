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

#include "dualmpc/closed_loop.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "dualmpc/plant.hpp"

namespace dualmpc
{

  RunNoise RunNoise::draw(RngStream &process, RngStream &measurement, const SystemParams &params)
  {
    const std::size_t n = params.n_x();
    const GaussianSpec w_spec(Vector(n, 0.0), cholesky_upper_semidefinite(params.Q));
    RunNoise noise;
    noise.w.reserve(params.T);
    noise.v.reserve(params.T);
    const double r_sqrt = std::sqrt(params.R);
    for (std::size_t t = 0; t < params.T; ++t)
    {
      noise.w.push_back(sample_gaussian(process, w_spec));
      noise.v.push_back(r_sqrt * measurement.standard_normal());
    }
    return noise;
  }

  RunNoise RunNoise::zero(const SystemParams &params)
  {
    RunNoise noise;
    noise.w.assign(params.T, Vector(params.n_x(), 0.0));
    noise.v.assign(params.T, 0.0);
    return noise;
  }

  std::uint64_t RunNoise::fingerprint() const
  {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    auto mix = [&h](double x) { h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x)); };
    for (const Vector &wt : w)
      for (double x : wt)
        mix(x);
    for (double x : v)
      mix(x);
    return h;
  }

  double ClosedLoopTrace::total_cost() const
  {
    double acc = 0.0;
    for (const CastRecord &c : casts)
      acc += c.stage_cost;
    return acc;
  }

  std::size_t ClosedLoopTrace::violations() const
  {
    std::size_t count = 0;
    for (const CastRecord &c : casts)
      if (c.y - y_max > 0.0)
        ++count;
    return count;
  }

  std::size_t ClosedLoopTrace::content_violations() const
  {
    std::size_t count = 0;
    for (const CastRecord &c : casts)
      if (dot(c.u, c.x_true) - y_max > 0.0)
        ++count;
    return count;
  }

  RunOutcome ClosedLoopTrace::outcome() const
  {
    return RunOutcome{total_cost(), violations(), content_violations(), failed, failure_cast, failure_reason};
  }

  namespace
  {
    bool usable(const SolveResult &r, const SolverConfig &config)
    {
      return (r.status == SolveStatus::Optimal || r.status == SolveStatus::MaxIterations) &&
             r.constraint_violation <= config.feasibility_tolerance;
    }

    /// Prefer usable results, then lower objective; ties keep the first.
    bool better(const SolveResult &candidate, const SolveResult &incumbent, const SolverConfig &config)
    {
      const bool cu = usable(candidate, config);
      const bool iu = usable(incumbent, config);
      if (cu != iu)
        return cu;
      if (cu && candidate.status != incumbent.status)
        return candidate.status == SolveStatus::Optimal && candidate.objective <= incumbent.objective + 1e-9;
      return candidate.objective < incumbent.objective - 1e-12;
    }
  } // namespace

  ClosedLoopTrace run_closed_loop(const SystemParams &params, FormulationKind kind, const RunNoise &noise,
                                  const BeliefState &initial, const ClosedLoopOptions &options)
  {
    const std::size_t n = params.n_x();
    if (initial.x_hat.size() != n || initial.P_sqrt.dim() != n)
      fail(ErrorCode::DimensionMismatch, "initial belief has the wrong dimension");
    if (noise.w.size() < params.T || noise.v.size() < params.T)
      fail(ErrorCode::DimensionMismatch, "noise realization shorter than the simulation length");

    ClosedLoopTrace trace;
    trace.kind = kind;
    trace.alpha = kind == FormulationKind::ExplicitDual ? params.alpha : 0.0;
    trace.y_max = params.y_max;
    trace.noise_fingerprint = noise.fingerprint();
    trace.multistart = options.multistart && is_dual(kind);

    NoiseFactors factors{initial.P_sqrt, cholesky_upper_semidefinite(params.Q), std::sqrt(params.R)};
    PlantState plant{params.x0_true, 0};
    BeliefState belief = initial;
    std::optional<Plan> previous;

    for (std::size_t t = 0; t < params.T; ++t)
    {
      CastRecord rec;
      rec.t = t;
      rec.x_true = plant.x;
      rec.x_hat = belief.x_hat;
      rec.P_sqrt = belief.P_sqrt;

      if (options.control_override)
      {
        rec.u = options.control_override(belief);
        rec.solver.status = SolveStatus::Optimal;
      }
      else
      {
        try
        {
          const ScrapSelectionProblem problem = build_problem(kind, belief, params);
          const Vector uniform = uniform_guess(problem.stages(), n);
          SolveResult best = solve(problem, previous ? shifted_guess(*previous, problem.stages()) : uniform,
                                   options.solver);
          rec.starts = 1;
          if (trace.multistart && previous)
          {
            SolveResult alt = solve(problem, uniform, options.solver);
            ++rec.starts;
            if (better(alt, best, options.solver))
              best = std::move(alt);
          }
          if (!usable(best, options.solver) && is_dual(kind))
          {
            // Last resort: the single-stage robust optimum repeated over the
            // horizon, which satisfies every stage constraint.
            const SolveResult robust = solve(build_robust(belief, params), uniform_guess(1, n), options.solver);
            if (usable(robust, options.solver))
            {
              Vector guess;
              guess.reserve(problem.num_variables());
              for (std::size_t k = 0; k < problem.stages(); ++k)
                guess.insert(guess.end(), robust.u_star.begin(), robust.u_star.end());
              SolveResult alt = solve(problem, guess, options.solver);
              ++rec.starts;
              if (better(alt, best, options.solver))
                best = std::move(alt);
            }
          }
          if (!usable(best, options.solver))
          {
            trace.failed = true;
            trace.failure_cast = t;
            trace.failure_reason = std::string("solver status ") + std::string(to_string(best.status));
            return trace;
          }
          Plan plan = make_plan(problem, best);
          rec.u = plan.controls.front();
          rec.backoff = plan.backoffs.front();
          rec.solver = plan.solver_stats;
          previous = std::move(plan);
        }
        catch (const Error &e)
        {
          trace.failed = true;
          trace.failure_cast = t;
          trace.failure_reason = e.what();
          return trace;
        }
      }

      rec.y = measure(plant, rec.u, noise.v[t]);
      rec.stage_cost = dot(params.prices, rec.u);
      plant = plant_step(plant, noise.w[t]);
      belief = measurement_update(belief, rec.u, rec.y, factors);
      trace.casts.push_back(std::move(rec));
    }
    return trace;
  }

  ClosedLoopTrace run_closed_loop(const SystemParams &params, FormulationKind kind, const RunNoise &noise,
                                  const Vector &x_hat_0, const ClosedLoopOptions &options)
  {
    return run_closed_loop(params, kind, noise, initial_belief(x_hat_0, params), options);
  }

  namespace
  {
    template <typename Count>
    double share(std::span<const RunOutcome> outcomes, std::size_t T, Count count)
    {
      if (outcomes.empty())
        fail(ErrorCode::EmptyInput, "violation share needs at least one run");
      if (T == 0)
        fail(ErrorCode::OutOfDomain, "violation share needs T >= 1");
      std::size_t total = 0;
      for (const RunOutcome &o : outcomes)
        total += count(o);
      return static_cast<double>(total) / (static_cast<double>(outcomes.size()) * static_cast<double>(T));
    }
  } // namespace

  double violation_share(std::span<const RunOutcome> outcomes, std::size_t T)
  {
    return share(outcomes, T, [](const RunOutcome &o) { return o.violations; });
  }

  double content_violation_share(std::span<const RunOutcome> outcomes, std::size_t T)
  {
    return share(outcomes, T, [](const RunOutcome &o) { return o.content_violations; });
  }

  namespace
  {
    std::string fmt(double x)
    {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return buf;
    }

    std::size_t trace_dim(const ClosedLoopTrace &trace)
    {
      return trace.casts.empty() ? 0 : trace.casts.front().u.size();
    }

    constexpr double kPercent = 100.0;
  } // namespace

  void write_states_figure_csv(const ClosedLoopTrace &trace, std::ostream &out)
  {
    const std::size_t n = trace_dim(trace);
    out << "t";
    for (const char *name : {"x_true", "x_hat", "sigma"})
      for (std::size_t i = 0; i < n; ++i)
        out << ',' << name << '_' << i;
    out << '\n';
    for (const CastRecord &c : trace.casts)
    {
      out << c.t;
      for (double x : c.x_true)
        out << ',' << fmt(kPercent * x);
      for (double x : c.x_hat)
        out << ',' << fmt(kPercent * x);
      const Matrix P = gram(c.P_sqrt);
      for (std::size_t i = 0; i < n; ++i)
        out << ',' << fmt(kPercent * std::sqrt(std::max(0.0, P(i, i))));
      out << '\n';
    }
  }

  void write_controls_figure_csv(const ClosedLoopTrace &trace, std::ostream &out)
  {
    const std::size_t n = trace_dim(trace);
    out << "t";
    for (std::size_t i = 0; i < n; ++i)
      out << ",u_" << i;
    out << '\n';
    for (const CastRecord &c : trace.casts)
    {
      out << c.t;
      for (double x : c.u)
        out << ',' << fmt(x);
      out << '\n';
    }
  }

  void write_output_figure_csv(const ClosedLoopTrace &trace, std::ostream &out)
  {
    out << "t,y,y_max,content,backoff\n";
    for (const CastRecord &c : trace.casts)
    {
      out << c.t << ',' << fmt(kPercent * c.y) << ',' << fmt(kPercent * trace.y_max) << ','
          << fmt(kPercent * dot(c.u, c.x_true)) << ',' << fmt(kPercent * c.backoff) << '\n';
    }
  }

  void write_trace_csv(const ClosedLoopTrace &trace, std::ostream &out)
  {
    const std::size_t n = trace.casts.empty() ? 0 : trace.casts.front().u.size();
    out << "t";
    for (const char *name : {"x_true", "x_hat", "P_diag", "u"})
      for (std::size_t i = 0; i < n; ++i)
        out << ',' << name << '_' << i;
    out << ",y,y_max,stage_cost,backoff,solver_status\n";

    char buf[64];
    auto num = [&](double x) -> const char *
    {
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return buf;
    };
    for (const CastRecord &c : trace.casts)
    {
      out << c.t;
      for (double x : c.x_true)
        out << ',' << num(x);
      for (double x : c.x_hat)
        out << ',' << num(x);
      const Matrix P = gram(c.P_sqrt);
      for (std::size_t i = 0; i < n; ++i)
        out << ',' << num(P(i, i));
      for (double x : c.u)
        out << ',' << num(x);
      out << ',' << num(c.y);
      out << ',' << num(trace.y_max);
      out << ',' << num(c.stage_cost);
      out << ',' << num(c.backoff);
      out << ',' << to_string(c.solver.status) << '\n';
    }
  }

} // namespace dualmpc
