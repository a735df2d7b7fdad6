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

#include "dualmpc/plant.hpp"

#include <cmath>
#include <numeric>

namespace dualmpc
{

  SystemParams SystemParams::table_defaults()
  {
    SystemParams p;
    p.x0_true = {0.07, 0.13, 0.17};
    const double p0_diag[] = {1e-4, 1e-3, 1e-3};
    p.P0 = Matrix::diagonal(p0_diag);
    const double q_diag[] = {1e-7, 1e-7, 1e-7};
    p.Q = Matrix::diagonal(q_diag);
    p.R = 2e-6;
    p.prices = {2.0, 1.0, 1.0};
    p.y_max = 0.12;
    p.gamma = 2.0;
    p.u_min = {0.0, 0.0, 0.0};
    p.u_max = {1.0, 1.0, 1.0};
    p.N = 15;
    p.T = 20;
    p.alpha = 100.0;
    return p;
  }

  namespace
  {
    [[noreturn]] void invalid(const std::string &what) { fail(ErrorCode::ValidationError, what); }

    bool all_finite(std::span<const double> v)
    {
      for (double x : v)
        if (!std::isfinite(x))
          return false;
      return true;
    }
  } // namespace

  void SystemParams::validate() const
  {
    const std::size_t n = n_x();
    if (n == 0)
      invalid("x0 must have at least one heap");
    if (P0.rows() != n || P0.cols() != n)
      invalid("P0 must be n_x by n_x");
    if (Q.rows() != n || Q.cols() != n)
      invalid("Q must be n_x by n_x");
    if (prices.size() != n || u_min.size() != n || u_max.size() != n)
      invalid("prices, u_min and u_max must have n_x entries");
    if (!all_finite(x0_true) || !is_finite(P0) || !is_finite(Q) || !all_finite(prices) ||
        !all_finite(u_min) || !all_finite(u_max) || !std::isfinite(R) || !std::isfinite(y_max) ||
        !std::isfinite(gamma) || !std::isfinite(alpha))
      invalid("all parameters must be finite");

    try
    {
      (void)cholesky_upper(P0);
    }
    catch (const Error &e)
    {
      invalid(std::string("P0 must be symmetric positive definite (") + e.what() + ")");
    }
    try
    {
      (void)cholesky_upper_semidefinite(Q);
    }
    catch (const Error &e)
    {
      invalid(std::string("Q must be symmetric positive semidefinite (") + e.what() + ")");
    }
    if (!(R > 0.0))
      invalid("R must be > 0");

    for (std::size_t i = 0; i < n; ++i)
    {
      if (u_min[i] < 0.0)
        invalid("u_min must be >= 0");
      if (u_min[i] > u_max[i])
        invalid("u_min must be <= u_max");
      if (prices[i] < 0.0)
        invalid("prices must be >= 0");
    }
    const double lo = std::accumulate(u_min.begin(), u_min.end(), 0.0);
    const double hi = std::accumulate(u_max.begin(), u_max.end(), 0.0);
    if (lo > 1.0 + 1e-12 || hi < 1.0 - 1e-12)
      invalid("the set {sum(u) = 1, u_min <= u <= u_max} is empty");
    if (!(y_max > 0.0))
      invalid("y_max must be > 0");
    if (gamma < 0.0)
      invalid("gamma must be >= 0");
    if (N < 1)
      invalid("N must be >= 1");
    if (T < 1)
      invalid("T must be >= 1");
    if (alpha < 0.0)
      invalid("alpha must be >= 0");
  }

  NoiseFactors NoiseFactors::from(const SystemParams &params)
  {
    return NoiseFactors{cholesky_upper(params.P0), cholesky_upper_semidefinite(params.Q), std::sqrt(params.R)};
  }

  PlantState plant_step(const PlantState &state, std::span<const double> w)
  {
    if (w.size() != state.x.size())
      fail(ErrorCode::DimensionMismatch, "state noise dimension mismatch");
    PlantState next{state.x, state.t + 1};
    for (std::size_t i = 0; i < w.size(); ++i)
      next.x[i] += w[i];
    return next;
  }

  double measure(const PlantState &state, std::span<const double> u, double v)
  {
    if (u.size() != state.x.size())
      fail(ErrorCode::DimensionMismatch, "control dimension mismatch");
    return dot(u, state.x) + v;
  }

} // namespace dualmpc
