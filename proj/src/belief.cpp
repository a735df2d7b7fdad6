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

#include "dualmpc/belief.hpp"

namespace dualmpc
{

  KalmanGain kalman_gain(const Matrix &P, std::span<const double> u, double R)
  {
    if (P.rows() != u.size() || P.cols() != u.size())
      fail(ErrorCode::DimensionMismatch, "kalman_gain dimension mismatch");
    const Vector pu = multiply(P, u);
    const double s = dot(u, pu) + R;
    KalmanGain out{pu, s};
    for (double &k : out.k)
      k /= s;
    return out;
  }

  Matrix propagate_joseph(const Matrix &P, std::span<const double> u, const Matrix &Q, double R)
  {
    const std::size_t n = u.size();
    const KalmanGain gain = kalman_gain(P, u, R);
    Matrix a = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(i, j) -= gain.k[i] * u[j];
    Matrix out = multiply(multiply(a, P), transpose(a));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += gain.k[i] * R * gain.k[j] + Q(i, j);
    return out;
  }

  BeliefState measurement_update(const BeliefState &belief, std::span<const double> u, double y,
                                 const NoiseFactors &noise)
  {
    const std::size_t n = belief.x_hat.size();
    if (u.size() != n || belief.P_sqrt.dim() != n)
      fail(ErrorCode::DimensionMismatch, "measurement_update dimension mismatch");

    // P u = P_sqrt^T (P_sqrt u); S = |P_sqrt u|^2 + R.
    const Vector a = multiply(belief.P_sqrt, u);
    const Vector pu = multiply_transposed(belief.P_sqrt, std::span<const double>(a));
    const double s = dot(a, a) + noise.R_sqrt * noise.R_sqrt;
    const double innovation = y - dot(u, belief.x_hat);

    BeliefState next;
    next.x_hat = belief.x_hat;
    for (std::size_t i = 0; i < n; ++i)
      next.x_hat[i] += pu[i] / s * innovation;
    next.P_sqrt = propagate_sqrt<double>(belief.P_sqrt, u, noise.Q_sqrt, noise.R_sqrt).next;
    next.t = belief.t + 1;
    return next;
  }

  BeliefState measurement_update(const BeliefState &belief, std::span<const double> u, double y,
                                 const SystemParams &params)
  {
    return measurement_update(belief, u, y, NoiseFactors::from(params));
  }

  BeliefState initial_belief(const Vector &x_hat_0, const SystemParams &params)
  {
    if (x_hat_0.size() != params.n_x())
      fail(ErrorCode::DimensionMismatch, "initial estimate has the wrong length");
    return BeliefState{x_hat_0, cholesky_upper(params.P0), 0};
  }

  double normalized_estimation_error(const BeliefState &belief, std::span<const double> x_true)
  {
    Vector e(x_true.begin(), x_true.end());
    for (std::size_t i = 0; i < e.size(); ++i)
      e[i] -= belief.x_hat[i];
    const Vector z = solve_transposed(belief.P_sqrt, e);
    return dot(z, z);
  }

} // namespace dualmpc
