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

#include "dualmpc/linalg.hpp"
#include "dualmpc/plant.hpp"

namespace dualmpc
{

  /// Prior belief (mean and square-root covariance) before the cast t
  /// measurement; P = P_sqrt^T P_sqrt.
  struct BeliefState
  {
    Vector x_hat;
    UpperTriangular P_sqrt;
    std::size_t t = 0;

    Matrix covariance() const { return gram(P_sqrt); }
  };

  struct KalmanGain
  {
    Vector k;
    double innovation_variance = 0.0; // S = u^T P u + R
  };

  /// K = P u / (u^T P u + R).
  KalmanGain kalman_gain(const Matrix &P, std::span<const double> u, double R);

  /// Joseph-form covariance propagation
  /// (I - K u^T) P (I - K u^T)^T + K R K^T + Q with K = kalman_gain(P, u, R).
  Matrix propagate_joseph(const Matrix &P, std::span<const double> u, const Matrix &Q, double R);

  template <typename T>
  struct SqrtPropagation
  {
    BasicUpperTriangular<T> next; // square-root factor of the next prior
    T innovation_sqrt;            // sqrt(u^T P u + R)
  };

  /// One square-root filter step. The (1 + 2n) x (1 + n) array
  ///
  ///     [ R_sqrt        0      ]
  ///     [ P_sqrt u      P_sqrt ]
  ///     [ 0             Q_sqrt ]
  ///
  /// is triangularized by Householder QR; the trailing n x n block of the
  /// R-factor is the next prior factor and its (0, 0) entry the innovation
  /// standard deviation. Zero factors (no uncertainty) are permitted.
  template <typename T>
  SqrtPropagation<T> propagate_sqrt(const BasicUpperTriangular<T> &P_sqrt, std::span<const T> u,
                                    const UpperTriangular &Q_sqrt, double R_sqrt)
  {
    const std::size_t n = P_sqrt.dim();
    if (u.size() != n || Q_sqrt.dim() != n)
      fail(ErrorCode::DimensionMismatch, "propagate_sqrt dimension mismatch");
    if (!(R_sqrt > 0.0))
      fail(ErrorCode::OutOfDomain, "propagate_sqrt needs R_sqrt > 0");

    const std::vector<T> pu = multiply(P_sqrt, u);
    BasicMatrix<T> block(1 + 2 * n, 1 + n);
    block(0, 0) = T(R_sqrt);
    for (std::size_t i = 0; i < n; ++i)
    {
      block(1 + i, 0) = pu[i];
      for (std::size_t j = i; j < n; ++j)
      {
        block(1 + i, 1 + j) = P_sqrt(i, j);
        block(1 + n + i, 1 + j) = T(Q_sqrt(i, j));
      }
    }
    const BasicUpperTriangular<T> r = qr_r_factor(std::move(block), RankPolicy::AllowSingular);

    SqrtPropagation<T> out{BasicUpperTriangular<T>(n), r(0, 0)};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        out.next.upper(i, j) = r(1 + i, 1 + j);
    return out;
  }

  inline SqrtPropagation<double> propagate_sqrt(const UpperTriangular &P_sqrt, const Vector &u,
                                                const UpperTriangular &Q_sqrt, double R_sqrt)
  {
    return propagate_sqrt<double>(P_sqrt, std::span<const double>(u), Q_sqrt, R_sqrt);
  }

  /// Closed-loop Kalman step with the applied control u and measured output y:
  /// x_hat' = x_hat + K (y - u^T x_hat), P_sqrt' = propagate_sqrt(P_sqrt, u).
  BeliefState measurement_update(const BeliefState &belief, std::span<const double> u, double y,
                                 const NoiseFactors &noise);

  BeliefState measurement_update(const BeliefState &belief, std::span<const double> u, double y,
                                 const SystemParams &params);

  /// Initial belief from a mean and the configured P0.
  BeliefState initial_belief(const Vector &x_hat_0, const SystemParams &params);

  /// (x - x_hat)^T P^{-1} (x - x_hat).
  double normalized_estimation_error(const BeliefState &belief, std::span<const double> x_true);

} // namespace dualmpc
