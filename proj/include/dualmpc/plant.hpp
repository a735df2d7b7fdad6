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

namespace dualmpc
{

  /// Plant, estimator, constraint and horizon parameters of the scrap
  /// blending process. Copper contents are mass fractions (not percent).
  struct SystemParams
  {
    Vector x0_true;  // true copper fraction per heap at t = 0
    Matrix P0;       // initial estimate covariance
    Matrix Q;        // state random-walk covariance
    double R = 0.0;  // output noise variance (scalar output)
    Vector prices;   // cost per unit mass per heap
    double y_max = 0.0;
    double gamma = 0.0; // chance-constraint backoff coefficient
    Vector u_min;
    Vector u_max;
    std::size_t N = 0; // prediction horizon (dual formulations plan N + 1 stages)
    std::size_t T = 0; // number of casts
    double alpha = 0.0;

    std::size_t n_x() const noexcept { return x0_true.size(); }

    /// Default experiment: three heaps, P0 = diag(1e-4, 1e-3, 1e-3),
    /// Q = 1e-7 I, R = 2e-6, prices (2, 1, 1), y_max = 0.12, gamma = 2,
    /// bounds [0, 1], alpha = 100, N = 15, T = 20.
    static SystemParams table_defaults();

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;

    bool operator==(const SystemParams &) const = default;
  };

  /// Square-root factors derived once from SystemParams.
  struct NoiseFactors
  {
    UpperTriangular P0_sqrt;
    UpperTriangular Q_sqrt;
    double R_sqrt = 0.0;

    static NoiseFactors from(const SystemParams &params);
  };

  struct PlantState
  {
    Vector x;
    std::size_t t = 0;
  };

  /// x' = x + w, t' = t + 1.
  PlantState plant_step(const PlantState &state, std::span<const double> w);

  /// u^T x + v.
  double measure(const PlantState &state, std::span<const double> u, double v);

} // namespace dualmpc
