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

  /// Strictly convex QP
  ///
  ///     min 1/2 x^T G x + a^T x   s.t.  E x = b,  C x >= d
  ///
  /// where rows of E and C are constraint normals.
  struct QuadraticProgram
  {
    Matrix hessian;
    Vector linear;
    Matrix eq;
    Vector eq_rhs;
    Matrix ineq;
    Vector ineq_rhs;
  };

  enum class QpStatus
  {
    Optimal,
    Infeasible,
    NumericalFailure,
  };

  /// Multipliers satisfy G x + a = E^T eq_multipliers + C^T ineq_multipliers
  /// with ineq_multipliers >= 0 and zero on inactive rows.
  struct QpSolution
  {
    QpStatus status = QpStatus::NumericalFailure;
    Vector x;
    Vector eq_multipliers;
    Vector ineq_multipliers;
    double objective = 0.0;
    std::size_t iterations = 0;
    double regularization = 0.0; // delta added to G before factorization
  };

  /// Dual active-set method of Goldfarb and Idnani. G is regularized by
  /// +delta I (delta doubling from 1e-10) if its Cholesky factorization fails.
  QpSolution solve_qp(const QuadraticProgram &qp);

} // namespace dualmpc
