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

// Glue between the oracle types and the library, plus random test inputs.

#pragma once

#include <random>

#include "dualmpc/linalg.hpp"
#include "oracles.hpp"

namespace support
{
  inline oracle::Mat to_mat(const dualmpc::Matrix &m)
  {
    oracle::Mat out = oracle::zeros(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        out[i][j] = m(i, j);
    return out;
  }

  inline oracle::Mat to_mat(const dualmpc::UpperTriangular &r) { return to_mat(r.to_matrix()); }

  inline dualmpc::Matrix from_mat(const oracle::Mat &m) { return dualmpc::Matrix::from_rows(m); }

  /// Factor gram R^T R with plain loops.
  inline oracle::Mat gram_of(const dualmpc::UpperTriangular &r)
  {
    const oracle::Mat R = to_mat(r);
    return oracle::matmul(oracle::transpose(R), R);
  }

  inline oracle::Mat random_matrix(std::mt19937_64 &rng, std::size_t r, std::size_t c, double scale = 1.0)
  {
    std::normal_distribution<double> n(0.0, scale);
    oracle::Mat m = oracle::zeros(r, c);
    for (auto &row : m)
      for (double &x : row)
        x = n(rng);
    return m;
  }

  /// M^T M + eps I, scaled.
  inline oracle::Mat random_spd(std::mt19937_64 &rng, std::size_t n, double scale = 1.0, double eps = 1e-3)
  {
    const oracle::Mat M = random_matrix(rng, n, n);
    oracle::Mat A = oracle::matmul(oracle::transpose(M), M);
    for (std::size_t i = 0; i < n; ++i)
      A[i][i] += eps;
    for (auto &row : A)
      for (double &x : row)
        x *= scale;
    return A;
  }

  /// Uniform point on the probability simplex (normalized exponentials).
  inline std::vector<double> random_simplex(std::mt19937_64 &rng, std::size_t n)
  {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> u(n);
    double s = 0.0;
    for (double &x : u)
      s += (x = e(rng));
    for (double &x : u)
      x /= s;
    return u;
  }

} // namespace support
