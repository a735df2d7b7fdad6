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

// Reference computations for the tests, written from the textbook formulas
// with plain loops and no library kernels.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

namespace oracle
{
  using Vec = std::vector<double>;
  using Mat = std::vector<Vec>; // row-major rows

  inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, Vec(c, 0.0)); }

  inline Mat eye(std::size_t n)
  {
    Mat m = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i)
      m[i][i] = 1.0;
    return m;
  }

  inline Mat matmul(const Mat &a, const Mat &b)
  {
    Mat c = zeros(a.size(), b.front().size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t k = 0; k < b.size(); ++k)
        for (std::size_t j = 0; j < b.front().size(); ++j)
          c[i][j] += a[i][k] * b[k][j];
    return c;
  }

  inline Mat transpose(const Mat &a)
  {
    Mat t = zeros(a.front().size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.front().size(); ++j)
        t[j][i] = a[i][j];
    return t;
  }

  inline double frob(const Mat &a)
  {
    double s = 0.0;
    for (const Vec &row : a)
      for (double x : row)
        s += x * x;
    return std::sqrt(s);
  }

  inline double rel_frob(const Mat &a, const Mat &b)
  {
    Mat d = a;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].size(); ++j)
        d[i][j] -= b[i][j];
    const double nb = frob(b);
    return nb > 0.0 ? frob(d) / nb : frob(d);
  }

  inline double quad(const Mat &P, const Vec &u)
  {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      for (std::size_t j = 0; j < u.size(); ++j)
        s += u[i] * P[i][j] * u[j];
    return s;
  }

  inline double dotv(const Vec &a, const Vec &b)
  {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      s += a[i] * b[i];
    return s;
  }

  /// (I - K u^T) P (I - K u^T)^T + K R K^T + Q with K = P u / (u^T P u + R).
  inline Mat joseph(const Mat &P, const Vec &u, const Mat &Q, double R)
  {
    const std::size_t n = u.size();
    Vec Pu(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        Pu[i] += P[i][j] * u[j];
    const double S = dotv(u, Pu) + R;
    Vec K(n);
    for (std::size_t i = 0; i < n; ++i)
      K[i] = Pu[i] / S;
    Mat A = eye(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        A[i][j] -= K[i] * u[j];
    Mat out = matmul(matmul(A, P), transpose(A));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out[i][j] += K[i] * R * K[j] + Q[i][j];
    return out;
  }

  /// Smallest eigenvalue of a symmetric 3x3 matrix (trigonometric closed form).
  inline double min_eigenvalue3(const Mat &A)
  {
    const double p1 = A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2];
    const double q = (A[0][0] + A[1][1] + A[2][2]) / 3.0;
    if (p1 == 0.0)
      return std::min({A[0][0], A[1][1], A[2][2]});
    const double p2 = (A[0][0] - q) * (A[0][0] - q) + (A[1][1] - q) * (A[1][1] - q) +
                      (A[2][2] - q) * (A[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Mat B = A;
    for (int i = 0; i < 3; ++i)
      B[i][i] -= q;
    for (auto &row : B)
      for (double &x : row)
        x /= p;
    const double det = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                       B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                       B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    return q + 2.0 * p * std::cos(phi + 2.0 * 3.14159265358979323846 / 3.0);
  }

  /// Exhaustive search over {u : sum u = 1, u >= 0} for three heaps on a grid
  /// of the given step, minimizing p^T u subject to feasible(u). Rows are
  /// split across threads.
  struct GridResult
  {
    double cost = std::numeric_limits<double>::infinity();
    Vec u;
  };

  inline GridResult grid_search3(const Vec &prices, double step, const std::function<bool(const Vec &)> &feasible,
                                 unsigned threads = std::max(1u, std::thread::hardware_concurrency()))
  {
    const long m = std::lround(1.0 / step);
    std::vector<GridResult> partial(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w]
                        {
        GridResult best;
        Vec u(3);
        for (long i = w; i <= m; i += threads)
          for (long j = 0; i + j <= m; ++j)
          {
            u[0] = static_cast<double>(i) / m;
            u[1] = static_cast<double>(j) / m;
            u[2] = static_cast<double>(m - i - j) / m;
            const double c = prices[0] * u[0] + prices[1] * u[1] + prices[2] * u[2];
            if (c < best.cost && feasible(u))
            {
              best.cost = c;
              best.u = u;
            }
          }
        partial[w] = best; });
    for (auto &t : pool)
      t.join();
    GridResult best;
    for (const GridResult &r : partial)
      if (r.cost < best.cost)
        best = r;
    return best;
  }

  /// Euclidean projection onto {sum v = 1, v >= 0} by sorting.
  inline Vec project_simplex(Vec v)
  {
    Vec s = v;
    std::sort(s.begin(), s.end(), std::greater<>());
    double cumulative = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
    {
      cumulative += s[k];
      const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
      if (s[k] - t > 0.0)
        tau = t;
    }
    for (double &x : v)
      x = std::max(0.0, x - tau);
    return v;
  }

  /// Type 7 quantile from the definition h = (n - 1) p.
  inline double quantile7(Vec x, double p)
  {
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
  }

  /// Standard normal CDF via erfc.
  inline double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

  /// Phi^{-1}(p) by bisection on phi.
  inline double inverse_phi_bisect(double p)
  {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i)
    {
      const double mid = 0.5 * (lo + hi);
      (phi(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

} // namespace oracle

// Conversions between the oracle types and the library's Matrix live in the
// test files that need them, so this header stays library-independent.
