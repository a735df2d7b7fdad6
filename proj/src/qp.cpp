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

#include "dualmpc/qp.hpp"

#include <cmath>
#include <limits>

namespace dualmpc
{

  namespace
  {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr double kEps = std::numeric_limits<double>::epsilon();

    /// Working set of the dual method. J = L^{-T} Q of the factorization of
    /// the active normals; the first `iq` columns of R hold the triangular
    /// factor. Entry `iq` of `active`/`u` is the constraint being added.
    struct WorkingSet
    {
      explicit WorkingSet(std::size_t n) : n(n), J(n, n), R(n, n), active(n + 1, 0), u(n + 1, 0.0) {}

      std::size_t n;
      Matrix J;
      Matrix R;
      std::size_t iq = 0;
      double r_norm = 1.0;
      std::vector<long> active; // equality i -> -(i + 1), inequality i -> i
      Vector u;

      void compute_d(std::span<const double> normal, Vector &d) const
      {
        for (std::size_t i = 0; i < n; ++i)
        {
          double acc = 0.0;
          for (std::size_t k = 0; k < n; ++k)
            acc += J(k, i) * normal[k];
          d[i] = acc;
        }
      }

      void primal_direction(const Vector &d, Vector &z) const
      {
        for (std::size_t k = 0; k < n; ++k)
        {
          double acc = 0.0;
          for (std::size_t j = iq; j < n; ++j)
            acc += J(k, j) * d[j];
          z[k] = acc;
        }
      }

      void dual_direction(const Vector &d, Vector &r) const
      {
        for (std::size_t ii = iq; ii-- > 0;)
        {
          double acc = d[ii];
          for (std::size_t j = ii + 1; j < iq; ++j)
            acc -= R(ii, j) * r[j];
          r[ii] = acc / R(ii, ii);
        }
      }

      bool add(Vector &d)
      {
        for (std::size_t j = n - 1; j >= iq + 1; --j)
        {
          const double h = std::hypot(d[j - 1], d[j]);
          if (h == 0.0)
            continue;
          const double cc = d[j - 1] / h;
          const double ss = d[j] / h;
          d[j - 1] = h;
          d[j] = 0.0;
          for (std::size_t k = 0; k < n; ++k)
          {
            const double t1 = J(k, j - 1);
            const double t2 = J(k, j);
            J(k, j - 1) = cc * t1 + ss * t2;
            J(k, j) = ss * t1 - cc * t2;
          }
        }
        ++iq;
        for (std::size_t i = 0; i < iq; ++i)
          R(i, iq - 1) = d[i];
        if (std::abs(d[iq - 1]) <= kEps * r_norm)
          return false;
        r_norm = std::max(r_norm, std::abs(d[iq - 1]));
        return true;
      }

      void drop(std::size_t position)
      {
        for (std::size_t i = position; i + 1 < iq; ++i)
          for (std::size_t row = 0; row < n; ++row)
            R(row, i) = R(row, i + 1);
        for (std::size_t i = position; i < iq; ++i)
        {
          active[i] = active[i + 1];
          u[i] = u[i + 1];
        }
        active[iq] = 0;
        u[iq] = 0.0;
        for (std::size_t row = 0; row < n; ++row)
          R(row, iq - 1) = 0.0;
        --iq;

        for (std::size_t j = position; j < iq; ++j)
        {
          const double h = std::hypot(R(j, j), R(j + 1, j));
          if (h == 0.0)
            continue;
          const double cc = R(j, j) / h;
          const double ss = R(j + 1, j) / h;
          R(j, j) = h;
          R(j + 1, j) = 0.0;
          for (std::size_t col = j + 1; col < iq; ++col)
          {
            const double t1 = R(j, col);
            const double t2 = R(j + 1, col);
            R(j, col) = cc * t1 + ss * t2;
            R(j + 1, col) = ss * t1 - cc * t2;
          }
          for (std::size_t k = 0; k < n; ++k)
          {
            const double t1 = J(k, j);
            const double t2 = J(k, j + 1);
            J(k, j) = cc * t1 + ss * t2;
            J(k, j + 1) = ss * t1 - cc * t2;
          }
        }
      }
    };

    std::span<const double> row(const Matrix &m, std::size_t i) { return m.data().subspan(i * m.cols(), m.cols()); }

    double row_dot(const Matrix &m, std::size_t i, std::span<const double> x)
    {
      double acc = 0.0;
      for (std::size_t k = 0; k < m.cols(); ++k)
        acc += m(i, k) * x[k];
      return acc;
    }
  } // namespace

  QpSolution solve_qp(const QuadraticProgram &qp)
  {
    const std::size_t n = qp.linear.size();
    const std::size_t me = qp.eq_rhs.size();
    const std::size_t mi = qp.ineq_rhs.size();
    if (n == 0 || qp.hessian.rows() != n || qp.hessian.cols() != n || (me > 0 && qp.eq.cols() != n) ||
        (mi > 0 && qp.ineq.cols() != n) || qp.eq.rows() != me || qp.ineq.rows() != mi)
      fail(ErrorCode::DimensionMismatch, "QP data dimensions are inconsistent");

    QpSolution sol;
    sol.eq_multipliers.assign(me, 0.0);
    sol.ineq_multipliers.assign(mi, 0.0);

    // G = L^T L with L upper; J = L^{-1} so that J J^T = G^{-1}.
    UpperTriangular L;
    double delta = 0.0;
    for (int attempt = 0;; ++attempt)
    {
      try
      {
        Matrix g = qp.hessian;
        for (std::size_t i = 0; i < n; ++i)
          g(i, i) += delta;
        L = cholesky_upper(g);
        break;
      }
      catch (const Error &e)
      {
        if (e.code() == ErrorCode::Asymmetric || attempt > 80)
          return sol;
        delta = delta == 0.0 ? 1e-10 : 2.0 * delta;
      }
    }
    sol.regularization = delta;

    WorkingSet ws(n);
    for (std::size_t col = 0; col < n; ++col)
    {
      // Solve L j = e_col by back substitution.
      for (std::size_t ii = n; ii-- > 0;)
      {
        double acc = ii == col ? 1.0 : 0.0;
        for (std::size_t k = ii + 1; k < n; ++k)
          acc -= L(ii, k) * ws.J(k, col);
        ws.J(ii, col) = acc / L(ii, ii);
      }
    }

    // Unconstrained minimizer x = -J J^T a.
    Vector x(n, 0.0);
    {
      Vector jta(n, 0.0);
      ws.compute_d(qp.linear, jta);
      for (std::size_t k = 0; k < n; ++k)
      {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          acc += ws.J(k, j) * jta[j];
        x[k] = -acc;
      }
    }

    Vector d(n, 0.0), z(n, 0.0), r(n + 1, 0.0);

    for (std::size_t i = 0; i < me; ++i)
    {
      const auto normal = row(qp.eq, i);
      ws.compute_d(normal, d);
      ws.primal_direction(d, z);
      ws.dual_direction(d, r);
      const double zn = dot(z, normal);
      double t = 0.0;
      if (zn > 1e-14 * dot(d, d))
        t = (qp.eq_rhs[i] - dot(normal, x)) / zn;
      for (std::size_t k = 0; k < n; ++k)
        x[k] += t * z[k];
      ws.u[ws.iq] = t;
      for (std::size_t k = 0; k < ws.iq; ++k)
        ws.u[k] -= t * r[k];
      ws.active[ws.iq] = -static_cast<long>(i) - 1;
      if (!ws.add(d))
        return sol; // linearly dependent equalities
    }

    std::vector<char> inactive(mi, 1);
    std::vector<double> row_scale(mi, 0.0);
    for (std::size_t i = 0; i < mi; ++i)
      for (double c : row(qp.ineq, i))
        row_scale[i] = std::max(row_scale[i], std::abs(c));

    const std::size_t max_iterations = 50 * (n + mi + me) + 100;
    std::size_t iterations = 0;
    for (;;)
    {
      // Step 1: most violated inactive inequality.
      double x_scale = 1.0;
      for (double xi : x)
        x_scale = std::max(x_scale, std::abs(xi));
      std::size_t p = mi;
      double worst = 0.0;
      for (std::size_t i = 0; i < mi; ++i)
      {
        if (!inactive[i])
          continue;
        const double s = row_dot(qp.ineq, i, x) - qp.ineq_rhs[i];
        const double tol = 1e-12 * (std::abs(qp.ineq_rhs[i]) + row_scale[i] * x_scale + 1e-3);
        if (s < -tol && s < worst)
        {
          worst = s;
          p = i;
        }
      }
      if (p == mi)
        break;

      const auto normal = row(qp.ineq, p);
      ws.active[ws.iq] = static_cast<long>(p);
      ws.u[ws.iq] = 0.0;
      double s_p = worst;

      // Step 2: make constraint p active.
      for (;;)
      {
        if (++iterations > max_iterations)
          return sol;
        ws.compute_d(normal, d);
        ws.primal_direction(d, z);
        ws.dual_direction(d, r);

        double t1 = kInf;
        std::size_t drop_at = ws.iq;
        for (std::size_t k = 0; k < ws.iq; ++k)
        {
          if (ws.active[k] < 0 || r[k] <= 0.0)
            continue;
          const double ratio = ws.u[k] / r[k];
          if (ratio < t1)
          {
            t1 = ratio;
            drop_at = k;
          }
        }
        const double zn = dot(z, normal);
        const double t2 = zn > 1e-14 * dot(d, d) ? -s_p / zn : kInf;
        const double t = std::min(t1, t2);

        if (t == kInf)
        {
          sol.status = QpStatus::Infeasible;
          sol.x = x;
          sol.iterations = iterations;
          return sol;
        }

        // A nearly tangent constraint leaves z small but nonzero, so x moves
        // even when only a drop limits the step.
        for (std::size_t k = 0; k < n; ++k)
          x[k] += t * z[k];
        for (std::size_t k = 0; k < ws.iq; ++k)
          ws.u[k] -= t * r[k];
        ws.u[ws.iq] += t;

        if (t == t2)
        {
          if (!ws.add(d))
            return sol;
          inactive[p] = 0;
          break;
        }

        inactive[static_cast<std::size_t>(ws.active[drop_at])] = 1;
        ws.drop(drop_at);
        s_p = row_dot(qp.ineq, p, x) - qp.ineq_rhs[p];
      }
    }

    for (std::size_t k = 0; k < ws.iq; ++k)
    {
      const long id = ws.active[k];
      if (id < 0)
        sol.eq_multipliers[static_cast<std::size_t>(-id - 1)] = ws.u[k];
      else
        sol.ineq_multipliers[static_cast<std::size_t>(id)] = ws.u[k];
    }
    const Vector gx = multiply(qp.hessian, x);
    sol.objective = 0.5 * dot(x, gx) + dot(qp.linear, x);
    sol.x = std::move(x);
    sol.status = QpStatus::Optimal;
    sol.iterations = iterations;
    return sol;
  }

} // namespace dualmpc
