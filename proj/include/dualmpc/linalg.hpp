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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dualmpc/autodiff.hpp"
#include "dualmpc/error.hpp"

namespace dualmpc
{

  using Vector = std::vector<double>;

  /// Dense row-major matrix. The scalar is templated so the same kernels run
  /// on doubles and on forward-mode dual numbers.
  template <typename T>
  class BasicMatrix
  {
  public:
    BasicMatrix() = default;
    BasicMatrix(std::size_t rows, std::size_t cols, T fill = T(0.0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static BasicMatrix identity(std::size_t n)
    {
      BasicMatrix m(n, n);
      for (std::size_t i = 0; i < n; ++i)
        m(i, i) = T(1.0);
      return m;
    }

    static BasicMatrix diagonal(std::span<const double> diag)
    {
      BasicMatrix m(diag.size(), diag.size());
      for (std::size_t i = 0; i < diag.size(); ++i)
        m(i, i) = T(diag[i]);
      return m;
    }

    /// Build from a list of rows; all rows must have equal length.
    static BasicMatrix from_rows(const std::vector<std::vector<T>> &rows)
    {
      if (rows.empty() || rows.front().empty())
        fail(ErrorCode::DimensionMismatch, "matrix needs at least one row and one column");
      BasicMatrix m(rows.size(), rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i)
      {
        if (rows[i].size() != m.cols_)
          fail(ErrorCode::DimensionMismatch, "ragged matrix rows");
        for (std::size_t j = 0; j < m.cols_; ++j)
          m(i, j) = rows[i][j];
      }
      return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const T> data() const noexcept { return data_; }
    std::span<T> data() noexcept { return data_; }

    bool operator==(const BasicMatrix &) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
  };

  /// Square upper-triangular matrix; entries below the diagonal are zero by
  /// construction and cannot be written.
  template <typename T>
  class BasicUpperTriangular
  {
  public:
    BasicUpperTriangular() = default;
    explicit BasicUpperTriangular(std::size_t dim) : dim_(dim), data_(dim * dim, T(0.0)) {}

    /// Copies the upper triangle of a square matrix, discarding the rest.
    static BasicUpperTriangular from_upper(const BasicMatrix<T> &m)
    {
      if (m.rows() != m.cols())
        fail(ErrorCode::DimensionMismatch, "upper-triangular factor must be square");
      BasicUpperTriangular r(m.rows());
      for (std::size_t i = 0; i < r.dim_; ++i)
        for (std::size_t j = i; j < r.dim_; ++j)
          r.data_[i * r.dim_ + j] = m(i, j);
      return r;
    }

    static BasicUpperTriangular diagonal(std::span<const double> diag)
    {
      BasicUpperTriangular r(diag.size());
      for (std::size_t i = 0; i < diag.size(); ++i)
        r.data_[i * r.dim_ + i] = T(diag[i]);
      return r;
    }

    std::size_t dim() const noexcept { return dim_; }

    T operator()(std::size_t i, std::size_t j) const { return i > j ? T(0.0) : data_[i * dim_ + j]; }

    /// Writable access to the upper triangle only.
    T &upper(std::size_t i, std::size_t j)
    {
      if (i > j)
        fail(ErrorCode::DimensionMismatch, "write below the diagonal of an upper-triangular factor");
      return data_[i * dim_ + j];
    }

    BasicMatrix<T> to_matrix() const
    {
      BasicMatrix<T> m(dim_, dim_);
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j)
          m(i, j) = data_[i * dim_ + j];
      return m;
    }

    bool operator==(const BasicUpperTriangular &) const = default;

  private:
    std::size_t dim_ = 0;
    std::vector<T> data_;
  };

  using Matrix = BasicMatrix<double>;
  using UpperTriangular = BasicUpperTriangular<double>;

  enum class RankPolicy
  {
    /// Raise RankDeficient when a Householder column norm vanishes.
    Strict,
    /// Leave an exactly-zero column in place, giving a zero diagonal entry.
    AllowSingular,
  };

  /// Euclidean norm with scaling by the largest magnitude to avoid overflow.
  /// For dual scalars the derivative at the origin is taken as zero.
  template <typename T>
  T two_norm(std::span<const T> v)
  {
    double scale = 0.0;
    for (const auto &x : v)
      scale = std::max(scale, std::abs(value(x)));
    if (scale == 0.0)
      return T(0.0);
    const double inv = 1.0 / scale;
    T sum(0.0);
    for (const auto &x : v)
    {
      const T s = x * inv;
      sum += s * s;
    }
    using std::sqrt;
    return sqrt(sum) * scale;
  }

  inline double two_norm(const Vector &v) { return two_norm(std::span<const double>(v)); }

  /// R * v for an upper-triangular R.
  template <typename T, typename U>
  std::vector<T> multiply(const BasicUpperTriangular<T> &r, std::span<const U> v)
  {
    const std::size_t n = r.dim();
    if (v.size() != n)
      fail(ErrorCode::DimensionMismatch, "factor/vector dimension mismatch");
    std::vector<T> out(n, T(0.0));
    for (std::size_t i = 0; i < n; ++i)
    {
      T acc(0.0);
      for (std::size_t j = i; j < n; ++j)
        acc += r(i, j) * v[j];
      out[i] = acc;
    }
    return out;
  }

  /// R^T * v for an upper-triangular R.
  template <typename T>
  std::vector<T> multiply_transposed(const BasicUpperTriangular<T> &r, std::span<const T> v)
  {
    const std::size_t n = r.dim();
    if (v.size() != n)
      fail(ErrorCode::DimensionMismatch, "factor/vector dimension mismatch");
    std::vector<T> out(n, T(0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        out[j] += r(i, j) * v[i];
    return out;
  }

  /// ||R||_F^2 = trace(R^T R).
  template <typename T>
  T frobenius_squared(const BasicUpperTriangular<T> &r)
  {
    T acc(0.0);
    for (std::size_t i = 0; i < r.dim(); ++i)
      for (std::size_t j = i; j < r.dim(); ++j)
        acc += r(i, j) * r(i, j);
    return acc;
  }

  /// Upper-triangular R with nonnegative diagonal such that R^T R = A^T A,
  /// computed by Householder reflections without forming the orthogonal factor.
  template <typename T>
  BasicUpperTriangular<T> qr_r_factor(BasicMatrix<T> a, RankPolicy policy = RankPolicy::Strict)
  {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n)
      fail(ErrorCode::DimensionMismatch, "qr_r_factor needs rows >= cols");

    std::vector<T> column(m);
    for (std::size_t j = 0; j < n; ++j)
    {
      const std::size_t len = m - j;
      for (std::size_t i = 0; i < len; ++i)
        column[i] = a(j + i, j);
      const T norm = two_norm(std::span<const T>(column.data(), len));
      if (!(value(norm) > 0.0) || !std::isfinite(value(norm)))
      {
        if (policy == RankPolicy::Strict || !std::isfinite(value(norm)))
          fail(ErrorCode::RankDeficient, "Householder column norm vanished at column " + std::to_string(j));
        continue;
      }
      using std::abs;
      const T x0 = a(j, j);
      const T alpha = value(x0) >= 0.0 ? -norm : norm;
      // v = x - alpha e1, and 2 / (v^T v) = 1 / (norm (norm + |x0|)).
      const T v0 = x0 - alpha;
      const T beta = T(1.0) / (norm * (norm + abs(x0)));
      a(j, j) = alpha;
      for (std::size_t k = j + 1; k < n; ++k)
      {
        T s = v0 * a(j, k);
        for (std::size_t i = j + 1; i < m; ++i)
          s += a(i, j) * a(i, k);
        s *= beta;
        a(j, k) -= s * v0;
        for (std::size_t i = j + 1; i < m; ++i)
          a(i, k) -= s * a(i, j);
      }
      for (std::size_t i = j + 1; i < m; ++i)
        a(i, j) = T(0.0);
    }

    BasicUpperTriangular<T> r(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      const bool flip = value(a(i, i)) < 0.0;
      for (std::size_t j = i; j < n; ++j)
        r.upper(i, j) = flip ? -a(i, j) : a(i, j);
    }
    return r;
  }

  /// Upper Cholesky factor R (nonnegative diagonal) with R^T R = a.
  UpperTriangular cholesky_upper(const Matrix &a);

  /// Upper factor of a positive semidefinite matrix. Zero pivots are accepted
  /// when the rest of their row is zero (relative tolerance 1e-12), giving a
  /// zero row in the factor; any other non-positive pivot is NotPositiveDefinite.
  UpperTriangular cholesky_upper_semidefinite(const Matrix &a);

  /// R^T R.
  Matrix gram(const UpperTriangular &r);

  /// Solves R^T y = b (forward substitution).
  Vector solve_transposed(const UpperTriangular &r, std::span<const double> b);

  Matrix multiply(const Matrix &a, const Matrix &b);
  Vector multiply(const Matrix &a, std::span<const double> v);
  Matrix transpose(const Matrix &a);
  Matrix add(const Matrix &a, const Matrix &b);
  double frobenius_norm(const Matrix &a);
  double dot(std::span<const double> a, std::span<const double> b);

  /// ||a - b||_F / ||b||_F (absolute when b is zero).
  double relative_frobenius_error(const Matrix &a, const Matrix &b);

  bool is_finite(const Matrix &a);

} // namespace dualmpc
