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

#include "dualmpc/linalg.hpp"

#include <cmath>

namespace dualmpc
{

  std::string_view to_string(ErrorCode code) noexcept
  {
    switch (code)
    {
    case ErrorCode::NotPositiveDefinite:
      return "NotPositiveDefinite";
    case ErrorCode::Asymmetric:
      return "Asymmetric";
    case ErrorCode::RankDeficient:
      return "RankDeficient";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::OutOfDomain:
      return "OutOfDomain";
    case ErrorCode::NonFinite:
      return "NonFinite";
    case ErrorCode::EmptyInput:
      return "EmptyInput";
    case ErrorCode::ParseError:
      return "ParseError";
    case ErrorCode::ValidationError:
      return "ValidationError";
    case ErrorCode::IoError:
      return "IoError";
    }
    return "Unknown";
  }

  UpperTriangular cholesky_upper(const Matrix &a)
  {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n)
      fail(ErrorCode::DimensionMismatch, "cholesky_upper needs a nonempty square matrix");
    double scale = 0.0;
    for (double x : a.data())
      scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale)
          fail(ErrorCode::Asymmetric, "matrix is not symmetric at (" + std::to_string(i) + ", " +
                                          std::to_string(j) + ")");

    UpperTriangular r(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      double pivot = a(i, i);
      for (std::size_t k = 0; k < i; ++k)
        pivot -= r(k, i) * r(k, i);
      if (!(pivot > 0.0))
        fail(ErrorCode::NotPositiveDefinite, "non-positive pivot at row " + std::to_string(i));
      const double diag = std::sqrt(pivot);
      r.upper(i, i) = diag;
      for (std::size_t j = i + 1; j < n; ++j)
      {
        double acc = a(i, j);
        for (std::size_t k = 0; k < i; ++k)
          acc -= r(k, i) * r(k, j);
        r.upper(i, j) = acc / diag;
      }
    }
    return r;
  }

  UpperTriangular cholesky_upper_semidefinite(const Matrix &a)
  {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n)
      fail(ErrorCode::DimensionMismatch, "cholesky_upper_semidefinite needs a nonempty square matrix");
    double scale = 0.0;
    for (double x : a.data())
      scale = std::max(scale, std::abs(x));
    const double tol = 1e-12 * scale;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a(i, j) - a(j, i)) > tol)
          fail(ErrorCode::Asymmetric, "matrix is not symmetric at (" + std::to_string(i) + ", " +
                                          std::to_string(j) + ")");

    UpperTriangular r(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      double pivot = a(i, i);
      for (std::size_t k = 0; k < i; ++k)
        pivot -= r(k, i) * r(k, i);
      if (pivot > tol)
      {
        const double diag = std::sqrt(pivot);
        r.upper(i, i) = diag;
        for (std::size_t j = i + 1; j < n; ++j)
        {
          double acc = a(i, j);
          for (std::size_t k = 0; k < i; ++k)
            acc -= r(k, i) * r(k, j);
          r.upper(i, j) = acc / diag;
        }
        continue;
      }
      if (pivot < -tol)
        fail(ErrorCode::NotPositiveDefinite, "negative pivot at row " + std::to_string(i));
      for (std::size_t j = i + 1; j < n; ++j)
      {
        double acc = a(i, j);
        for (std::size_t k = 0; k < i; ++k)
          acc -= r(k, i) * r(k, j);
        if (std::abs(acc) > tol)
          fail(ErrorCode::NotPositiveDefinite, "indefinite matrix at row " + std::to_string(i));
      }
    }
    return r;
  }

  Matrix gram(const UpperTriangular &r)
  {
    const std::size_t n = r.dim();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
      {
        double acc = 0.0;
        for (std::size_t k = 0; k <= i; ++k)
          acc += r(k, i) * r(k, j);
        out(i, j) = acc;
        out(j, i) = acc;
      }
    return out;
  }

  Vector solve_transposed(const UpperTriangular &r, std::span<const double> b)
  {
    const std::size_t n = r.dim();
    if (b.size() != n)
      fail(ErrorCode::DimensionMismatch, "solve_transposed dimension mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      double acc = b[i];
      for (std::size_t k = 0; k < i; ++k)
        acc -= r(k, i) * y[k];
      if (r(i, i) == 0.0)
        fail(ErrorCode::RankDeficient, "singular triangular factor");
      y[i] = acc / r(i, i);
    }
    return y;
  }

  Matrix multiply(const Matrix &a, const Matrix &b)
  {
    if (a.cols() != b.rows())
      fail(ErrorCode::DimensionMismatch, "matrix product dimension mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t k = 0; k < a.cols(); ++k)
      {
        const double aik = a(i, k);
        for (std::size_t j = 0; j < b.cols(); ++j)
          out(i, j) += aik * b(k, j);
      }
    return out;
  }

  Vector multiply(const Matrix &a, std::span<const double> v)
  {
    if (a.cols() != v.size())
      fail(ErrorCode::DimensionMismatch, "matrix-vector dimension mismatch");
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        out[i] += a(i, j) * v[j];
    return out;
  }

  Matrix transpose(const Matrix &a)
  {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        out(j, i) = a(i, j);
    return out;
  }

  Matrix add(const Matrix &a, const Matrix &b)
  {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      fail(ErrorCode::DimensionMismatch, "matrix sum dimension mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        out(i, j) += b(i, j);
    return out;
  }

  double frobenius_norm(const Matrix &a) { return two_norm(a.data()); }

  double dot(std::span<const double> a, std::span<const double> b)
  {
    if (a.size() != b.size())
      fail(ErrorCode::DimensionMismatch, "dot product dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      acc += a[i] * b[i];
    return acc;
  }

  double relative_frobenius_error(const Matrix &a, const Matrix &b)
  {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      fail(ErrorCode::DimensionMismatch, "relative error dimension mismatch");
    Matrix diff = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        diff(i, j) -= b(i, j);
    const double denom = frobenius_norm(b);
    const double num = frobenius_norm(diff);
    return denom > 0.0 ? num / denom : num;
  }

  bool is_finite(const Matrix &a)
  {
    for (double x : a.data())
      if (!std::isfinite(x))
        return false;
    return true;
  }

} // namespace dualmpc
