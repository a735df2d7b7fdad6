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

#include <array>
#include <cmath>
#include <cstddef>

namespace dualmpc
{

  /// Forward-mode dual number carrying a chunk of K directional derivatives.
  ///
  /// Gradients of an n-variable function are obtained by ceil(n / K) passes,
  /// each seeding K unit directions. Only the operations the belief
  /// propagation and constraint evaluation need are provided.
  template <std::size_t K>
  struct Dual
  {
    double v = 0.0;
    std::array<double, K> d{};

    Dual() = default;
    Dual(double value) : v(value) {} // NOLINT: implicit by design of AD scalars

    static Dual seeded(double value, std::size_t direction)
    {
      Dual out(value);
      out.d[direction] = 1.0;
      return out;
    }

    Dual &operator+=(const Dual &o)
    {
      v += o.v;
      for (std::size_t i = 0; i < K; ++i)
        d[i] += o.d[i];
      return *this;
    }
    Dual &operator-=(const Dual &o)
    {
      v -= o.v;
      for (std::size_t i = 0; i < K; ++i)
        d[i] -= o.d[i];
      return *this;
    }
    Dual &operator*=(const Dual &o)
    {
      for (std::size_t i = 0; i < K; ++i)
        d[i] = d[i] * o.v + v * o.d[i];
      v *= o.v;
      return *this;
    }
    Dual &operator/=(const Dual &o)
    {
      const double inv = 1.0 / o.v;
      const double q = v * inv;
      for (std::size_t i = 0; i < K; ++i)
        d[i] = (d[i] - q * o.d[i]) * inv;
      v = q;
      return *this;
    }
  };

  template <std::size_t K>
  inline Dual<K> operator-(Dual<K> a)
  {
    a.v = -a.v;
    for (auto &x : a.d)
      x = -x;
    return a;
  }
  template <std::size_t K>
  inline Dual<K> operator+(Dual<K> a, const Dual<K> &b) { return a += b; }
  template <std::size_t K>
  inline Dual<K> operator-(Dual<K> a, const Dual<K> &b) { return a -= b; }
  template <std::size_t K>
  inline Dual<K> operator*(Dual<K> a, const Dual<K> &b) { return a *= b; }
  template <std::size_t K>
  inline Dual<K> operator/(Dual<K> a, const Dual<K> &b) { return a /= b; }

  template <std::size_t K>
  inline Dual<K> operator*(Dual<K> a, double s)
  {
    a.v *= s;
    for (auto &x : a.d)
      x *= s;
    return a;
  }
  template <std::size_t K>
  inline Dual<K> operator*(double s, Dual<K> a) { return a * s; }
  template <std::size_t K>
  inline Dual<K> operator+(Dual<K> a, double s)
  {
    a.v += s;
    return a;
  }
  template <std::size_t K>
  inline Dual<K> operator-(Dual<K> a, double s)
  {
    a.v -= s;
    return a;
  }

  /// sqrt with a zero derivative at the origin.
  template <std::size_t K>
  inline Dual<K> sqrt(const Dual<K> &a)
  {
    Dual<K> out(std::sqrt(a.v));
    if (out.v > 0.0)
    {
      const double h = 0.5 / out.v;
      for (std::size_t i = 0; i < K; ++i)
        out.d[i] = a.d[i] * h;
    }
    return out;
  }

  template <std::size_t K>
  inline Dual<K> abs(const Dual<K> &a) { return a.v < 0.0 ? -a : a; }

  inline double value(double x) { return x; }
  template <std::size_t K>
  inline double value(const Dual<K> &x) { return x.v; }

} // namespace dualmpc
