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

#include "dualmpc/stochastic.hpp"

#include <cmath>
#include <limits>

namespace dualmpc
{

  std::uint64_t splitmix64(std::uint64_t x)
  {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  namespace
  {
    std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id)
    {
      const std::uint64_t a = splitmix64(seed);
      const std::uint64_t b = splitmix64(a ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
      const std::uint64_t c = splitmix64(b);
      std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                        static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
      return std::mt19937_64(seq);
    }
  } // namespace

  RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

  RngStream RngStream::for_run(std::uint64_t seed, std::uint64_t run, NoiseSource source)
  {
    return RngStream(seed, run * 8 + static_cast<std::uint64_t>(source));
  }

  double RngStream::standard_normal() { return normal_(engine_); }

  double RngStream::uniform()
  {
    // 53 random mantissa bits.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  GaussianSpec::GaussianSpec(Vector mean_, UpperTriangular factor)
      : mean(std::move(mean_)), covariance_factor(std::move(factor))
  {
    if (covariance_factor.dim() != mean.size())
      fail(ErrorCode::DimensionMismatch, "Gaussian mean and covariance factor dimensions differ");
  }

  Vector sample_gaussian(RngStream &stream, const GaussianSpec &spec)
  {
    const std::size_t n = spec.mean.size();
    Vector z(n);
    for (auto &zi : z)
      zi = stream.standard_normal();
    Vector out = multiply_transposed(spec.covariance_factor, std::span<const double>(z));
    for (std::size_t i = 0; i < n; ++i)
      out[i] += spec.mean[i];
    return out;
  }

  double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

  double inverse_normal_cdf(double p)
  {
    if (!(p > 0.0 && p < 1.0))
      fail(ErrorCode::OutOfDomain, "inverse_normal_cdf needs p in (0, 1)");
    // 1 - p is exact for p >= 0.5, and the lower tail keeps full relative precision.
    if (p > 0.5)
      return -inverse_normal_cdf(1.0 - p);

    // Acklam's rational approximation (relative error ~1e-9) ...
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low)
    {
      const double q = std::sqrt(-2.0 * std::log(p));
      x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
          ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    else
    {
      const double q = p - 0.5;
      const double r = q * q;
      x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
          (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // ... refined by one Newton step on Phi (Halley-corrected).
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
  }

} // namespace dualmpc
