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

#include <cstdint>
#include <random>

#include "dualmpc/linalg.hpp"

namespace dualmpc
{

  /// Independent noise sources drawn within one Monte Carlo run.
  enum class NoiseSource : std::uint64_t
  {
    InitialEstimate = 0,
    Process = 1,
    Measurement = 2,
    Control = 3,
  };

  /// Deterministic normal-variate stream keyed on (seed, stream_id).
  ///
  /// The pair is mixed through SplitMix64 into the seed sequence of a 64-bit
  /// Mersenne twister, so streams with distinct ids are independent and the
  /// sequence of one id never depends on what other streams have consumed.
  class RngStream
  {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    /// Stream for one (run, source) pair of a campaign seeded with `seed`.
    static RngStream for_run(std::uint64_t seed, std::uint64_t run, NoiseSource source);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    double standard_normal();
    /// Uniform on [0, 1).
    double uniform();

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
  };

  struct GaussianSpec
  {
    Vector mean;
    UpperTriangular covariance_factor; // Sigma = F^T F

    GaussianSpec(Vector mean_, UpperTriangular factor);
  };

  /// mean + F^T z with z i.i.d. standard normal drawn from the stream.
  Vector sample_gaussian(RngStream &stream, const GaussianSpec &spec);

  /// Standard normal CDF.
  double normal_cdf(double z);

  /// Phi^{-1}(p) for p in (0, 1); throws OutOfDomain otherwise.
  double inverse_normal_cdf(double p);

  std::uint64_t splitmix64(std::uint64_t x);

} // namespace dualmpc
