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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dualmpc/closed_loop.hpp"

namespace dualmpc
{

  /// One controller in a campaign: a formulation and, for the explicit dual
  /// kind, its exploration weight.
  struct Variant
  {
    FormulationKind kind = FormulationKind::Nominal;
    double alpha = 0.0;

    /// "robust", "implicit-dual", ..., or "explicit-dual/<alpha>" (%g).
    std::string key() const;
    bool operator==(const Variant &) const = default;
  };

  struct CampaignSpec
  {
    SystemParams params = SystemParams::table_defaults();
    std::vector<FormulationKind> kinds{std::begin(kAllKinds), std::end(kAllKinds)};
    /// Weights for ExplicitDual; empty means {params.alpha}.
    std::vector<double> alphas;
    std::size_t n_runs = 1000;
    std::uint64_t base_seed = 1;
    std::size_t workers = 1;
    SolverConfig solver;
    bool multistart = true;
    /// Pins x_hat_0 for every run instead of sampling N(x0, P0).
    std::optional<Vector> x_hat_0;

    void validate() const;
    std::vector<Variant> variants() const;
  };

  struct RunRecord
  {
    std::size_t run_index = 0;
    Variant variant;
    RunOutcome outcome;
    std::uint64_t noise_fingerprint = 0;
    std::uint64_t initial_fingerprint = 0;
    double final_trace = 0.0; // trace of P at the last recorded cast
  };

  struct VariantSummary
  {
    Variant variant;
    std::size_t n_runs = 0;
    std::size_t n_failed = 0;
    double mean_cost = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
    double violation_share = 0.0;
    double content_violation_share = 0.0;
    double mean_final_trace = 0.0;
    std::vector<double> costs; // successful runs, in run order
  };

  struct MonteCarloSummary
  {
    std::size_t T = 0;
    std::uint64_t base_seed = 0;
    bool multistart = false;
    std::vector<VariantSummary> variants;
    std::vector<RunRecord> runs; // run-major, variant-minor

    const VariantSummary *find(const std::string &key) const;
  };

  /// Executes every variant on every run index. Run k draws x_hat_0 and its
  /// disturbances from streams keyed on (base_seed, k) only, so results do
  /// not depend on the worker count or scheduling.
  MonteCarloSummary run_campaign(const CampaignSpec &spec);

  /// Draws the run's x_hat_0 ~ N(x0, P0).
  Vector sample_initial_estimate(const SystemParams &params, std::uint64_t seed, std::uint64_t run);

  /// Hyndman-Fan type 7 quantile; throws EmptyInput for no data.
  double quantile(std::span<const double> values, double level);

  /// 1.06 * min(sd, IQR / 1.34) * n^(-1/5), with a positive floor for
  /// degenerate samples.
  double silverman_bandwidth(std::span<const double> values);

  struct DensityEstimate
  {
    Vector grid;
    Vector density;
    double bandwidth = 0.0;
  };

  /// Gaussian-kernel density on an evenly spaced grid spanning the data
  /// padded by three bandwidths.
  DensityEstimate kernel_density(std::span<const double> values, std::size_t grid_points = 256);

  /// ceil(fraction * n) points at evenly spaced indices.
  std::vector<double> scatter_subsample(std::span<const double> values, double fraction = 0.15);

  /// {key: {kind, alpha, n_runs, mean_cost, quantiles, violation_share, ...}}.
  void write_summary_json(const MonteCarloSummary &summary, std::ostream &out);
  /// {base_seed, multistart, sweep: [{alpha, mean_cost, quantile_0.99, ...}]}
  /// over the explicit-dual variants.
  void write_alpha_sweep_json(const MonteCarloSummary &summary, std::ostream &out);
  /// run_index, kind, alpha, total_cost, violations, content_violations, failed.
  void write_runs_csv(const MonteCarloSummary &summary, std::ostream &out);
  /// grid, density.
  void write_density_csv(const VariantSummary &variant, std::ostream &out);
  /// index, cost of the deterministic scatter subsample.
  void write_scatter_csv(const VariantSummary &variant, std::ostream &out);

} // namespace dualmpc
