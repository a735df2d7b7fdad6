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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dualmpc/experiments.hpp"

namespace dualmpc
{

  enum class RunMode
  {
    Single,
    Campaign,
    AlphaSweep,
  };

  /// "single", "campaign", "alpha-sweep".
  std::string_view to_string(RunMode mode) noexcept;
  std::optional<RunMode> parse_mode(std::string_view name) noexcept;

  /// Estimate used by the single-run example when none is configured.
  Vector selected_example_estimate();

  /// Weights swept when alpha-sweep mode has no explicit list.
  std::vector<double> default_sweep_alphas();

  /// Everything a command-line invocation needs. Defaults reproduce the
  /// three-heap reference experiment.
  struct Config
  {
    SystemParams params = SystemParams::table_defaults();
    RunMode mode = RunMode::Campaign;
    FormulationKind kind = FormulationKind::ExplicitDual; // single mode
    std::vector<FormulationKind> kinds{std::begin(kAllKinds), std::end(kAllKinds)};
    std::vector<double> alphas; // empty: params.alpha (campaign) or the default sweep
    std::uint64_t seed = 1;
    std::size_t n_runs = 1000;
    std::size_t workers = 1;
    bool multistart = true;
    std::string output_dir = ".";
    std::optional<Vector> x_hat_0;
    SolverConfig solver;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;

    /// Campaign for the configured mode; alpha-sweep runs only explicit-dual.
    CampaignSpec campaign() const;

    /// x_hat_0 for single mode: the configured one, else the selected example
    /// for three heaps, else a draw from the seed's initial-estimate stream.
    Vector single_estimate() const;

    bool operator==(const Config &) const = default;
  };

  /// Closed-loop run of config.kind from single_estimate(), with the
  /// disturbances of run 0 of the configured seed.
  ClosedLoopTrace run_single(const Config &config);

  /// Parses the key-value format documented in the README and validates the
  /// result. `source` prefixes diagnostics. Throws ParseError (with the line
  /// number) for malformed lines, unknown or repeated keys and bad values.
  Config parse_config_text(std::string_view text, std::string_view source = "<config>");

  /// Reads and parses a file; IoError if it cannot be read.
  Config parse_config(const std::string &path);

  /// Text that parses back to an equal Config (numbers printed with %.17g).
  std::string write_config(const Config &config);

  /// Applies one `key = value` assignment on top of an existing config, using
  /// the same value grammar as the file format, then revalidates.
  void set_config_value(Config &config, std::string_view key, std::string_view value);

} // namespace dualmpc
