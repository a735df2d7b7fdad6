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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dualmpc/experiments.hpp"
#include "support.hpp"

using namespace dualmpc;

namespace
{
  CampaignSpec small_spec(std::size_t runs, std::size_t workers)
  {
    CampaignSpec spec;
    spec.kinds = {FormulationKind::Nominal, FormulationKind::Robust, FormulationKind::ExplicitDual};
    spec.alphas = {10.0, 100.0};
    spec.n_runs = runs;
    spec.workers = workers;
    spec.base_seed = 17;
    return spec;
  }

  std::string summary_text(const MonteCarloSummary &s)
  {
    std::ostringstream os;
    write_summary_json(s, os);
    write_runs_csv(s, os);
    return os.str();
  }

  ErrorCode code_of(const std::function<void()> &f)
  {
    try
    {
      f();
    }
    catch (const Error &e)
    {
      return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::IoError;
  }
} // namespace

TEST_CASE("quantiles")
{
  const std::vector<double> five{5.0, 1.0, 4.0, 2.0, 3.0};
  CHECK(quantile(five, 0.5) == 3.0);
  CHECK(quantile(five, 1.0) == 5.0);
  CHECK(quantile(five, 0.0) == 1.0);
  std::vector<double> hundred(100);
  for (int i = 0; i < 100; ++i)
    hundred[static_cast<std::size_t>(i)] = i;
  CHECK(quantile(hundred, 0.99) == doctest::Approx(98.01).epsilon(1e-12));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial)
  {
    std::vector<double> x(1 + static_cast<std::size_t>(trial) * 7);
    for (double &v : x)
      v = nd(rng);
    for (double level : {0.0, 0.1, 0.5, 0.9, 0.99, 1.0})
      CHECK(quantile(x, level) == doctest::Approx(oracle::quantile7(x, level)).epsilon(1e-14));
  }
  CHECK(code_of([] { (void)quantile(std::vector<double>{}, 0.5); }) == ErrorCode::EmptyInput);
  CHECK(code_of([&] { (void)quantile(five, 1.5); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("variant keys")
{
  CHECK(Variant{FormulationKind::Robust, 0.0}.key() == "robust");
  CHECK(Variant{FormulationKind::ImplicitDual, 0.0}.key() == "implicit-dual");
  CHECK(Variant{FormulationKind::ExplicitDual, 100.0}.key() == "explicit-dual/100");
  CHECK(Variant{FormulationKind::ExplicitDual, 0.5}.key() == "explicit-dual/0.5");
  const std::vector<Variant> v = small_spec(1, 1).variants();
  REQUIRE(v.size() == 4);
  CHECK(v[2] == Variant{FormulationKind::ExplicitDual, 10.0});
}

TEST_CASE("initial estimates are drawn from the prior")
{
  const SystemParams p = SystemParams::table_defaults();
  const std::size_t n = 4000;
  std::vector<double> sum(3, 0.0), sq(3, 0.0);
  for (std::size_t run = 0; run < n; ++run)
  {
    const Vector x = sample_initial_estimate(p, 5, run);
    for (std::size_t i = 0; i < 3; ++i)
    {
      sum[i] += x[i] - p.x0_true[i];
      sq[i] += (x[i] - p.x0_true[i]) * (x[i] - p.x0_true[i]);
    }
  }
  for (std::size_t i = 0; i < 3; ++i)
  {
    const double var = p.P0(i, i);
    CHECK(std::abs(sum[i] / n) <= 4.0 * std::sqrt(var / n));
    CHECK(sq[i] / n == doctest::Approx(var).epsilon(0.1));
  }
  CHECK(sample_initial_estimate(p, 5, 3) == sample_initial_estimate(p, 5, 3));
  CHECK(sample_initial_estimate(p, 5, 3) != sample_initial_estimate(p, 6, 3));
}

TEST_CASE("a one-run campaign reproduces the single run")
{
  CampaignSpec spec = small_spec(1, 1);
  const MonteCarloSummary s = run_campaign(spec);
  const Vector x_hat = sample_initial_estimate(spec.params, spec.base_seed, 0);
  RngStream proc = RngStream::for_run(spec.base_seed, 0, NoiseSource::Process);
  RngStream meas = RngStream::for_run(spec.base_seed, 0, NoiseSource::Measurement);
  const RunNoise noise = RunNoise::draw(proc, meas, spec.params);
  ClosedLoopOptions opts;
  opts.multistart = spec.multistart;
  REQUIRE(s.runs.size() == 4);
  for (const RunRecord &r : s.runs)
  {
    SystemParams p = spec.params;
    p.alpha = r.variant.alpha;
    const RunOutcome o = run_closed_loop(p, r.variant.kind, noise, x_hat, opts).outcome();
    CHECK(r.outcome.total_cost == o.total_cost);
    CHECK(r.outcome.violations == o.violations);
    CHECK(r.outcome.failed == o.failed);
    CHECK(r.noise_fingerprint == noise.fingerprint());
  }
  for (const VariantSummary &v : s.variants)
    if (v.n_failed == 0)
      CHECK(v.mean_cost == v.costs.front());
}

TEST_CASE("worker count does not change results")
{
  const MonteCarloSummary one = run_campaign(small_spec(8, 1));
  const MonteCarloSummary eight = run_campaign(small_spec(8, 8));
  CHECK(summary_text(one) == summary_text(eight));
}

TEST_CASE("variants share each run's randomness")
{
  const MonteCarloSummary s = run_campaign(small_spec(4, 2));
  REQUIRE(s.runs.size() == 16);
  std::set<std::uint64_t> distinct;
  for (std::size_t run = 0; run < 4; ++run)
  {
    const RunRecord &first = s.runs[run * 4];
    distinct.insert(first.noise_fingerprint);
    for (std::size_t v = 0; v < 4; ++v)
    {
      const RunRecord &r = s.runs[run * 4 + v];
      CHECK(r.run_index == run);
      CHECK(r.noise_fingerprint == first.noise_fingerprint);
      CHECK(r.initial_fingerprint == first.initial_fingerprint);
    }
  }
  CHECK(distinct.size() == 4);

  for (const VariantSummary &v : s.variants)
  {
    CAPTURE(v.variant.key());
    REQUIRE(v.n_runs == 4);
    REQUIRE(v.costs.size() == 4 - v.n_failed);
    if (v.costs.empty())
      continue;
    double mean = 0.0;
    for (double c : v.costs)
      mean += c;
    mean /= static_cast<double>(v.costs.size());
    CHECK(v.mean_cost == doctest::Approx(mean).epsilon(1e-14));
    CHECK(v.q99 == doctest::Approx(oracle::quantile7(v.costs, 0.99)).epsilon(1e-14));
    CHECK(s.find(v.variant.key()) == &v);
  }
  CHECK(s.find("nope") == nullptr);
}

TEST_CASE("summary json schema")
{
  const MonteCarloSummary s = run_campaign(small_spec(2, 2));
  std::ostringstream os;
  write_summary_json(s, os);
  const auto j = nlohmann::json::parse(os.str());
  for (const VariantSummary &v : s.variants)
  {
    REQUIRE(j.contains(v.variant.key()));
    const auto &e = j[v.variant.key()];
    CHECK(e.contains("mean_cost"));
    CHECK(e.contains("violation_share"));
    CHECK(e["n_runs"].get<std::size_t>() == 2);
  }
  std::ostringstream sweep;
  write_alpha_sweep_json(s, sweep);
  const auto js = nlohmann::json::parse(sweep.str());
  REQUIRE(js["sweep"].size() == 2);
  CHECK(js["sweep"][0]["alpha"].get<double>() == 10.0);
  CHECK(js["sweep"][1].contains("quantile_0.99"));
}

TEST_CASE("kernel density")
{
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd(24.0, 0.5);
  std::vector<double> x(300);
  for (double &v : x)
    v = nd(rng);
  const DensityEstimate est = kernel_density(x, 400);
  REQUIRE(est.grid.size() == 400);

  // Silverman's rule from its definition.
  double mean = 0.0;
  for (double v : x)
    mean += v;
  mean /= 300.0;
  double ss = 0.0;
  for (double v : x)
    ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / 299.0);
  const double iqr = oracle::quantile7(x, 0.75) - oracle::quantile7(x, 0.25);
  const double h = 1.06 * std::min(sd, iqr / 1.34) * std::pow(300.0, -0.2);
  CHECK(est.bandwidth == doctest::Approx(h).epsilon(1e-12));

  double integral = 0.0;
  for (std::size_t g = 1; g < est.grid.size(); ++g)
    integral += 0.5 * (est.density[g] + est.density[g - 1]) * (est.grid[g] - est.grid[g - 1]);
  CHECK(integral == doctest::Approx(1.0).epsilon(3e-3));

  const std::size_t g = 200;
  double direct = 0.0;
  for (double v : x)
    direct += std::exp(-0.5 * std::pow((est.grid[g] - v) / h, 2)) / (h * std::sqrt(2.0 * std::numbers::pi));
  CHECK(est.density[g] == doctest::Approx(direct / 300.0).epsilon(1e-10));
  CHECK(code_of([] { (void)kernel_density(std::vector<double>{}); }) == ErrorCode::EmptyInput);
  CHECK(kernel_density(std::vector<double>{1.0, 1.0}).bandwidth > 0.0);
}

TEST_CASE("scatter subsample")
{
  std::vector<double> x(200);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = static_cast<double>(i);
  const std::vector<double> s = scatter_subsample(x, 0.15);
  CHECK(s.size() == 30);
  for (std::size_t i = 1; i < s.size(); ++i)
    CHECK(s[i] > s[i - 1]);
  CHECK(s.front() == 0.0);
  CHECK(scatter_subsample(std::vector<double>(7, 1.0), 0.15).size() == 2);
  CHECK(scatter_subsample(x, 1.0) == x);
  CHECK(code_of([&] { (void)scatter_subsample(x, 0.0); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("campaign validation")
{
  CampaignSpec spec = small_spec(0, 1);
  CHECK(code_of([&] { (void)run_campaign(spec); }) == ErrorCode::ValidationError);
  spec = small_spec(1, 0);
  CHECK(code_of([&] { (void)run_campaign(spec); }) == ErrorCode::ValidationError);
  spec = small_spec(1, 1);
  spec.alphas = {-1.0};
  CHECK(code_of([&] { (void)run_campaign(spec); }) == ErrorCode::ValidationError);
}
