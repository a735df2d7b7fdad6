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

#include "dualmpc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include <json.hpp>

namespace dualmpc
{

  std::string Variant::key() const
  {
    std::string out(to_string(kind));
    if (kind == FormulationKind::ExplicitDual)
    {
      char buf[32];
      std::snprintf(buf, sizeof buf, "/%g", alpha);
      out += buf;
    }
    return out;
  }

  void CampaignSpec::validate() const
  {
    params.validate();
    solver.validate();
    if (n_runs < 1)
      fail(ErrorCode::ValidationError, "n_runs must be >= 1");
    if (workers < 1)
      fail(ErrorCode::ValidationError, "workers must be >= 1");
    if (kinds.empty())
      fail(ErrorCode::ValidationError, "kinds must not be empty");
    for (double a : alphas)
      if (!(a >= 0.0) || !std::isfinite(a))
        fail(ErrorCode::ValidationError, "alphas must be finite and >= 0");
    if (x_hat_0 && x_hat_0->size() != params.n_x())
      fail(ErrorCode::ValidationError, "x_hat_0 length must equal n_x");
  }

  std::vector<Variant> CampaignSpec::variants() const
  {
    std::vector<Variant> out;
    for (FormulationKind kind : kinds)
    {
      if (kind != FormulationKind::ExplicitDual)
      {
        out.push_back({kind, 0.0});
        continue;
      }
      if (alphas.empty())
        out.push_back({kind, params.alpha});
      for (double a : alphas)
        out.push_back({kind, a});
    }
    return out;
  }

  const VariantSummary *MonteCarloSummary::find(const std::string &key) const
  {
    for (const VariantSummary &v : variants)
      if (v.variant.key() == key)
        return &v;
    return nullptr;
  }

  Vector sample_initial_estimate(const SystemParams &params, std::uint64_t seed, std::uint64_t run)
  {
    RngStream stream = RngStream::for_run(seed, run, NoiseSource::InitialEstimate);
    return sample_gaussian(stream, GaussianSpec(params.x0_true, cholesky_upper(params.P0)));
  }

  namespace
  {
    std::uint64_t fingerprint(std::span<const double> v)
    {
      std::uint64_t h = 0x13198a2e03707344ULL;
      for (double x : v)
        h = splitmix64(h ^ std::bit_cast<std::uint64_t>(x));
      return h;
    }

    void execute_run(const CampaignSpec &spec, const std::vector<Variant> &variants, std::size_t run,
                     std::span<RunRecord> out)
    {
      const Vector x_hat_0 = spec.x_hat_0 ? *spec.x_hat_0 : sample_initial_estimate(spec.params, spec.base_seed, run);
      RngStream process = RngStream::for_run(spec.base_seed, run, NoiseSource::Process);
      RngStream measurement = RngStream::for_run(spec.base_seed, run, NoiseSource::Measurement);
      const RunNoise noise = RunNoise::draw(process, measurement, spec.params);

      ClosedLoopOptions options;
      options.solver = spec.solver;
      options.multistart = spec.multistart;
      for (std::size_t v = 0; v < variants.size(); ++v)
      {
        SystemParams params = spec.params;
        params.alpha = variants[v].alpha;
        const ClosedLoopTrace trace = run_closed_loop(params, variants[v].kind, noise, x_hat_0, options);
        RunRecord &rec = out[v];
        rec.run_index = run;
        rec.variant = variants[v];
        rec.outcome = trace.outcome();
        rec.noise_fingerprint = trace.noise_fingerprint;
        rec.initial_fingerprint = fingerprint(x_hat_0);
        rec.final_trace = trace.casts.empty() ? 0.0 : frobenius_squared(trace.casts.back().P_sqrt);
      }
    }

    VariantSummary summarize(const Variant &variant, std::span<const RunRecord> records, std::size_t stride,
                             std::size_t offset, std::size_t T)
    {
      VariantSummary s;
      s.variant = variant;
      std::vector<RunOutcome> ok;
      double trace_sum = 0.0;
      for (std::size_t i = offset; i < records.size(); i += stride)
      {
        const RunRecord &r = records[i];
        ++s.n_runs;
        if (r.outcome.failed)
        {
          ++s.n_failed;
          continue;
        }
        ok.push_back(r.outcome);
        s.costs.push_back(r.outcome.total_cost);
        trace_sum += r.final_trace;
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      if (ok.empty())
      {
        s.mean_cost = s.q50 = s.q90 = s.q99 = nan;
        s.violation_share = s.content_violation_share = s.mean_final_trace = nan;
        return s;
      }
      double sum = 0.0;
      for (double c : s.costs)
        sum += c;
      const double n = static_cast<double>(s.costs.size());
      s.mean_cost = sum / n;
      s.q50 = quantile(s.costs, 0.5);
      s.q90 = quantile(s.costs, 0.9);
      s.q99 = quantile(s.costs, 0.99);
      s.violation_share = violation_share(ok, T);
      s.content_violation_share = content_violation_share(ok, T);
      s.mean_final_trace = trace_sum / n;
      return s;
    }
  } // namespace

  MonteCarloSummary run_campaign(const CampaignSpec &spec)
  {
    spec.validate();
    const std::vector<Variant> variants = spec.variants();
    const std::size_t nv = variants.size();
    std::vector<RunRecord> records(spec.n_runs * nv);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]
    {
      for (;;)
      {
        const std::size_t run = next.fetch_add(1);
        if (run >= spec.n_runs)
          return;
        try
        {
          execute_run(spec, variants, run, std::span<RunRecord>(records).subspan(run * nv, nv));
        }
        catch (...)
        {
          std::lock_guard lock(error_mutex);
          if (!error)
            error = std::current_exception();
          next.store(spec.n_runs);
          return;
        }
      }
    };

    const std::size_t workers = std::clamp<std::size_t>(spec.workers, 1, spec.n_runs);
    if (workers == 1)
      worker();
    else
    {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back(worker);
      for (std::thread &t : pool)
        t.join();
    }
    if (error)
      std::rethrow_exception(error);

    MonteCarloSummary summary;
    summary.T = spec.params.T;
    summary.base_seed = spec.base_seed;
    summary.multistart = spec.multistart;
    for (std::size_t v = 0; v < nv; ++v)
      summary.variants.push_back(summarize(variants[v], records, nv, v, spec.params.T));
    summary.runs = std::move(records);
    return summary;
  }

  double quantile(std::span<const double> values, double level)
  {
    if (values.empty())
      fail(ErrorCode::EmptyInput, "quantile of an empty sample");
    if (!(level >= 0.0 && level <= 1.0))
      fail(ErrorCode::OutOfDomain, "quantile level must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * level;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size())
      return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
  }

  double silverman_bandwidth(std::span<const double> values)
  {
    if (values.empty())
      fail(ErrorCode::EmptyInput, "bandwidth of an empty sample");
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double x : values)
      mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : values)
      ss += (x - mean) * (x - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    double spread = sd;
    if (iqr > 0.0)
      spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0))
      spread = std::max(1e-3 * std::abs(mean), 1e-6);
    return 1.06 * spread * std::pow(n, -0.2);
  }

  DensityEstimate kernel_density(std::span<const double> values, std::size_t grid_points)
  {
    if (values.empty())
      fail(ErrorCode::EmptyInput, "density of an empty sample");
    if (grid_points < 2)
      fail(ErrorCode::OutOfDomain, "density grid needs at least two points");
    DensityEstimate est;
    est.bandwidth = silverman_bandwidth(values);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it - 3.0 * est.bandwidth;
    const double hi = *hi_it + 3.0 * est.bandwidth;
    const double norm = 1.0 / (static_cast<double>(values.size()) * est.bandwidth * std::sqrt(2.0 * std::numbers::pi));
    est.grid.resize(grid_points);
    est.density.resize(grid_points);
    for (std::size_t g = 0; g < grid_points; ++g)
    {
      const double x = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_points - 1);
      double acc = 0.0;
      for (double v : values)
      {
        const double z = (x - v) / est.bandwidth;
        acc += std::exp(-0.5 * z * z);
      }
      est.grid[g] = x;
      est.density[g] = acc * norm;
    }
    return est;
  }

  std::vector<double> scatter_subsample(std::span<const double> values, double fraction)
  {
    if (!(fraction > 0.0 && fraction <= 1.0))
      fail(ErrorCode::OutOfDomain, "subsample fraction must lie in (0, 1]");
    const std::size_t n = values.size();
    const std::size_t m = std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
    std::vector<double> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
      out.push_back(values[i * n / m]);
    return out;
  }

  namespace
  {
    nlohmann::ordered_json number(double x)
    {
      if (!std::isfinite(x))
        return nullptr;
      return x;
    }
  } // namespace

  void write_summary_json(const MonteCarloSummary &summary, std::ostream &out)
  {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    for (const VariantSummary &v : summary.variants)
    {
      nlohmann::ordered_json entry;
      entry["kind"] = std::string(to_string(v.variant.kind));
      entry["alpha"] = v.variant.alpha;
      entry["n_runs"] = v.n_runs;
      entry["mean_cost"] = number(v.mean_cost);
      entry["quantiles"] = {{"0.5", number(v.q50)}, {"0.9", number(v.q90)}, {"0.99", number(v.q99)}};
      entry["violation_share"] = number(v.violation_share);
      entry["content_violation_share"] = number(v.content_violation_share);
      entry["mean_final_trace"] = number(v.mean_final_trace);
      entry["n_failed"] = v.n_failed;
      entry["multistart"] = summary.multistart && is_dual(v.variant.kind);
      root[v.variant.key()] = std::move(entry);
    }
    out << root.dump(2) << '\n';
  }

  void write_alpha_sweep_json(const MonteCarloSummary &summary, std::ostream &out)
  {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const VariantSummary &v : summary.variants)
    {
      if (v.variant.kind != FormulationKind::ExplicitDual)
        continue;
      nlohmann::ordered_json row;
      row["alpha"] = v.variant.alpha;
      row["mean_cost"] = number(v.mean_cost);
      row["quantile_0.99"] = number(v.q99);
      row["violation_share"] = number(v.violation_share);
      row["content_violation_share"] = number(v.content_violation_share);
      row["n_runs"] = v.n_runs;
      row["n_failed"] = v.n_failed;
      rows.push_back(std::move(row));
    }
    nlohmann::ordered_json root;
    root["base_seed"] = summary.base_seed;
    root["multistart"] = summary.multistart;
    root["sweep"] = std::move(rows);
    out << root.dump(2) << '\n';
  }

  void write_runs_csv(const MonteCarloSummary &summary, std::ostream &out)
  {
    out << "run_index,kind,alpha,total_cost,violations,content_violations,failed\n";
    char buf[64];
    for (const RunRecord &r : summary.runs)
    {
      out << r.run_index << ',' << to_string(r.variant.kind) << ',';
      std::snprintf(buf, sizeof buf, "%.17g", r.variant.alpha);
      out << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", r.outcome.total_cost);
      out << buf << ',' << r.outcome.violations << ',' << r.outcome.content_violations << ','
          << (r.outcome.failed ? 1 : 0) << '\n';
    }
  }

  void write_density_csv(const VariantSummary &variant, std::ostream &out)
  {
    out << "grid,density\n";
    if (variant.costs.empty())
      return;
    const DensityEstimate est = kernel_density(variant.costs);
    char buf[96];
    for (std::size_t i = 0; i < est.grid.size(); ++i)
    {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", est.grid[i], est.density[i]);
      out << buf;
    }
  }

  void write_scatter_csv(const VariantSummary &variant, std::ostream &out)
  {
    out << "index,cost\n";
    const std::size_t n = variant.costs.size();
    const std::vector<double> sub = scatter_subsample(variant.costs);
    char buf[64];
    for (std::size_t i = 0; i < sub.size(); ++i)
    {
      std::snprintf(buf, sizeof buf, "%.17g", sub[i]);
      out << i * n / sub.size() << ',' << buf << '\n';
    }
  }

} // namespace dualmpc
