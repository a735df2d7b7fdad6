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

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualmpc/dualmpc.h"

namespace
{
  constexpr int kExitOk = 0;
  constexpr int kExitInvalid = 1;
  constexpr int kExitRuntime = 2;

  /// Thrown after a failed library call; carries the exit code.
  struct CliFailure
  {
    int exit_code;
  };

  void check(dmpc_status status, const std::string &context)
  {
    if (status == DMPC_OK)
      return;
    std::cerr << "dualmpc: " << context << ": " << dmpc_last_error() << " [" << dmpc_status_name(status) << "]\n";
    const bool invalid =
        status == DMPC_ERR_VALIDATION || status == DMPC_ERR_PARSE || status == DMPC_ERR_INVALID_ARGUMENT;
    throw CliFailure{invalid ? kExitInvalid : kExitRuntime};
  }

  std::string format_list(const std::vector<double> &values)
  {
    std::string out = "[";
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i)
    {
      std::snprintf(buf, sizeof buf, "%.17g", values[i]);
      out += (i ? ", " : "") + std::string(buf);
    }
    return out + "]";
  }

  std::string format_words(const std::vector<std::string> &words)
  {
    std::string out = "[";
    for (std::size_t i = 0; i < words.size(); ++i)
      out += (i ? ", " : "") + words[i];
    return out + "]";
  }

  std::string get(const dmpc_config *config, const char *key)
  {
    std::size_t needed = 0;
    check(dmpc_config_get(config, key, nullptr, 0, &needed), std::string("reading ") + key);
    std::string out(needed, '\0');
    check(dmpc_config_get(config, key, out.data(), out.size(), &needed), std::string("reading ") + key);
    out.resize(needed - 1);
    return out;
  }

  /// Owns the library handles for one invocation.
  struct Handles
  {
    dmpc_config *config = nullptr;
    dmpc_trace *trace = nullptr;
    dmpc_summary *summary = nullptr;
    ~Handles()
    {
      dmpc_summary_free(summary);
      dmpc_trace_free(trace);
      dmpc_config_free(config);
    }
  };

  struct Options
  {
    std::string config_path;
    std::vector<std::string> assignments;
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string kind = "explicit-dual";
    std::vector<double> x_hat;
    std::optional<std::size_t> runs;
    std::vector<std::string> kinds;
    std::vector<double> alphas;
    bool no_multistart = false;
  };

  void set(dmpc_config *config, const std::string &key, const std::string &value)
  {
    check(dmpc_config_set(config, key.c_str(), value.c_str()), "setting " + key + " = " + value);
  }

  std::string prepare_output_dir(dmpc_config *config, const Options &opt)
  {
    if (opt.output_dir)
      set(config, "output_dir", *opt.output_dir);
    else if (const char *env = std::getenv("DUALMPC_OUTPUT_DIR"); env && *env)
      set(config, "output_dir", env);
    const std::string dir = get(config, "output_dir");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
      std::cerr << "dualmpc: cannot create output directory '" << dir << "': " << ec.message() << "\n";
      throw CliFailure{kExitRuntime};
    }
    return dir;
  }

  std::string join(const std::string &dir, const std::string &name)
  {
    return (std::filesystem::path(dir) / name).string();
  }

  void print_variants(const dmpc_summary *summary)
  {
    std::size_t n = 0;
    check(dmpc_summary_num_variants(summary, &n), "reading summary");
    for (std::size_t i = 0; i < n; ++i)
    {
      dmpc_variant_info v;
      check(dmpc_summary_variant(summary, i, &v), "reading summary");
      std::printf("%-22s mean %.4f  q0.99 %.4f  violations %.2f%% (content %.2f%%)  failed %zu/%zu\n", v.key,
                  v.mean_cost, v.q99, 100.0 * v.violation_share, 100.0 * v.content_violation_share, v.n_failed,
                  v.n_runs);
    }
  }

  int run(const std::string &command, const Options &opt)
  {
    Handles h;
    if (opt.config_path.empty())
      check(dmpc_config_default(&h.config), "creating default config");
    else
      check(dmpc_config_load(opt.config_path.c_str(), &h.config), "loading config");

    for (const std::string &a : opt.assignments)
    {
      const auto eq = a.find('=');
      if (eq == std::string::npos)
      {
        std::cerr << "dualmpc: --set expects key=value, got '" << a << "'\n";
        return kExitInvalid;
      }
      set(h.config, a.substr(0, eq), a.substr(eq + 1));
    }
    if (opt.seed)
      set(h.config, "seed", std::to_string(*opt.seed));
    if (opt.workers)
      set(h.config, "workers", std::to_string(*opt.workers));
    if (opt.no_multistart)
      set(h.config, "multistart", "false");

    if (command == "single")
    {
      set(h.config, "mode", "single");
      set(h.config, "kind", opt.kind);
      if (!opt.x_hat.empty())
        set(h.config, "x_hat_0", format_list(opt.x_hat));
      const std::string dir = prepare_output_dir(h.config, opt);
      check(dmpc_run_single(h.config, &h.trace), "single run");

      dmpc_trace_info info;
      check(dmpc_trace_info_get(h.trace, &info), "reading trace");
      const std::string kind = get(h.config, "kind");
      const std::string trace_path = join(dir, "trace_" + kind + ".csv");
      check(dmpc_trace_write_csv(h.trace, trace_path.c_str()), "writing trace");
      const std::string prefix = join(dir, kind + "_");
      check(dmpc_trace_write_figures(h.trace, prefix.c_str()), "writing figure data");
      std::printf("%s: %zu casts, total cost %.6f, violations %zu (content %zu)%s\n", kind.c_str(), info.n_casts,
                  info.total_cost, info.violations, info.content_violations, info.failed ? ", FAILED" : "");
      std::printf("wrote %s\n", trace_path.c_str());
      if (info.failed)
      {
        std::cerr << "dualmpc: run failed at cast " << info.failure_cast << "\n";
        return kExitRuntime;
      }
      return kExitOk;
    }

    if (opt.runs)
      set(h.config, "n_runs", std::to_string(*opt.runs));
    if (!opt.alphas.empty())
      set(h.config, "alphas", format_list(opt.alphas));

    if (command == "campaign")
    {
      set(h.config, "mode", "campaign");
      if (!opt.kinds.empty())
        set(h.config, "kinds", format_words(opt.kinds));
    }
    else
      set(h.config, "mode", "alpha-sweep");

    const std::string dir = prepare_output_dir(h.config, opt);
    check(dmpc_run_campaign(h.config, &h.summary), "campaign");
    const std::string summary_path = join(dir, "summary.json");
    check(dmpc_summary_write_json(h.summary, summary_path.c_str()), "writing summary");
    const std::string runs_path = join(dir, "runs.csv");
    check(dmpc_summary_write_runs_csv(h.summary, runs_path.c_str()), "writing runs");
    if (command == "campaign")
    {
      const std::string prefix = join(dir, "");
      check(dmpc_summary_write_densities(h.summary, prefix.c_str()), "writing densities");
    }
    else
    {
      const std::string sweep_path = join(dir, "alpha_sweep.json");
      check(dmpc_summary_write_alpha_sweep(h.summary, sweep_path.c_str()), "writing sweep");
    }
    print_variants(h.summary);
    std::printf("wrote %s\n", summary_path.c_str());
    return kExitOk;
  }

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Dual, robust and nominal MPC simulations of scrap-based steel recycling"};
  app.set_version_flag("--version", std::string(dmpc_version()));
  app.require_subcommand(1);

  Options opt;
  app.add_option("-c,--config", opt.config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", opt.assignments, "Override a config key (key=value, repeatable)");
  app.add_option("-o,--output-dir", opt.output_dir, "Output directory (default: $DUALMPC_OUTPUT_DIR or config)");
  app.add_option("--seed", opt.seed, "Base seed");
  app.add_option("--workers", opt.workers, "Worker threads for campaigns");
  app.add_flag("--no-multistart", opt.no_multistart, "Single start for dual formulations");

  CLI::App *single = app.add_subcommand("single", "One closed-loop run with trace and figure data");
  single->add_option("--kind", opt.kind, "nominal, robust, implicit-dual or explicit-dual");
  single->add_option("--x-hat", opt.x_hat, "Initial estimate, comma separated")->delimiter(',');

  CLI::App *campaign = app.add_subcommand("campaign", "Monte Carlo comparison of formulations");
  campaign->add_option("--runs", opt.runs, "Number of runs");
  campaign->add_option("--kinds", opt.kinds, "Formulations, comma separated")->delimiter(',');
  campaign->add_option("--alphas", opt.alphas, "Explicit-dual weights, comma separated")->delimiter(',');

  CLI::App *sweep = app.add_subcommand("sweep-alpha", "Explicit-dual weight sweep");
  sweep->add_option("--runs", opt.runs, "Number of runs");
  sweep->add_option("--alphas", opt.alphas, "Weights, comma separated (default 1,10,100,1000)")->delimiter(',');

  for (CLI::App *sub : {single, campaign, sweep})
  {
    sub->fallthrough();
  }

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try
  {
    return run(app.get_subcommands().front()->get_name(), opt);
  }
  catch (const CliFailure &f)
  {
    return f.exit_code;
  }
  catch (const std::exception &e)
  {
    std::cerr << "dualmpc: " << e.what() << "\n";
    return kExitRuntime;
  }
}
