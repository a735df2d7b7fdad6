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

#include "dualmpc/dualmpc.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "dualmpc/config.hpp"

struct dmpc_config
{
  dualmpc::Config value;
};

struct dmpc_trace
{
  dualmpc::ClosedLoopTrace value;
};

struct dmpc_summary
{
  dualmpc::MonteCarloSummary value;
};

namespace
{
  thread_local std::string g_last_error;

  dmpc_status map_code(dualmpc::ErrorCode code)
  {
    using dualmpc::ErrorCode;
    switch (code)
    {
    case ErrorCode::NotPositiveDefinite:
      return DMPC_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::Asymmetric:
      return DMPC_ERR_ASYMMETRIC;
    case ErrorCode::RankDeficient:
      return DMPC_ERR_RANK_DEFICIENT;
    case ErrorCode::DimensionMismatch:
      return DMPC_ERR_DIMENSION_MISMATCH;
    case ErrorCode::OutOfDomain:
      return DMPC_ERR_OUT_OF_DOMAIN;
    case ErrorCode::NonFinite:
      return DMPC_ERR_NON_FINITE;
    case ErrorCode::EmptyInput:
      return DMPC_ERR_EMPTY_INPUT;
    case ErrorCode::ParseError:
      return DMPC_ERR_PARSE;
    case ErrorCode::ValidationError:
      return DMPC_ERR_VALIDATION;
    case ErrorCode::IoError:
      return DMPC_ERR_IO;
    }
    return DMPC_ERR_INTERNAL;
  }

  dmpc_status set_error(dmpc_status status, std::string message)
  {
    g_last_error = std::move(message);
    return status;
  }

  /// Runs body and converts any exception into a status.
  template <typename F>
  dmpc_status guarded(F &&body) noexcept
  {
    try
    {
      g_last_error.clear();
      return body();
    }
    catch (const dualmpc::Error &e)
    {
      return set_error(map_code(e.code()), e.what());
    }
    catch (const std::bad_alloc &)
    {
      return set_error(DMPC_ERR_INTERNAL, "out of memory");
    }
    catch (const std::exception &e)
    {
      return set_error(DMPC_ERR_INTERNAL, e.what());
    }
    catch (...)
    {
      return set_error(DMPC_ERR_INTERNAL, "unknown exception");
    }
  }

  dmpc_status null_argument(const char *name)
  {
    return set_error(DMPC_ERR_INVALID_ARGUMENT, std::string(name) + " must not be null");
  }

  dmpc_status copy_string(const std::string &s, char *buffer, size_t capacity, size_t *needed)
  {
    if (needed)
      *needed = s.size() + 1;
    if (!buffer)
      return capacity == 0 ? DMPC_OK : null_argument("buffer");
    if (capacity < s.size() + 1)
      return set_error(DMPC_ERR_INVALID_ARGUMENT,
                       "buffer too small: need " + std::to_string(s.size() + 1) + " bytes");
    std::memcpy(buffer, s.c_str(), s.size() + 1);
    return DMPC_OK;
  }

  template <typename Writer>
  dmpc_status write_file(const std::string &path, Writer &&writer)
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
      dualmpc::fail(dualmpc::ErrorCode::IoError, "cannot open '" + path + "' for writing");
    writer(out);
    out.flush();
    if (!out)
      dualmpc::fail(dualmpc::ErrorCode::IoError, "write to '" + path + "' failed");
    return DMPC_OK;
  }

  std::string file_key(const std::string &key)
  {
    std::string out = key;
    for (char &c : out)
      if (c == '/')
        c = '_';
    return out;
  }

  dmpc_kind to_c(dualmpc::FormulationKind kind) { return static_cast<dmpc_kind>(static_cast<int>(kind)); }

} // namespace

extern "C"
{

  const char *dmpc_version(void) { return "1.0.0"; }

  const char *dmpc_status_name(dmpc_status status)
  {
    switch (status)
    {
    case DMPC_OK:
      return "ok";
    case DMPC_ERR_NOT_POSITIVE_DEFINITE:
      return "not positive definite";
    case DMPC_ERR_ASYMMETRIC:
      return "asymmetric";
    case DMPC_ERR_RANK_DEFICIENT:
      return "rank deficient";
    case DMPC_ERR_DIMENSION_MISMATCH:
      return "dimension mismatch";
    case DMPC_ERR_OUT_OF_DOMAIN:
      return "out of domain";
    case DMPC_ERR_NON_FINITE:
      return "non-finite value";
    case DMPC_ERR_EMPTY_INPUT:
      return "empty input";
    case DMPC_ERR_PARSE:
      return "parse error";
    case DMPC_ERR_VALIDATION:
      return "validation error";
    case DMPC_ERR_IO:
      return "i/o error";
    case DMPC_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case DMPC_ERR_INTERNAL:
      return "internal error";
    }
    return "unknown status";
  }

  const char *dmpc_last_error(void) { return g_last_error.c_str(); }

  dmpc_status dmpc_kind_from_string(const char *name, dmpc_kind *out)
  {
    return guarded([&]
                   {
      if (!name)
        return null_argument("name");
      if (!out)
        return null_argument("out");
      const auto kind = dualmpc::parse_kind(name);
      if (!kind)
        return set_error(DMPC_ERR_PARSE, std::string("unknown formulation '") + name +
                                             "' (nominal, robust, implicit-dual, explicit-dual)");
      *out = to_c(*kind);
      return DMPC_OK; });
  }

  dmpc_status dmpc_config_default(dmpc_config **out)
  {
    return guarded([&]
                   {
      if (!out)
        return null_argument("out");
      *out = new dmpc_config{};
      return DMPC_OK; });
  }

  dmpc_status dmpc_config_load(const char *path, dmpc_config **out)
  {
    return guarded([&]
                   {
      if (!path)
        return null_argument("path");
      if (!out)
        return null_argument("out");
      *out = new dmpc_config{dualmpc::parse_config(path)};
      return DMPC_OK; });
  }

  dmpc_status dmpc_config_parse(const char *text, dmpc_config **out)
  {
    return guarded([&]
                   {
      if (!text)
        return null_argument("text");
      if (!out)
        return null_argument("out");
      *out = new dmpc_config{dualmpc::parse_config_text(text)};
      return DMPC_OK; });
  }

  dmpc_status dmpc_config_set(dmpc_config *config, const char *key, const char *value)
  {
    return guarded([&]
                   {
      if (!config)
        return null_argument("config");
      if (!key || !value)
        return null_argument("key/value");
      dualmpc::set_config_value(config->value, key, value);
      return DMPC_OK; });
  }

  dmpc_status dmpc_config_get(const dmpc_config *config, const char *key, char *buffer, size_t capacity,
                              size_t *needed)
  {
    return guarded([&]
                   {
      if (!config)
        return null_argument("config");
      if (!key)
        return null_argument("key");
      std::istringstream lines(dualmpc::write_config(config->value));
      const std::string prefix = std::string(key) + " = ";
      for (std::string line; std::getline(lines, line);)
        if (line.rfind(prefix, 0) == 0)
          return copy_string(line.substr(prefix.size()), buffer, capacity, needed);
      if (std::strcmp(key, "epsilon") == 0)
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "epsilon is stored as gamma; read 'gamma'");
      return set_error(DMPC_ERR_INVALID_ARGUMENT, std::string("unknown key '") + key + "'"); });
  }

  dmpc_status dmpc_config_mode(const dmpc_config *config, dmpc_mode *out)
  {
    return guarded([&]
                   {
      if (!config)
        return null_argument("config");
      if (!out)
        return null_argument("out");
      *out = static_cast<dmpc_mode>(static_cast<int>(config->value.mode));
      return DMPC_OK; });
  }

  dmpc_status dmpc_config_to_string(const dmpc_config *config, char *buffer, size_t capacity, size_t *needed)
  {
    return guarded([&]
                   {
      if (!config)
        return null_argument("config");
      return copy_string(dualmpc::write_config(config->value), buffer, capacity, needed); });
  }

  dmpc_status dmpc_config_write(const dmpc_config *config, const char *path)
  {
    return guarded([&]
                   {
      if (!config)
        return null_argument("config");
      if (!path)
        return null_argument("path");
      return write_file(path, [&](std::ostream &out)
                        { out << dualmpc::write_config(config->value); }); });
  }

  void dmpc_config_free(dmpc_config *config) { delete config; }

  dmpc_status dmpc_run_single(const dmpc_config *config, dmpc_trace **out)
  {
    return guarded([&]
                   {
      if (!config)
        return null_argument("config");
      if (!out)
        return null_argument("out");
      *out = new dmpc_trace{dualmpc::run_single(config->value)};
      return DMPC_OK; });
  }

  dmpc_status dmpc_trace_info_get(const dmpc_trace *trace, dmpc_trace_info *out)
  {
    return guarded([&]
                   {
      if (!trace)
        return null_argument("trace");
      if (!out)
        return null_argument("out");
      const dualmpc::ClosedLoopTrace &t = trace->value;
      *out = dmpc_trace_info{};
      out->n_casts = t.casts.size();
      out->n_x = t.casts.empty() ? 0 : t.casts.front().u.size();
      out->kind = to_c(t.kind);
      out->alpha = t.alpha;
      out->total_cost = t.total_cost();
      out->violations = t.violations();
      out->content_violations = t.content_violations();
      out->failed = t.failed ? 1 : 0;
      out->failure_cast = t.failure_cast;
      return DMPC_OK; });
  }

  dmpc_status dmpc_trace_cast(const dmpc_trace *trace, size_t t, dmpc_cast_info *out)
  {
    return guarded([&]
                   {
      if (!trace)
        return null_argument("trace");
      if (!out)
        return null_argument("out");
      if (t >= trace->value.casts.size())
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "cast index out of range");
      const dualmpc::CastRecord &c = trace->value.casts[t];
      out->t = c.t;
      out->y = c.y;
      out->y_max = trace->value.y_max;
      out->stage_cost = c.stage_cost;
      out->backoff = c.backoff;
      out->solver_status = static_cast<int>(c.solver.status);
      out->iterations = c.solver.iterations;
      return DMPC_OK; });
  }

  dmpc_status dmpc_trace_cast_vector(const dmpc_trace *trace, size_t t, dmpc_field field, double *out,
                                     size_t capacity)
  {
    return guarded([&]
                   {
      if (!trace)
        return null_argument("trace");
      if (!out)
        return null_argument("out");
      if (t >= trace->value.casts.size())
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "cast index out of range");
      const dualmpc::CastRecord &c = trace->value.casts[t];
      dualmpc::Vector v;
      switch (field)
      {
      case DMPC_FIELD_X_TRUE:
        v = c.x_true;
        break;
      case DMPC_FIELD_X_HAT:
        v = c.x_hat;
        break;
      case DMPC_FIELD_P_DIAG:
      {
        const dualmpc::Matrix P = dualmpc::gram(c.P_sqrt);
        for (size_t i = 0; i < P.rows(); ++i)
          v.push_back(P(i, i));
        break;
      }
      case DMPC_FIELD_U:
        v = c.u;
        break;
      default:
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "unknown field");
      }
      if (capacity < v.size())
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "output holds fewer than n_x values");
      std::copy(v.begin(), v.end(), out);
      return DMPC_OK; });
  }

  dmpc_status dmpc_trace_write_csv(const dmpc_trace *trace, const char *path)
  {
    return guarded([&]
                   {
      if (!trace)
        return null_argument("trace");
      if (!path)
        return null_argument("path");
      return write_file(path, [&](std::ostream &out)
                        { dualmpc::write_trace_csv(trace->value, out); }); });
  }

  dmpc_status dmpc_trace_write_figures(const dmpc_trace *trace, const char *prefix)
  {
    return guarded([&]
                   {
      if (!trace)
        return null_argument("trace");
      if (!prefix)
        return null_argument("prefix");
      const std::string p(prefix);
      write_file(p + "states.csv", [&](std::ostream &out)
                 { dualmpc::write_states_figure_csv(trace->value, out); });
      write_file(p + "controls.csv", [&](std::ostream &out)
                 { dualmpc::write_controls_figure_csv(trace->value, out); });
      return write_file(p + "output.csv", [&](std::ostream &out)
                        { dualmpc::write_output_figure_csv(trace->value, out); }); });
  }

  void dmpc_trace_free(dmpc_trace *trace) { delete trace; }

  dmpc_status dmpc_run_campaign(const dmpc_config *config, dmpc_summary **out)
  {
    return guarded([&]
                   {
      if (!config)
        return null_argument("config");
      if (!out)
        return null_argument("out");
      config->value.validate();
      *out = new dmpc_summary{dualmpc::run_campaign(config->value.campaign())};
      return DMPC_OK; });
  }

  dmpc_status dmpc_summary_num_variants(const dmpc_summary *summary, size_t *out)
  {
    return guarded([&]
                   {
      if (!summary)
        return null_argument("summary");
      if (!out)
        return null_argument("out");
      *out = summary->value.variants.size();
      return DMPC_OK; });
  }

  dmpc_status dmpc_summary_variant(const dmpc_summary *summary, size_t index, dmpc_variant_info *out)
  {
    return guarded([&]
                   {
      if (!summary)
        return null_argument("summary");
      if (!out)
        return null_argument("out");
      if (index >= summary->value.variants.size())
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "variant index out of range");
      const dualmpc::VariantSummary &v = summary->value.variants[index];
      *out = dmpc_variant_info{};
      const std::string key = v.variant.key();
      std::strncpy(out->key, key.c_str(), sizeof out->key - 1);
      out->kind = to_c(v.variant.kind);
      out->alpha = v.variant.alpha;
      out->n_runs = v.n_runs;
      out->n_failed = v.n_failed;
      out->mean_cost = v.mean_cost;
      out->q50 = v.q50;
      out->q90 = v.q90;
      out->q99 = v.q99;
      out->violation_share = v.violation_share;
      out->content_violation_share = v.content_violation_share;
      return DMPC_OK; });
  }

  dmpc_status dmpc_summary_costs(const dmpc_summary *summary, size_t index, double *out, size_t capacity,
                                 size_t *count)
  {
    return guarded([&]
                   {
      if (!summary)
        return null_argument("summary");
      if (index >= summary->value.variants.size())
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "variant index out of range");
      const auto &costs = summary->value.variants[index].costs;
      if (count)
        *count = costs.size();
      if (!out)
        return capacity == 0 ? DMPC_OK : null_argument("out");
      if (capacity < costs.size())
        return set_error(DMPC_ERR_INVALID_ARGUMENT, "output holds fewer values than the cost vector");
      std::copy(costs.begin(), costs.end(), out);
      return DMPC_OK; });
  }

  dmpc_status dmpc_summary_write_json(const dmpc_summary *summary, const char *path)
  {
    return guarded([&]
                   {
      if (!summary)
        return null_argument("summary");
      if (!path)
        return null_argument("path");
      return write_file(path, [&](std::ostream &out)
                        { dualmpc::write_summary_json(summary->value, out); }); });
  }

  dmpc_status dmpc_summary_write_alpha_sweep(const dmpc_summary *summary, const char *path)
  {
    return guarded([&]
                   {
      if (!summary)
        return null_argument("summary");
      if (!path)
        return null_argument("path");
      return write_file(path, [&](std::ostream &out)
                        { dualmpc::write_alpha_sweep_json(summary->value, out); }); });
  }

  dmpc_status dmpc_summary_write_runs_csv(const dmpc_summary *summary, const char *path)
  {
    return guarded([&]
                   {
      if (!summary)
        return null_argument("summary");
      if (!path)
        return null_argument("path");
      return write_file(path, [&](std::ostream &out)
                        { dualmpc::write_runs_csv(summary->value, out); }); });
  }

  dmpc_status dmpc_summary_write_densities(const dmpc_summary *summary, const char *prefix)
  {
    return guarded([&]
                   {
      if (!summary)
        return null_argument("summary");
      if (!prefix)
        return null_argument("prefix");
      for (const dualmpc::VariantSummary &v : summary->value.variants)
      {
        const std::string key = file_key(v.variant.key());
        write_file(std::string(prefix) + "density_" + key + ".csv", [&](std::ostream &out)
                   { dualmpc::write_density_csv(v, out); });
        write_file(std::string(prefix) + "scatter_" + key + ".csv", [&](std::ostream &out)
                   { dualmpc::write_scatter_csv(v, out); });
      }
      return DMPC_OK; });
  }

  void dmpc_summary_free(dmpc_summary *summary) { delete summary; }

} // extern "C"
