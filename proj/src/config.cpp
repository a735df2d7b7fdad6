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

#include "dualmpc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dualmpc
{

  std::string_view to_string(RunMode mode) noexcept
  {
    switch (mode)
    {
    case RunMode::Single:
      return "single";
    case RunMode::Campaign:
      return "campaign";
    case RunMode::AlphaSweep:
      return "alpha-sweep";
    }
    return "unknown";
  }

  std::optional<RunMode> parse_mode(std::string_view name) noexcept
  {
    for (RunMode m : {RunMode::Single, RunMode::Campaign, RunMode::AlphaSweep})
      if (to_string(m) == name)
        return m;
    return std::nullopt;
  }

  Vector selected_example_estimate() { return {0.0695, 0.1639, 0.1469}; }

  std::vector<double> default_sweep_alphas() { return {1.0, 10.0, 100.0, 1000.0}; }

  void Config::validate() const
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
    if (x_hat_0)
    {
      if (x_hat_0->size() != params.n_x())
        fail(ErrorCode::ValidationError, "x_hat_0 must have n_x entries");
      for (double v : *x_hat_0)
        if (!std::isfinite(v))
          fail(ErrorCode::ValidationError, "x_hat_0 must be finite");
    }
    if (output_dir.empty())
      fail(ErrorCode::ValidationError, "output_dir must not be empty");
  }

  CampaignSpec Config::campaign() const
  {
    CampaignSpec spec;
    spec.params = params;
    spec.n_runs = n_runs;
    spec.base_seed = seed;
    spec.workers = workers;
    spec.solver = solver;
    spec.multistart = multistart;
    spec.x_hat_0 = x_hat_0;
    if (mode == RunMode::AlphaSweep)
    {
      spec.kinds = {FormulationKind::ExplicitDual};
      spec.alphas = alphas.empty() ? default_sweep_alphas() : alphas;
    }
    else
    {
      spec.kinds = kinds;
      spec.alphas = alphas;
    }
    return spec;
  }

  Vector Config::single_estimate() const
  {
    if (x_hat_0)
      return *x_hat_0;
    if (params.n_x() == 3)
      return selected_example_estimate();
    return sample_initial_estimate(params, seed, 0);
  }

  ClosedLoopTrace run_single(const Config &config)
  {
    config.validate();
    RngStream process = RngStream::for_run(config.seed, 0, NoiseSource::Process);
    RngStream measurement = RngStream::for_run(config.seed, 0, NoiseSource::Measurement);
    const RunNoise noise = RunNoise::draw(process, measurement, config.params);
    ClosedLoopOptions options;
    options.solver = config.solver;
    options.multistart = config.multistart;
    return run_closed_loop(config.params, config.kind, noise, config.single_estimate(), options);
  }

  namespace
  {

    /// A right-hand side: either a bare token or a bracketed list.
    struct Value
    {
      bool is_list = false;
      std::string atom;
      std::vector<Value> items;
    };

    struct Entry
    {
      std::size_t line = 0;
      Value value;
    };

    class Diagnostics
    {
    public:
      Diagnostics(std::string_view source, std::size_t line, std::string key)
          : prefix_(std::string(source) + ":" + std::to_string(line) + ": "), key_(std::move(key)) {}

      [[noreturn]] void parse(const std::string &what) const
      {
        fail(ErrorCode::ParseError, prefix_ + (key_.empty() ? "" : "key '" + key_ + "': ") + what);
      }

    private:
      std::string prefix_;
      std::string key_;
    };

    std::string_view trim(std::string_view s)
    {
      const auto first = s.find_first_not_of(" \t\r");
      if (first == std::string_view::npos)
        return {};
      const auto last = s.find_last_not_of(" \t\r");
      return s.substr(first, last - first + 1);
    }

    class ValueParser
    {
    public:
      ValueParser(std::string_view text, const Diagnostics &diag) : text_(text), diag_(diag) {}

      Value parse()
      {
        Value v = value();
        skip_space();
        if (pos_ != text_.size())
          diag_.parse("unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
        return v;
      }

    private:
      void skip_space()
      {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
          ++pos_;
      }

      Value value()
      {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '[')
          return list();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '[')
          ++pos_;
        Value v;
        v.atom = std::string(trim(text_.substr(start, pos_ - start)));
        if (v.atom.empty())
          diag_.parse("empty value");
        return v;
      }

      Value list()
      {
        ++pos_; // '['
        Value v;
        v.is_list = true;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']')
        {
          ++pos_;
          return v;
        }
        for (;;)
        {
          v.items.push_back(value());
          skip_space();
          if (pos_ >= text_.size())
            diag_.parse("unterminated list");
          if (text_[pos_] == ']')
          {
            ++pos_;
            return v;
          }
          if (text_[pos_] != ',')
            diag_.parse("expected ',' or ']' in list");
          ++pos_;
        }
      }

      std::string_view text_;
      const Diagnostics &diag_;
      std::size_t pos_ = 0;
    };

    double to_real(const Value &v, const Diagnostics &diag)
    {
      if (v.is_list)
        diag.parse("expected a number, got a list");
      double out = 0.0;
      const char *begin = v.atom.data();
      const char *end = begin + v.atom.size();
      const auto [ptr, ec] = std::from_chars(begin, end, out);
      if (ec != std::errc() || ptr != end)
        diag.parse("'" + v.atom + "' is not a number");
      return out;
    }

    std::uint64_t to_unsigned(const Value &v, const Diagnostics &diag)
    {
      if (v.is_list)
        diag.parse("expected an integer, got a list");
      std::uint64_t out = 0;
      const char *begin = v.atom.data();
      const char *end = begin + v.atom.size();
      const auto [ptr, ec] = std::from_chars(begin, end, out);
      if (ec != std::errc() || ptr != end)
        diag.parse("'" + v.atom + "' is not a non-negative integer");
      return out;
    }

    bool to_bool(const Value &v, const Diagnostics &diag)
    {
      if (!v.is_list && v.atom == "true")
        return true;
      if (!v.is_list && v.atom == "false")
        return false;
      diag.parse("expected true or false");
    }

    Vector to_vector(const Value &v, const Diagnostics &diag)
    {
      if (!v.is_list)
        diag.parse("expected a list such as [0.1, 0.2]");
      Vector out;
      for (const Value &item : v.items)
        out.push_back(to_real(item, diag));
      return out;
    }

    /// Scalar broadcast to n entries, or an explicit vector.
    Vector to_broadcast_vector(const Value &v, std::size_t n, const Diagnostics &diag)
    {
      if (!v.is_list)
        return Vector(n, to_real(v, diag));
      return to_vector(v, diag);
    }

    /// [[row], [row], ...]; a flat list is a diagonal; a scalar times identity.
    Matrix to_matrix(const Value &v, std::size_t n, const Diagnostics &diag)
    {
      if (!v.is_list)
      {
        const double s = to_real(v, diag);
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
          m(i, i) = s;
        return m;
      }
      if (v.items.empty())
        diag.parse("matrix must not be empty");
      if (!v.items.front().is_list)
        return Matrix::diagonal(to_vector(v, diag));
      std::vector<Vector> rows;
      for (const Value &row : v.items)
        rows.push_back(to_vector(row, diag));
      try
      {
        return Matrix::from_rows(rows);
      }
      catch (const Error &e)
      {
        diag.parse(e.what());
      }
    }

    FormulationKind to_kind(const Value &v, const Diagnostics &diag)
    {
      if (!v.is_list)
        if (const auto k = parse_kind(v.atom))
          return *k;
      diag.parse("unknown formulation '" + v.atom + "' (nominal, robust, implicit-dual, explicit-dual)");
    }

    using Entries = std::map<std::string, Entry, std::less<>>;

    const std::vector<std::string_view> &known_keys()
    {
      static const std::vector<std::string_view> keys = {
          "n_x", "x0", "P0", "Q", "R", "prices", "y_max", "gamma", "epsilon", "u_min", "u_max", "N", "T",
          "alpha", "mode", "kind", "kinds", "alphas", "seed", "n_runs", "workers", "multistart", "output_dir",
          "x_hat_0", "solver.kkt_tolerance", "solver.feasibility_tolerance", "solver.max_iterations",
          "solver.hessian", "solver.penalty_growth", "solver.finite_difference_step"};
      return keys;
    }

    void add_entry(Entries &entries, std::string_view source, std::size_t line, std::string_view key,
                   std::string_view raw)
    {
      const std::string k(key);
      const Diagnostics diag(source, line, k);
      const auto &keys = known_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        diag.parse("unknown key");
      if (entries.count(k) != 0)
        diag.parse("repeated key (first set on line " + std::to_string(entries.at(k).line) + ")");
      Value value = ValueParser(raw, diag).parse();
      entries.emplace(k, Entry{line, std::move(value)});
    }

    void apply(Config &config, const Entries &entries, std::string_view source)
    {
      auto diag_for = [&](const char *key)
      { return Diagnostics(source, entries.at(key).line, key); };
      auto has = [&](const char *key) { return entries.count(key) != 0; };
      auto value = [&](const char *key) -> const Value & { return entries.at(key).value; };

      SystemParams &p = config.params;
      std::size_t n = p.n_x();
      if (has("x0"))
        p.x0_true = to_vector(value("x0"), diag_for("x0"));
      if (has("n_x"))
      {
        n = static_cast<std::size_t>(to_unsigned(value("n_x"), diag_for("n_x")));
        if (p.x0_true.size() != n)
          fail(ErrorCode::ValidationError, "x0 must have n_x = " + std::to_string(n) + " entries");
      }
      else
        n = p.x0_true.size();

      if (has("P0"))
        p.P0 = to_matrix(value("P0"), n, diag_for("P0"));
      if (has("Q"))
        p.Q = to_matrix(value("Q"), n, diag_for("Q"));
      if (has("R"))
        p.R = to_real(value("R"), diag_for("R"));
      if (has("prices"))
        p.prices = to_broadcast_vector(value("prices"), n, diag_for("prices"));
      if (has("y_max"))
        p.y_max = to_real(value("y_max"), diag_for("y_max"));
      if (has("gamma"))
        p.gamma = to_real(value("gamma"), diag_for("gamma"));
      else if (has("epsilon"))
      {
        const double eps = to_real(value("epsilon"), diag_for("epsilon"));
        if (!(eps > 0.0 && eps < 1.0))
          fail(ErrorCode::ValidationError, "epsilon must lie in (0, 1)");
        p.gamma = inverse_normal_cdf(1.0 - eps);
      }
      if (has("u_min"))
        p.u_min = to_broadcast_vector(value("u_min"), n, diag_for("u_min"));
      if (has("u_max"))
        p.u_max = to_broadcast_vector(value("u_max"), n, diag_for("u_max"));
      if (has("N"))
        p.N = static_cast<std::size_t>(to_unsigned(value("N"), diag_for("N")));
      if (has("T"))
        p.T = static_cast<std::size_t>(to_unsigned(value("T"), diag_for("T")));
      if (has("alpha"))
        p.alpha = to_real(value("alpha"), diag_for("alpha"));

      if (has("mode"))
      {
        const auto m = parse_mode(value("mode").atom);
        if (value("mode").is_list || !m)
          diag_for("mode").parse("expected single, campaign or alpha-sweep");
        config.mode = *m;
      }
      if (has("kind"))
        config.kind = to_kind(value("kind"), diag_for("kind"));
      if (has("kinds"))
      {
        const Value &v = value("kinds");
        const Diagnostics diag = diag_for("kinds");
        std::vector<FormulationKind> kinds;
        if (!v.is_list)
          kinds.push_back(to_kind(v, diag));
        else
          for (const Value &item : v.items)
            kinds.push_back(to_kind(item, diag));
        config.kinds = std::move(kinds);
      }
      if (has("alphas"))
        config.alphas = to_broadcast_vector(value("alphas"), 1, diag_for("alphas"));
      if (has("seed"))
        config.seed = to_unsigned(value("seed"), diag_for("seed"));
      if (has("n_runs"))
        config.n_runs = static_cast<std::size_t>(to_unsigned(value("n_runs"), diag_for("n_runs")));
      if (has("workers"))
        config.workers = static_cast<std::size_t>(to_unsigned(value("workers"), diag_for("workers")));
      if (has("multistart"))
        config.multistart = to_bool(value("multistart"), diag_for("multistart"));
      if (has("output_dir"))
      {
        if (value("output_dir").is_list)
          diag_for("output_dir").parse("expected a path");
        config.output_dir = value("output_dir").atom;
      }
      if (has("x_hat_0"))
      {
        const Value &v = value("x_hat_0");
        if (!v.is_list && v.atom == "none")
          config.x_hat_0.reset();
        else
          config.x_hat_0 = to_vector(v, diag_for("x_hat_0"));
      }

      SolverConfig &s = config.solver;
      if (has("solver.kkt_tolerance"))
        s.kkt_tolerance = to_real(value("solver.kkt_tolerance"), diag_for("solver.kkt_tolerance"));
      if (has("solver.feasibility_tolerance"))
        s.feasibility_tolerance =
            to_real(value("solver.feasibility_tolerance"), diag_for("solver.feasibility_tolerance"));
      if (has("solver.max_iterations"))
        s.max_iterations = static_cast<std::size_t>(
            to_unsigned(value("solver.max_iterations"), diag_for("solver.max_iterations")));
      if (has("solver.hessian"))
      {
        const Value &v = value("solver.hessian");
        if (!v.is_list && v.atom == "bfgs")
          s.hessian = HessianApproximation::DampedBFGS;
        else if (!v.is_list && v.atom == "identity")
          s.hessian = HessianApproximation::GaussNewtonIdentity;
        else
          diag_for("solver.hessian").parse("expected bfgs or identity");
      }
      if (has("solver.penalty_growth"))
        s.penalty_growth = to_real(value("solver.penalty_growth"), diag_for("solver.penalty_growth"));
      if (has("solver.finite_difference_step"))
        s.finite_difference_step =
            to_real(value("solver.finite_difference_step"), diag_for("solver.finite_difference_step"));

      config.validate();
    }

    std::string number(double x)
    {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      return buf;
    }

    std::string list(std::span<const double> v)
    {
      std::string out = "[";
      for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + number(v[i]);
      return out + "]";
    }

    std::string matrix(const Matrix &m)
    {
      std::string out = "[";
      for (std::size_t i = 0; i < m.rows(); ++i)
      {
        Vector row(m.cols());
        for (std::size_t j = 0; j < m.cols(); ++j)
          row[j] = m(i, j);
        out += (i ? ", " : "") + list(row);
      }
      return out + "]";
    }

  } // namespace

  Config parse_config_text(std::string_view text, std::string_view source)
  {
    Entries entries;
    std::size_t line_no = 0;
    while (!text.empty())
    {
      ++line_no;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty())
        continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        Diagnostics(source, line_no, "").parse("expected 'key = value'");
      const std::string_view key = trim(line.substr(0, eq));
      if (key.empty())
        Diagnostics(source, line_no, "").parse("missing key before '='");
      add_entry(entries, source, line_no, key, trim(line.substr(eq + 1)));
    }
    Config config;
    apply(config, entries, source);
    return config;
  }

  Config parse_config(const std::string &path)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      fail(ErrorCode::IoError, "cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
  }

  void set_config_value(Config &config, std::string_view key, std::string_view value)
  {
    Entries entries;
    add_entry(entries, "<set>", 1, trim(key), trim(value));
    Config next = config;
    apply(next, entries, "<set>");
    config = std::move(next);
  }

  std::string write_config(const Config &config)
  {
    const SystemParams &p = config.params;
    std::ostringstream out;
    out << "# dualmpc configuration\n";
    out << "n_x = " << p.n_x() << "\n";
    out << "x0 = " << list(p.x0_true) << "\n";
    out << "P0 = " << matrix(p.P0) << "\n";
    out << "Q = " << matrix(p.Q) << "\n";
    out << "R = " << number(p.R) << "\n";
    out << "prices = " << list(p.prices) << "\n";
    out << "y_max = " << number(p.y_max) << "\n";
    out << "gamma = " << number(p.gamma) << "\n";
    out << "u_min = " << list(p.u_min) << "\n";
    out << "u_max = " << list(p.u_max) << "\n";
    out << "N = " << p.N << "\n";
    out << "T = " << p.T << "\n";
    out << "alpha = " << number(p.alpha) << "\n";
    out << "\nmode = " << to_string(config.mode) << "\n";
    out << "kind = " << to_string(config.kind) << "\n";
    out << "kinds = [";
    for (std::size_t i = 0; i < config.kinds.size(); ++i)
      out << (i ? ", " : "") << to_string(config.kinds[i]);
    out << "]\n";
    out << "alphas = " << list(config.alphas) << "\n";
    out << "seed = " << config.seed << "\n";
    out << "n_runs = " << config.n_runs << "\n";
    out << "workers = " << config.workers << "\n";
    out << "multistart = " << (config.multistart ? "true" : "false") << "\n";
    out << "output_dir = " << config.output_dir << "\n";
    out << "x_hat_0 = " << (config.x_hat_0 ? list(*config.x_hat_0) : std::string("none")) << "\n";
    const SolverConfig &s = config.solver;
    out << "\nsolver.kkt_tolerance = " << number(s.kkt_tolerance) << "\n";
    out << "solver.feasibility_tolerance = " << number(s.feasibility_tolerance) << "\n";
    out << "solver.max_iterations = " << s.max_iterations << "\n";
    out << "solver.hessian = " << (s.hessian == HessianApproximation::DampedBFGS ? "bfgs" : "identity") << "\n";
    out << "solver.penalty_growth = " << number(s.penalty_growth) << "\n";
    out << "solver.finite_difference_step = " << number(s.finite_difference_step) << "\n";
    return out.str();
  }

} // namespace dualmpc
