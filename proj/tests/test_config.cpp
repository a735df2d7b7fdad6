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
#include <cstdio>
#include <fstream>

#include "dualmpc/config.hpp"
#include "support.hpp"

using namespace dualmpc;

namespace
{
  Error error_of(std::string_view text)
  {
    try
    {
      (void)parse_config_text(text, "cfg");
    }
    catch (const Error &e)
    {
      return e;
    }
    FAIL("no error raised");
    return Error(ErrorCode::IoError, "");
  }
} // namespace

TEST_CASE("empty text gives the defaults")
{
  CHECK(parse_config_text("") == Config{});
  CHECK(parse_config_text("# only a comment\n\n   \n") == Config{});
  const Config c;
  CHECK(c.params == SystemParams::table_defaults());
  CHECK(c.mode == RunMode::Campaign);
  CHECK(c.n_runs == 1000);
}

TEST_CASE("epsilon maps to the normal quantile")
{
  const Config c = parse_config_text("epsilon = 0.0255\n");
  const double want = oracle::inverse_phi_bisect(1.0 - 0.0255);
  CHECK(std::abs(c.params.gamma - want) <= 1e-9);
  CHECK(std::abs(c.params.gamma - 1.95148) <= 1e-5);
  CHECK(parse_config_text("epsilon = 0.0255\ngamma = 2.5\n").params.gamma == 2.5);
  CHECK(parse_config_text("gamma = 2.5\nepsilon = 0.0255\n").params.gamma == 2.5);
  CHECK(error_of("epsilon = 1.5").code() == ErrorCode::ValidationError);
}

TEST_CASE("values and shapes")
{
  const Config c = parse_config_text(R"(
n_x = 3
x0 = [0.05, 0.1, 0.2]   # trailing comment
P0 = [1e-4, 2e-4, 3e-4]
Q = 1e-8
prices = [3, 2, 1]
u_max = 0.9
N = 4
T = 7
alpha = 5
mode = alpha-sweep
kind = robust
kinds = [nominal, implicit-dual]
alphas = [1, 2]
seed = 42
n_runs = 12
workers = 3
multistart = false
output_dir = out/dir
x_hat_0 = [0.06, 0.11, 0.19]
solver.max_iterations = 50
solver.hessian = identity
)");
  CHECK(c.params.x0_true == Vector{0.05, 0.1, 0.2});
  CHECK(c.params.P0(1, 1) == 2e-4);
  CHECK(c.params.P0(0, 1) == 0.0);
  CHECK(c.params.Q(2, 2) == 1e-8);
  CHECK(c.params.Q(0, 2) == 0.0);
  CHECK(c.params.u_max == Vector(3, 0.9));
  CHECK(c.params.N == 4);
  CHECK(c.params.T == 7);
  CHECK(c.mode == RunMode::AlphaSweep);
  CHECK(c.kind == FormulationKind::Robust);
  CHECK(c.kinds == std::vector<FormulationKind>{FormulationKind::Nominal, FormulationKind::ImplicitDual});
  CHECK(c.alphas == std::vector<double>{1.0, 2.0});
  CHECK(c.seed == 42);
  CHECK(c.workers == 3);
  CHECK_FALSE(c.multistart);
  CHECK(c.output_dir == "out/dir");
  CHECK(c.x_hat_0 == Vector{0.06, 0.11, 0.19});
  CHECK(c.solver.max_iterations == 50);
  CHECK(c.solver.hessian == HessianApproximation::GaussNewtonIdentity);

  const CampaignSpec spec = c.campaign();
  CHECK(spec.kinds == std::vector<FormulationKind>{FormulationKind::ExplicitDual});
  CHECK(spec.alphas == std::vector<double>{1.0, 2.0});
  CHECK(spec.n_runs == 12);

  const Config m = parse_config_text("P0 = [[2e-4, 1e-5, 0], [1e-5, 1e-3, 0], [0, 0, 1e-3]]\n");
  CHECK(m.params.P0(0, 1) == 1e-5);
  CHECK(m.params.P0(1, 0) == 1e-5);
}

TEST_CASE("round trip")
{
  Config c;
  c.params.gamma = 1.0 / 3.0;
  c.params.alpha = 0.1;
  c.mode = RunMode::Single;
  c.kinds = {FormulationKind::Robust};
  c.alphas = {10.0, 1000.0};
  c.x_hat_0 = Vector{0.0695, 0.1639, 0.1469};
  c.solver.penalty_growth = 7.5;
  const Config back = parse_config_text(write_config(c));
  CHECK(back == c);
  CHECK(parse_config_text(write_config(Config{})) == Config{});

  const std::string path = "test_config_roundtrip.cfg";
  {
    std::ofstream out(path);
    out << write_config(c);
  }
  CHECK(parse_config(path) == c);
  std::remove(path.c_str());
  try
  {
    (void)parse_config("/nonexistent/dir/x.cfg");
    FAIL("expected IoError");
  }
  catch (const Error &e)
  {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("diagnostics name the line")
{
  const Error unknown = error_of("seed = 3\nbogus = 1\n");
  CHECK(unknown.code() == ErrorCode::ParseError);
  CHECK(std::string(unknown.what()).find("cfg:2") != std::string::npos);
  CHECK(std::string(unknown.what()).find("bogus") != std::string::npos);

  CHECK(error_of("seed = 1\nseed = 2\n").code() == ErrorCode::ParseError);
  CHECK(error_of("seed\n").code() == ErrorCode::ParseError);
  CHECK(error_of("x0 = [0.1, 0.2\n").code() == ErrorCode::ParseError);
  CHECK(error_of("n_runs = many\n").code() == ErrorCode::ParseError);
  CHECK(error_of("kind = fancy\n").code() == ErrorCode::ParseError);
  CHECK(error_of("multistart = yes\n").code() == ErrorCode::ParseError);
}

TEST_CASE("semantic validation")
{
  const Error box = error_of("u_min = 0.6\n");
  CHECK(box.code() == ErrorCode::ValidationError);
  CHECK(error_of("n_runs = 0\n").code() == ErrorCode::ValidationError);
  CHECK(error_of("workers = 0\n").code() == ErrorCode::ValidationError);
  CHECK(error_of("n_x = 4\n").code() == ErrorCode::ValidationError);
  CHECK(error_of("R = -1\n").code() == ErrorCode::ValidationError);
}

TEST_CASE("single overrides")
{
  Config c;
  set_config_value(c, "seed", "9");
  CHECK(c.seed == 9);
  set_config_value(c, "prices", "[1, 1, 1]");
  CHECK(c.params.prices == Vector(3, 1.0));
  const Config before = c;
  CHECK_THROWS_AS(set_config_value(c, "u_min", "0.6"), Error);
  CHECK(c == before);
  CHECK_THROWS_AS(set_config_value(c, "nope", "1"), Error);
}

TEST_CASE("single-mode estimate")
{
  Config c;
  CHECK(c.single_estimate() == selected_example_estimate());
  c.x_hat_0 = Vector{0.1, 0.1, 0.1};
  CHECK(c.single_estimate() == Vector{0.1, 0.1, 0.1});
  CHECK(parse_mode("alpha-sweep") == RunMode::AlphaSweep);
  CHECK_FALSE(parse_mode("sweep").has_value());
  CHECK(to_string(RunMode::Single) == "single");
}
