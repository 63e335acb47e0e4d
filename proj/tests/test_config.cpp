#include <doctest.h>

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cavitylink/config.hpp"

using namespace cavitylink;

namespace {

ConfigError capture(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e;
  }
  FAIL("expected ConfigError");
  return ConfigError("", 0, "");
}

}  // namespace

TEST_CASE("complex literals") {
  CHECK(parse_complex("3") == complexd(3, 0));
  CHECK(parse_complex("-2.5e-3") == complexd(-2.5e-3, 0));
  CHECK(parse_complex("i") == complexd(0, 1));
  CHECK(parse_complex("-i") == complexd(0, -1));
  CHECK(parse_complex("+i") == complexd(0, 1));
  CHECK(parse_complex("2i") == complexd(0, 2));
  CHECK(parse_complex("-0.5i") == complexd(0, -0.5));
  CHECK(parse_complex("1+2i") == complexd(1, 2));
  CHECK(parse_complex("1.5-0.5i") == complexd(1.5, -0.5));
  CHECK(parse_complex("1-i") == complexd(1, -1));
  CHECK(parse_complex("-1e-2+3.25e+1i") == complexd(-1e-2, 32.5));
  CHECK(parse_complex(" 1 + 2i ") == complexd(1, 2));
  CHECK(parse_complex("0") == complexd(0, 0));

  CHECK_THROWS_AS(parse_complex(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("2+"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("i2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("1+2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("2ii"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("1+i2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("1 2i"), std::invalid_argument);
}

TEST_CASE("inclusive grids") {
  Grid g{0.0, 1.0, 0.25};
  CHECK(g.values() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

  // The endpoint must survive accumulated rounding in (stop-start)/step.
  Grid decimal{0.0, 0.3, 0.1};
  auto v = decimal.values();
  REQUIRE(v.size() == 4);
  CHECK(v[3] == doctest::Approx(0.3).epsilon(1e-12));

  Grid point{2.0, 2.0, 1.0};
  CHECK(point.values() == std::vector<double>{2.0});

  Grid wide{1.0, 20.0, 1.0};
  CHECK(wide.values().size() == 20);
}

TEST_CASE("full config parse") {
  const std::string text = R"(
# two coupled cavities
[system]
kappa1 = 1.0
kappa2 = 0.5
kappa_m = 8.0
omega1 = 0.4+0.1i   ; drive 1
omega2 = -0.3i
xi1 = 1
xi2 = i

[simulation]
cutoff = 6
t_final = 20.0
n_samples = 11
dt = 0.002
trajectories = 500
seed = 42
threads = 2

[sweep]
kappa_m = 1:20:0.5
phi = 0:3.14:0.157
drive_ratio_phase = 0:6.28:0.785

[regime]
fiber_length_m = 0.01
kappa0_per_s = 1e7
)";
  RunConfig c = parse_config_text(text);
  CHECK(c.params.kappa1 == 1.0);
  CHECK(c.params.kappa2 == 0.5);
  CHECK(c.params.kappa_m == 8.0);
  CHECK(c.params.omega1 == complexd(0.4, 0.1));
  CHECK(c.params.omega2 == complexd(0.0, -0.3));
  CHECK(c.params.xi1 == complexd(1, 0));
  CHECK(c.params.xi2 == complexd(0, 1));
  CHECK(c.cutoff == 6);
  CHECK(c.t_final == 20.0);
  CHECK(c.n_samples == 11);
  CHECK(c.dt == 0.002);
  CHECK(c.trajectories == 500);
  CHECK(c.seed == 42);
  CHECK(c.threads == 2);
  REQUIRE(c.kappa_m_grid.has_value());
  CHECK(c.kappa_m_grid->start == 1.0);
  CHECK(c.kappa_m_grid->stop == 20.0);
  CHECK(c.kappa_m_grid->step == 0.5);
  REQUIRE(c.phi_grid.has_value());
  CHECK(c.phi_grid->stop == 3.14);
  REQUIRE(c.drive_ratio_phase.has_value());
  CHECK(c.drive_ratio_phase->step == 0.785);
  REQUIRE(c.fiber_length_m.has_value());
  CHECK(*c.fiber_length_m == 0.01);
  REQUIRE(c.kappa0_per_s.has_value());
  CHECK(*c.kappa0_per_s == 1e7);
}

TEST_CASE("defaults survive an empty config") {
  RunConfig c = parse_config_text("");
  CHECK(c.params.kappa1 == 1.0);
  CHECK(c.params.kappa2 == 1.0);
  CHECK(c.params.kappa_m == 0.0);
  CHECK(c.params.omega1 == complexd(0, 0));
  CHECK(c.params.xi1 == complexd(1, 0));
  CHECK(c.cutoff == 0);
  CHECK(c.t_final == 10.0);
  CHECK(c.n_samples == 101);
  CHECK(c.dt == 0.0);
  CHECK(c.trajectories == 2000);
  CHECK(c.seed == 1);
  CHECK(c.threads == 0);
  CHECK(!c.kappa_m_grid.has_value());
  CHECK(!c.phi_grid.has_value());
  CHECK(!c.drive_ratio_phase.has_value());
  CHECK(!c.fiber_length_m.has_value());
  CHECK(!c.kappa0_per_s.has_value());
}

TEST_CASE("errors carry the line and the offending key") {
  ConfigError unknown_section = capture("[system]\nkappa1 = 1\n[laser]\npower = 3\n");
  CHECK(unknown_section.line() == 3);
  CHECK(unknown_section.key() == "laser");

  ConfigError unknown_key = capture("[system]\nkapa1 = 1\n");
  CHECK(unknown_key.line() == 2);
  CHECK(unknown_key.key() == "system.kapa1");

  ConfigError bad_real = capture("[system]\nkappa1 = fast\n");
  CHECK(bad_real.line() == 2);
  CHECK(bad_real.key() == "system.kappa1");

  ConfigError bad_complex = capture("[system]\nomega1 = 1+2j\n");
  CHECK(bad_complex.line() == 2);
  CHECK(bad_complex.key() == "system.omega1");

  ConfigError no_equals = capture("[system]\nkappa1\n");
  CHECK(no_equals.line() == 2);

  ConfigError orphan = capture("kappa1 = 1\n");
  CHECK(orphan.line() == 1);

  ConfigError bad_grid = capture("[sweep]\nkappa_m = 1:20\n");
  CHECK(bad_grid.line() == 2);
  CHECK(bad_grid.key() == "sweep.kappa_m");

  ConfigError reversed_grid = capture("[sweep]\nphi = 3:1:0.5\n");
  CHECK(reversed_grid.line() == 2);

  ConfigError zero_step = capture("[sweep]\nphi = 0:1:0\n");
  CHECK(zero_step.line() == 2);

  ConfigError negative_time = capture("[simulation]\nt_final = -2\n");
  CHECK(negative_time.line() == 2);

  ConfigError no_traj = capture("[simulation]\ntrajectories = 0\n");
  CHECK(no_traj.line() == 2);

  ConfigError frac_int = capture("[simulation]\ncutoff = 3.5\n");
  CHECK(frac_int.line() == 2);

  ConfigError neg_seed = capture("[simulation]\nseed = -1\n");
  CHECK(neg_seed.line() == 2);

  ConfigError few_samples = capture("[simulation]\nn_samples = 1\n");
  CHECK(few_samples.line() == 2);
}

TEST_CASE("later assignments win") {
  RunConfig c = parse_config_text("[system]\nkappa1 = 1\nkappa1 = 3\n");
  CHECK(c.params.kappa1 == 3.0);
}

TEST_CASE("rendered configs parse back to the same values") {
  const std::string text = R"(
[system]
kappa1 = 1.25
kappa2 = 0.5
kappa_m = 8.0
omega1 = 0.4+0.1i
omega2 = -0.3i
xi1 = 0.6-0.2i
xi2 = i

[simulation]
cutoff = 6
t_final = 20.0
n_samples = 11
dt = 0.002
trajectories = 500
seed = 42

[sweep]
kappa_m = 1:20:0.5

[regime]
fiber_length_m = 0.01
kappa0_per_s = 1e7
)";
  RunConfig c = parse_config_text(text);
  std::string rendered = render_config(c);

  // Every line is a comment.
  std::istringstream lines(rendered);
  std::string line, stripped;
  while (std::getline(lines, line)) {
    REQUIRE(line.rfind("# ", 0) == 0);
    stripped += line.substr(2) + "\n";
  }

  RunConfig back = parse_config_text(stripped);
  CHECK(back.params.kappa1 == c.params.kappa1);
  CHECK(back.params.kappa2 == c.params.kappa2);
  CHECK(back.params.kappa_m == c.params.kappa_m);
  CHECK(back.params.omega1 == c.params.omega1);
  CHECK(back.params.omega2 == c.params.omega2);
  CHECK(back.params.xi1 == c.params.xi1);
  CHECK(back.params.xi2 == c.params.xi2);
  CHECK(back.cutoff == c.cutoff);
  CHECK(back.t_final == c.t_final);
  CHECK(back.n_samples == c.n_samples);
  CHECK(back.dt == c.dt);
  CHECK(back.trajectories == c.trajectories);
  CHECK(back.seed == c.seed);
  REQUIRE(back.kappa_m_grid.has_value());
  CHECK(back.kappa_m_grid->values() == c.kappa_m_grid->values());
  CHECK(!back.phi_grid.has_value());
  REQUIRE(back.fiber_length_m.has_value());
  CHECK(*back.fiber_length_m == 0.01);
  CHECK(*back.kappa0_per_s == 1e7);

  // The thread count never changes results, so it must not reach the header.
  CHECK(rendered.find("threads") == std::string::npos);
}

TEST_CASE("file round trip and open failure") {
  const char* path = "test_config_roundtrip.ini";
  {
    std::ofstream out(path);
    out << "[system]\nkappa_m = 4\n[simulation]\nseed = 9\n";
  }
  RunConfig c = parse_config(path);
  CHECK(c.params.kappa_m == 4.0);
  CHECK(c.seed == 9);
  std::remove(path);

  CHECK_THROWS_AS(parse_config("no_such_file.ini"), ConfigError);
}
