#include "cavitylink/runner.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cavitylink/master.hpp"
#include "cavitylink/mcwf.hpp"
#include "cavitylink/observables.hpp"
#include "cavitylink/rates.hpp"
#include "cavitylink/version.hpp"

namespace fs = std::filesystem;

namespace cavitylink {

namespace {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int resolve_cutoff(const RunConfig& config, const SystemParams& params) {
  return config.cutoff > 0 ? config.cutoff : recommended_cutoff_for(params);
}

std::vector<double> sample_times(const RunConfig& config) {
  std::vector<double> t(static_cast<std::size_t>(config.n_samples));
  for (int i = 0; i < config.n_samples; ++i)
    t[static_cast<std::size_t>(i)] = config.t_final * i / (config.n_samples - 1);
  return t;
}

Operator rate_op(const OpenSystemModel& model, const std::string& label) {
  for (const auto& j : model.jumps)
    if (j.label == label) return compose(adjoint(j.op), j.op);
  throw std::logic_error("model has no channel " + label);
}

EvolutionResult evolve_from_vacuum(const OpenSystemModel& model,
                                   const RunConfig& config,
                                   std::vector<Operator> observables) {
  MasterOptions opts;
  opts.n_samples = config.n_samples;
  opts.observables = std::move(observables);
  opts.dt_max = config.dt;
  return evolve_master(model, vacuum_state(model.space), config.t_final, opts);
}

void emit(RunReport& report, const RunOptions& options,
          const std::vector<std::string>& columns,
          const std::vector<std::vector<double>>& rows) {
  fs::create_directories(options.out_dir);
  fs::path base = fs::path(options.out_dir) / scenario_name(options.scenario);

  fs::path csv_path = base;
  csv_path += ".csv";
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  csv << render_csv(options, columns, rows);
  report.artifacts.push_back({csv_path.string(), "csv"});

  if (options.format == "csv+svg") {
    fs::path svg_path = base;
    svg_path += ".svg";
    std::ofstream svg(svg_path, std::ios::binary);
    if (!svg) throw std::runtime_error("cannot write " + svg_path.string());
    svg << render_svg(columns, rows);
    report.artifacts.push_back({svg_path.string(), "svg"});
  }
}

std::string banner(const RunOptions& options, int cutoff) {
  std::ostringstream line;
  line << scenario_name(options.scenario) << ": cutoff " << cutoff << ", "
       << options.config.n_samples << " samples to t = " << fmt6(options.config.t_final);
  return line.str();
}

RunReport run_single(const RunOptions& options) {
  const RunConfig& c = options.config;
  const SystemParams& p = c.params;
  int n = resolve_cutoff(c, p);
  OpenSystemModel model = build_single_cavity(p.omega1, p.kappa1, n);

  EvolutionResult ev = evolve_from_vacuum(
      model, c, {number_operator(model.space, 0), rate_op(model, "1")});

  double mag = std::abs(p.omega1) / p.kappa1;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ev.times.size(); ++i) {
    double f = 1.0 - std::exp(-p.kappa1 * ev.times[i] / 2.0);
    double n_closed = mag * mag * f * f;
    rows.push_back({ev.times[i], ev.observable_values[0][i], n_closed,
                    ev.observable_values[1][i], p.kappa1 * n_closed});
  }

  RunReport report;
  report.log.push_back(banner(options, n));
  report.log.push_back("final n = " + fmt6(rows.back()[1]) +
                       " (closed form " + fmt6(rows.back()[2]) + ")");
  emit(report, options, {"time", "n", "n_closed", "i_1", "i_1_closed"}, rows);
  return report;
}

RunReport run_two_mode(const RunOptions& options) {
  const RunConfig& c = options.config;
  const SystemParams& p = c.params;
  bool common = options.scenario == Scenario::common;
  int n = resolve_cutoff(c, p);
  OpenSystemModel model = common ? build_common(p, n) : build_local(p, n);
  CommonModeFrame frame = make_frame(p);
  complexd x1 = p.xi1 / frame.xi;
  complexd x2 = p.xi2 / frame.xi;

  Operator n1 = common
      ? [&] {
          Operator c1 = mode_combination(model.space, {x2, std::conj(x1)});
          return compose(adjoint(c1), c1);
        }()
      : number_operator(model.space, 0);
  Operator n2 = common
      ? [&] {
          Operator c2 = mode_combination(model.space, {-x1, std::conj(x2)});
          return compose(adjoint(c2), c2);
        }()
      : number_operator(model.space, 1);
  Operator na = common
      ? number_operator(model.space, 0)
      : [&] {
          Operator ca = mode_combination(model.space, {std::conj(x2), -std::conj(x1)});
          return compose(adjoint(ca), ca);
        }();
  Operator nb = common
      ? number_operator(model.space, 1)
      : [&] {
          Operator cb = mode_combination(model.space, {x1, x2});
          return compose(adjoint(cb), cb);
        }();

  EvolutionResult ev = evolve_from_vacuum(
      model, c,
      {n1, n2, na, nb, rate_op(model, "1"), rate_op(model, "2"), rate_op(model, "m")});

  std::vector<std::string> columns = {"time", "n_1", "n_2", "n_a", "n_b",
                                      "i_1", "i_2", "i_m"};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ev.times.size(); ++i) {
    std::vector<double> row = {ev.times[i]};
    for (int k = 0; k < 7; ++k) row.push_back(ev.observable_values[static_cast<std::size_t>(k)][i]);
    rows.push_back(std::move(row));
  }

  RunReport report;
  report.log.push_back(banner(options, n));

  if (common) {
    double dt = c.dt > 0 ? c.dt : 0.08 / std::max(max_total_jump_rate(model), 1e-12);
    McwfOptions mopts;
    mopts.n_samples = c.n_samples;
    mopts.observables = {na, nb};
    mopts.threads = c.threads;
    mopts.keep_jump_records = false;
    TrajectoryEnsemble ens = mcwf_trajectories(model, vacuum_state(model.space),
                                               c.t_final, dt, c.trajectories, c.seed, mopts);
    columns.insert(columns.end(), {"n_a_mcwf", "se_n_a", "n_b_mcwf", "se_n_b"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].push_back(ens.mean[0][i]);
      rows[i].push_back(ens.std_error[0][i]);
      rows[i].push_back(ens.mean[1][i]);
      rows[i].push_back(ens.std_error[1][i]);
    }
    std::ostringstream line;
    line << "mcwf: " << c.trajectories << " trajectories, dt = " << fmt6(dt)
         << ", seed " << c.seed;
    report.log.push_back(line.str());
    std::ostringstream counts;
    counts << "jump counts:";
    for (std::size_t k = 0; k < ens.channel_labels.size(); ++k)
      counts << " " << ens.channel_labels[k] << "=" << ens.jump_counts[k];
    report.log.push_back(counts.str());
  }

  emit(report, options, columns, rows);
  return report;
}

RunReport run_effective(const RunOptions& options) {
  const RunConfig& c = options.config;
  const SystemParams& p = c.params;
  int n = resolve_cutoff(c, p);
  OpenSystemModel model = build_effective(p, n);

  EvolutionResult ev = evolve_from_vacuum(
      model, c,
      {number_operator(model.space, 0), rate_op(model, "1"), rate_op(model, "2"),
       rate_op(model, "m")});

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ev.times.size(); ++i)
    rows.push_back({ev.times[i], ev.observable_values[0][i], ev.observable_values[1][i],
                    ev.observable_values[2][i], ev.observable_values[3][i]});

  RunReport report;
  report.log.push_back(banner(options, n));
  emit(report, options, {"time", "n_a", "i_1", "i_2", "i_m"}, rows);
  return report;
}

RunReport run_rates(const RunOptions& options) {
  const RunConfig& c = options.config;
  const SystemParams& p = c.params;
  CommonModeFrame frame = make_frame(p);
  double drive_scale = std::abs(p.omega1) + std::abs(p.omega2);
  if (std::abs(frame.omega_a) <= 1e-14 * drive_scale ||
      std::abs(frame.omega_b) <= 1e-14 * drive_scale || drive_scale == 0.0)
    throw std::runtime_error(
        "rate variables are undefined: an effective drive vanishes for this "
        "drive alignment");

  int n = resolve_cutoff(c, p);
  OpenSystemModel model = build_common(p, n);
  const FockSpace& space = model.space;
  Operator ca = annihilation(space, 0);
  Operator cb = annihilation(space, 1);
  complexd i2(0.0, 2.0);
  double xi2sq = frame.xi * frame.xi;
  complexd xx = p.xi1 * p.xi2;

  // Each quadrature is Re of a rescaled amplitude, so plain real-valued
  // expectation tracking suffices.
  std::vector<Operator> obs = {
      number_operator(space, 0),
      number_operator(space, 1),
      scale(i2 * frame.omega_a / std::abs(frame.omega_a), ca),
      scale(i2 * frame.omega_b / std::abs(frame.omega_b), cb),
      scale(2.0 * xx / xi2sq, compose(adjoint(cb), ca)),
      scale(i2 * xx * frame.omega_b / (std::abs(frame.omega_b) * xi2sq), ca),
      scale(i2 * std::conj(xx) * frame.omega_a / (std::abs(frame.omega_a) * xi2sq), cb),
  };
  EvolutionResult ev = evolve_from_vacuum(model, c, obs);

  // Closed rate system from the same vacuum start, integrated on a step well
  // below the fastest rate in the model.
  double h_target = 0.01 / std::max(rate_scale(model), 1e-12);
  std::vector<double> times = sample_times(c);
  double delta = times[1] - times[0];
  int n_sub = std::max(1, static_cast<int>(std::ceil(delta / h_target)));
  double h = delta / n_sub;

  auto plus = [](const RateState& a, const RateState& b, double w) {
    return RateState{a.n_a + w * b.n_a, a.n_b + w * b.n_b, a.k_a + w * b.k_a,
                     a.k_b + w * b.k_b, a.m + w * b.m,     a.l_a + w * b.l_a,
                     a.l_b + w * b.l_b};
  };
  RateState state{};
  std::vector<std::vector<double>> rows;
  rows.push_back({times[0], 0, 0, 0, 0, 0, 0, 0, ev.observable_values[0][0],
                  ev.observable_values[1][0], ev.observable_values[2][0],
                  ev.observable_values[3][0], ev.observable_values[4][0],
                  ev.observable_values[5][0], ev.observable_values[6][0]});
  for (std::size_t i = 1; i < times.size(); ++i) {
    for (int s = 0; s < n_sub; ++s) {
      RateState k1 = rate_rhs(state, p);
      RateState k2 = rate_rhs(plus(state, k1, h / 2), p);
      RateState k3 = rate_rhs(plus(state, k2, h / 2), p);
      RateState k4 = rate_rhs(plus(state, k3, h), p);
      RateState sum = plus(plus(plus(k1, k2, 2.0), k3, 2.0), k4, 1.0);
      state = plus(state, sum, h / 6.0);
    }
    std::vector<double> row = {times[i], state.n_a, state.n_b, state.k_a,
                               state.k_b, state.m,  state.l_a, state.l_b};
    for (int k = 0; k < 7; ++k) row.push_back(ev.observable_values[static_cast<std::size_t>(k)][i]);
    rows.push_back(std::move(row));
  }

  RunReport report;
  report.log.push_back(banner(options, n));
  RateSolution steady = rate_steady_state(p);
  report.log.push_back("rate steady state: n_a = " + fmt6(steady.n_a) +
                       ", n_b = " + fmt6(steady.n_b) + ", ratio = " + fmt6(steady.ratio));
  emit(report, options,
       {"time", "n_a_rates", "n_b_rates", "k_a_rates", "k_b_rates", "m_rates",
        "l_a_rates", "l_b_rates", "n_a_full", "n_b_full", "k_a_full", "k_b_full",
        "m_full", "l_a_full", "l_b_full"},
       rows);
  return report;
}

RunReport run_sweep(const RunOptions& options) {
  const RunConfig& c = options.config;
  const SystemParams& p = c.params;
  if (!c.kappa_m_grid)
    throw ConfigError("sweep needs a fiber damping grid", 0, "sweep.kappa_m");
  std::vector<double> kms = c.kappa_m_grid->values();

  RunReport report;
  std::vector<std::vector<double>> rows;

  if (c.phi_grid) {
    // Symmetric configuration: equal drives and coupling magnitudes, closed
    // steady-state forms per (phi, kappa_m) point.
    double omega = std::abs(p.omega1);
    for (double phi : c.phi_grid->values()) {
      for (double km : kms) {
        SymmetricSteady s = symmetric_steady(omega, p.kappa1, km * p.kappa1, phi);
        rows.push_back({km, phi, s.n_a, s.n_b, s.ratio});
      }
    }
    report.log.push_back("sweep: " + std::to_string(rows.size()) +
                         " closed-form points (" + std::to_string(kms.size()) +
                         " fiber rates x " + std::to_string(c.phi_grid->values().size()) +
                         " phases)");
    emit(report, options, {"kappa_m", "phi", "n_a", "n_b", "ratio"}, rows);
    return report;
  }

  for (double km : kms) {
    SystemParams q = p;
    q.kappa_m = km * p.kappa1;
    RateSolution rate = rate_steady_state(q);
    OpenSystemModel model = build_common(q, resolve_cutoff(c, q));
    SteadyStateResult steady = steady_state(model);
    EmissionReport em = emission_report(steady.rho, model);
    RatioResult full_ratio = decoupling_ratio(em);
    rows.push_back({km, rate.n_a, rate.n_b, rate.ratio, em.n_a, em.n_b,
                    full_ratio.value});
  }
  report.log.push_back("sweep: " + std::to_string(rows.size()) +
                       " fiber rates, rate system vs full steady state");
  emit(report, options,
       {"kappa_m", "n_a_rates", "n_b_rates", "ratio_rates", "n_a_full", "n_b_full",
        "ratio_full"},
       rows);
  return report;
}

RunReport run_calibrate(const RunOptions& options) {
  const RunConfig& c = options.config;
  const SystemParams& p = c.params;
  if (!c.drive_ratio_phase)
    throw ConfigError("calibrate needs a drive ratio phase grid", 0,
                      "sweep.drive_ratio_phase");
  if (std::abs(p.xi1) == 0.0 || std::abs(p.xi2) == 0.0)
    throw std::invalid_argument("calibrate needs nonzero xi1 and xi2");

  // Scan on the circle through the dark alignment: |omega1/omega2| = |xi2/xi1|.
  double mag = std::abs(p.xi2) / std::abs(p.xi1);
  std::vector<double> phases = c.drive_ratio_phase->values();
  std::vector<complexd> grid;
  grid.reserve(phases.size());
  for (double theta : phases) grid.push_back(std::polar(mag, theta));

  CalibrationScan scan = calibration_scan(p, grid, c.cutoff);

  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < scan.points.size(); ++k) {
    const CalibrationPoint& pt = scan.points[k];
    rows.push_back({phases[k], pt.ratio.real(), pt.ratio.imag(), pt.i_m, pt.n_a,
                    pt.n_b});
  }

  RunReport report;
  std::ostringstream dark;
  dark << "dark alignment omega1/omega2 = " << fmt6(scan.aligned_ratio.real())
       << (scan.aligned_ratio.imag() < 0 ? "-" : "+")
       << fmt6(std::abs(scan.aligned_ratio.imag())) << "i (phase "
       << fmt6(std::arg(scan.aligned_ratio)) << ")";
  report.log.push_back(dark.str());
  report.log.push_back("grid minimum i_m = " + fmt6(scan.points[static_cast<std::size_t>(scan.argmin)].i_m) +
                       " at phase " + fmt6(phases[static_cast<std::size_t>(scan.argmin)]));
  report.log.push_back("grid maximum i_m = " + fmt6(scan.points[static_cast<std::size_t>(scan.argmax)].i_m) +
                       " at phase " + fmt6(phases[static_cast<std::size_t>(scan.argmax)]));
  emit(report, options, {"phase", "ratio_re", "ratio_im", "i_m", "n_a", "n_b"}, rows);
  return report;
}

RunReport run_validate(const RunOptions& options) {
  const RunConfig& c = options.config;
  if (!c.fiber_length_m || !c.kappa0_per_s)
    throw ConfigError("validate needs fiber_length_m and kappa0_per_s", 0,
                      "regime");
  RegimeReport regime = validate_regime(c.params, *c.fiber_length_m, *c.kappa0_per_s);

  RunReport report;
  auto describe = [&](const char* name, const RegimeCheck& check) {
    report.log.push_back(std::string(name) + ": headroom " + fmt6(check.ratio) +
                         " (needs >= " + fmt6(regime.margin) + ") " +
                         (check.pass ? "ok" : "VIOLATED"));
  };
  describe("fiber_dominates", regime.fiber_dominates);
  describe("round_trip", regime.round_trip);
  describe("timescales", regime.timescales);

  emit(report, options,
       {"fiber_dominates", "round_trip", "timescales", "margin", "pass"},
       {{regime.fiber_dominates.ratio, regime.round_trip.ratio,
         regime.timescales.ratio, regime.margin, regime.pass ? 1.0 : 0.0}});

  if (!regime.pass) {
    std::string bad;
    if (!regime.fiber_dominates.pass) bad += " fiber_dominates";
    if (!regime.round_trip.pass) bad += " round_trip";
    if (!regime.timescales.pass) bad += " timescales";
    throw std::runtime_error("regime violated:" + bad);
  }
  return report;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  if (name == "single") return Scenario::single;
  if (name == "local") return Scenario::local;
  if (name == "common") return Scenario::common;
  if (name == "effective") return Scenario::effective;
  if (name == "rates") return Scenario::rates;
  if (name == "sweep") return Scenario::sweep;
  if (name == "calibrate") return Scenario::calibrate;
  if (name == "validate") return Scenario::validate;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::single: return "single";
    case Scenario::local: return "local";
    case Scenario::common: return "common";
    case Scenario::effective: return "effective";
    case Scenario::rates: return "rates";
    case Scenario::sweep: return "sweep";
    case Scenario::calibrate: return "calibrate";
    case Scenario::validate: return "validate";
  }
  return "single";
}

std::string render_csv(const RunOptions& options,
                       const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << "# cavitylink " << kVersion << "\n";
  out << "# scenario = " << scenario_name(options.scenario) << "\n";
  out << "# config_file = "
      << (options.config_path.empty() ? "<none>" : options.config_path) << "\n";
  out << render_config(options.config);
  for (std::size_t k = 0; k < columns.size(); ++k)
    out << columns[k] << (k + 1 < columns.size() ? ',' : '\n');
  for (const auto& row : rows)
    for (std::size_t k = 0; k < row.size(); ++k)
      out << fmt12(row[k]) << (k + 1 < row.size() ? ',' : '\n');
  return out.str();
}

std::string render_svg(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows) {
  const double width = 720, height = 440;
  const double left = 70, right = 20, top = 30, bottom = 45;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#17becf"};

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& row : rows) {
    if (!std::isfinite(row[0])) continue;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (!std::isfinite(row[k])) continue;
      if (first) {
        xmin = xmax = row[0];
        ymin = ymax = row[k];
        first = false;
      }
      xmin = std::min(xmin, row[0]);
      xmax = std::max(xmax, row[0]);
      ymin = std::min(ymin, row[k]);
      ymax = std::max(ymax, row[k]);
    }
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  auto px = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  auto py = [&](double y) {
    return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };
  auto coord = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(height - bottom)
      << "\" x2=\"" << coord(width - right) << "\" y2=\"" << coord(height - bottom)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\""
      << coord(left) << "\" y2=\"" << coord(height - bottom)
      << "\" stroke=\"black\"/>\n";

  const char* style = "font-family=\"sans-serif\" font-size=\"12\"";
  out << "<text x=\"" << coord(left) << "\" y=\"" << coord(height - bottom + 16)
      << "\" " << style << ">" << fmt6(xmin) << "</text>\n";
  out << "<text x=\"" << coord(width - right - 40) << "\" y=\""
      << coord(height - bottom + 16) << "\" " << style << ">" << fmt6(xmax)
      << "</text>\n";
  out << "<text x=\"" << coord(4) << "\" y=\"" << coord(height - bottom) << "\" "
      << style << ">" << fmt6(ymin) << "</text>\n";
  out << "<text x=\"" << coord(4) << "\" y=\"" << coord(top + 10) << "\" " << style
      << ">" << fmt6(ymax) << "</text>\n";
  out << "<text x=\"" << coord(width / 2 - 20) << "\" y=\""
      << coord(height - bottom + 32) << "\" " << style << ">" << columns[0]
      << "</text>\n";

  for (std::size_t k = 1; k < columns.size(); ++k) {
    const char* color = palette[(k - 1) % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    bool started = false;
    for (const auto& row : rows) {
      if (!std::isfinite(row[0]) || !std::isfinite(row[k])) continue;
      if (started) out << ' ';
      out << coord(px(row[0])) << ',' << coord(py(row[k]));
      started = true;
    }
    out << "\"/>\n";
    double ly = top + 6 + 16.0 * static_cast<double>(k - 1);
    out << "<rect x=\"" << coord(width - right - 130) << "\" y=\"" << coord(ly)
        << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    out << "<text x=\"" << coord(width - right - 116) << "\" y=\"" << coord(ly + 9)
        << "\" " << style << ">" << columns[k] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

RunReport run_scenario(const RunOptions& options) {
  switch (options.scenario) {
    case Scenario::single: return run_single(options);
    case Scenario::local: return run_two_mode(options);
    case Scenario::common: return run_two_mode(options);
    case Scenario::effective: return run_effective(options);
    case Scenario::rates: return run_rates(options);
    case Scenario::sweep: return run_sweep(options);
    case Scenario::calibrate: return run_calibrate(options);
    case Scenario::validate: return run_validate(options);
  }
  throw std::logic_error("unhandled scenario");
}

}  // namespace cavitylink
