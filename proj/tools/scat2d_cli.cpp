// scat2d_cli <command> --config <path> [--set section.key=value]... [--no-timestamp]
//
// Writes the command's CSV to run.output (stdout when unset) and a flat
// `key = value` summary to stdout. Exit codes: 0 ok, 1 computation error,
// 2 config error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "scat2d/config.hpp"
#include "scat2d/sfun.hpp"

using namespace scat2d;

namespace {

class Report {
 public:
  explicit Report(std::string header) { csv_ << header << "\n"; }

  std::ostream& row() { return csv_; }

  template <typename T>
  void summary(const std::string& key, const T& value) {
    std::ostringstream os;
    os.precision(12);
    os << key << " = " << value;
    lines_.push_back(os.str());
  }
  void summary_block(const std::string& text) {
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);)
      if (!l.empty()) lines_.push_back(l);
  }

  void emit(const RunConfig& cfg, bool timestamp) const {
    std::ostringstream out;
    out << csv_.str();
    for (const auto& l : lines_) out << "# " << l << "\n";
    if (timestamp) {
      const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      out << "# generated " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << "\n";
    }
    if (cfg.output.empty()) {
      std::cout << out.str();
    } else {
      std::ofstream f(cfg.output);
      if (!f) throw Error(ErrorKind::ConfigParse, "cannot write output file '" + cfg.output + "'");
      f << out.str();
      std::cout << "command = " << command_name(cfg.command) << "\n";
      for (const auto& l : lines_) std::cout << l << "\n";
      std::cout << "csv = " << cfg.output << "\n";
    }
  }

 private:
  std::ostringstream csv_;
  std::vector<std::string> lines_;
};

FactorizedPotential make_potential(const RunConfig& c) {
  return factorize_potential(c.potential, c.g,
                             build_grid_for(c.potential, c.grid.radius, c.grid.n_radial, c.grid.n_angular));
}

Report run_sweep(const RunConfig& c) {
  const FactorizedPotential pot = make_potential(c);
  const auto sweep = sweep_smatrix(pot, log_spaced(c.sweep.lambda_min, c.sweep.lambda_max, c.sweep.points),
                                   AngularGrid(c.grid.m_angles));
  Report r("lambda,s_minus_1_norm,unitarity_defect,cond_M");
  r.row().precision(12);
  double worst_unitarity = 0.0, max_s1 = 0.0;
  int failed = 0;
  std::string first_error;
  for (const auto& e : sweep) {
    if (!e.sample) {
      r.row() << e.lambda << ",nan,nan,nan\n";
      if (failed++ == 0) first_error = e.error;
      continue;
    }
    const auto& s = *e.sample;
    r.row() << s.lambda << "," << s.s_minus_1_norm << "," << s.unitarity_defect << "," << s.cond_M << "\n";
    worst_unitarity = std::max(worst_unitarity, s.unitarity_defect);
    max_s1 = std::max(max_s1, s.s_minus_1_norm);
  }
  r.summary("points", sweep.size());
  r.summary("failed", failed);
  r.summary("max_s_minus_1_norm", max_s1);
  r.summary("max_unitarity_defect", worst_unitarity);
  if (failed) r.summary("first_error", first_error);
  return r;
}

Report run_classify(const RunConfig& c) {
  const FactorizedPotential pot = make_potential(c);
  const ProjectionSet pset = compute_projection_set(pot, c.tol.null_tol);
  const ThresholdReport rep = classify_threshold(pset, pot);
  Report r(ThresholdReport::csv_header());
  r.row() << rep.csv_row(c.g) << "\n";
  r.summary_block(rep.to_text());
  return r;
}

Report run_tune(const RunConfig& c) {
  TuneOptions opt;
  opt.radius = c.grid.radius;
  opt.n_radial = c.grid.n_radial;
  opt.n_angular = c.grid.n_angular;
  opt.g_tol = c.tol.g_tol;
  opt.null_tol = c.tol.null_tol;
  const double g = tune_critical_coupling(c.potential, c.tune.target, c.tune.g_lo, c.tune.g_hi, opt);
  const char* name = c.tune.target == Target::SResonance   ? "s_resonance"
                     : c.tune.target == Target::PResonance ? "p_resonance"
                                                           : "zero_bound";
  Report r("target,g_star");
  r.row().precision(15);
  r.row() << name << "," << g << "\n";
  r.summary("target", name);
  r.summary("g_star", g);
  return r;
}

Report run_levinson(const RunConfig& c) {
  const FactorizedPotential pot = make_potential(c);
  SweepSpec spec;
  spec.lambda_min = c.sweep.lambda_min;
  spec.lambda_max = c.sweep.lambda_max;
  spec.points = c.sweep.points;
  spec.m_angles = c.grid.m_angles;
  spec.box_radius = c.levinson.box_radius;
  spec.n_fd = c.levinson.n_fd;
  const LevinsonReport rep = levinson_check(pot, spec);
  Report r("lambda,integrand_n0,integrand_n1,integrand_n2");
  r.row().precision(12);
  const auto& l = rep.detail[0].lambdas;
  for (std::size_t i = 0; i < l.size(); ++i)
    r.row() << l[i] << "," << rep.detail[0].integrand[i] << "," << rep.detail[1].integrand[i] << ","
            << rep.detail[2].integrand[i] << "\n";
  for (int n = 0; n < 3; ++n) {
    r.summary("winding_n" + std::to_string(n), rep.winding[n]);
    r.summary("tail_n" + std::to_string(n), rep.tails[n]);
    r.summary("step_error_n" + std::to_string(n), rep.detail[n].step_error);
  }
  r.summary("n_bound", rep.n_bound);
  r.summary("discrepancy", rep.discrepancy);
  r.summary("n_spread", rep.n_spread);
  return r;
}

Report run_waveop(const RunConfig& c) {
  const FactorizedPotential pot = make_potential(c);
  const auto& p = c.packet;
  const WavePacket psi = gaussian_packet(p.n, p.L, p.k0x, p.k0y, p.sigma, p.cx, p.cy, p.window_lo, p.window_hi);
  if (!c.snapshot.empty()) write_snapshot(c.snapshot, psi, 0.0);
  const WaveopReport rep = compare_waveops(pot, psi, c.waveop);
  Report r("metric,value");
  r.row().precision(12);
  const std::pair<const char*, double> rows[] = {
      {"rel_error", rep.rel_error},   {"isometry_defect", rep.isometry_defect},
      {"identity_defect", rep.identity_defect}, {"cauchy", rep.cauchy},
      {"norm_drift", rep.norm_drift}, {"scattered", rep.scattered},
      {"simplified_residual", rep.simplified_residual}, {"window_fraction", window_mass_fraction(psi)}};
  for (const auto& [k, v] : rows) {
    r.row() << k << "," << v << "\n";
    r.summary(k, v);
  }
  for (Index i = 0; i < rep.simplified_singular_values.size(); ++i)
    r.row() << "simplified_sv_" << i << "," << rep.simplified_singular_values[i] << "\n";
  return r;
}

Report run_selftest(const RunConfig&) {
  const auto rep = sfun::sfun_selftest();
  Report r("check,value");
  r.row().precision(12);
  r.row() << "wronskian_max_rel_deviation," << rep.max_rel_deviation << "\n";
  r.row() << "wronskian_worst_x," << rep.worst_x << "\n";
  r.summary("wronskian_max_rel_deviation", rep.max_rel_deviation);
  r.summary("n_points", rep.n_points);
  r.summary("pass", rep.max_rel_deviation <= 1e-10 ? "true" : "false");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-dimensional Schroedinger scattering: S-matrix sweeps, threshold classification, "
               "Levinson checks and wave operators"};
  std::string command, config_path;
  std::vector<std::string> overrides;
  bool no_timestamp = false;
  app.add_option("command", command, "sweep | classify | tune | levinson | waveop | selftest")
      ->required()
      ->check(CLI::IsMember({"sweep", "classify", "tune", "levinson", "waveop", "selftest"}));
  app.add_option("--config", config_path, "config file (key = value with [section] headers)")->required();
  app.add_option("--set", overrides, "override, section.key=value");
  app.add_flag("--no-timestamp", no_timestamp, "omit the generated-at comment line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    overrides.push_back("run.command=" + command);
    const RunConfig cfg = load_config(config_path, overrides);
    Report rep = [&] {
      switch (cfg.command) {
        case Command::Sweep: return run_sweep(cfg);
        case Command::Classify: return run_classify(cfg);
        case Command::Tune: return run_tune(cfg);
        case Command::Levinson: return run_levinson(cfg);
        case Command::Waveop: return run_waveop(cfg);
        case Command::Selftest: break;
      }
      return run_selftest(cfg);
    }();
    rep.emit(cfg, !no_timestamp);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigParse ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
