#include "cavcool/app.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cavcool/convergence.hpp"
#include "cavcool/error.hpp"
#include "cavcool/io.hpp"

#ifndef CAVCOOL_VERSION
#define CAVCOOL_VERSION "0.0.0"
#endif

namespace cavcool {

namespace fs = std::filesystem;

std::string_view version() { return CAVCOOL_VERSION; }

namespace {

// Files are staged in memory and only written once every computation of the
// run has succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
};

std::vector<CellMethod> methods_of(MethodSelector m) {
  switch (m) {
    case MethodSelector::perturbative: return {CellMethod::perturbative};
    case MethodSelector::numeric: return {CellMethod::numeric};
    case MethodSelector::both: return {CellMethod::perturbative, CellMethod::numeric};
  }
  return {};
}

std::string rates_row(std::string_view label, const RateResult& r, double nu_si) {
  std::ostringstream s;
  s << label << ',' << format_number(r.a_plus) << ',' << format_number(r.a_minus) << ',' << format_number(r.w) << ','
    << format_number(r.w * nu_si) << ',' << format_number(r.n_st) << ',' << format_number(r.fit_residual) << '\n';
  return s.str();
}

void print_rates(std::ostream& out, std::string_view label, const RateResult& r, double nu_si) {
  out << std::left << std::setw(14) << label << " A+ = " << format_number(r.a_plus, 6)
      << "  A- = " << format_number(r.a_minus, 6) << "  W = " << format_number(r.w, 6) << " nu ("
      << format_number(r.w * nu_si, 6) << " s^-1)  n_st = " << format_number(r.n_st, 6) << '\n';
}

void run_simulate(const RunConfig& c, std::ostream& out, Outputs& files) {
  const auto& n = c.numerics;
  const double dt = n.dt > 0.0 ? n.dt : default_time_step(c.params);
  const auto steps = static_cast<std::int64_t>(std::llround(n.t_end / dt));
  const std::int64_t every = n.record_every > 0 ? n.record_every : std::max<std::int64_t>(1, steps / n.samples);
  const auto l = build_liouvillian(c.params);
  const auto rho0 = make_initial_state(c.params.layout, n.initial);
  const Trajectory traj = propagate(rho0, l, dt, n.t_end, every);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  files.add("trajectory.csv", csv.str());

  double drift = 0.0;
  for (double d : traj.trace_drift) drift = std::max(drift, d);
  out << "simulated " << traj.size() << " samples to t = " << format_number(traj.times.back(), 8) << " / nu\n"
      << "<n>: " << format_number(traj.mean_n.front(), 8) << " -> " << format_number(traj.mean_n.back(), 8)
      << "   max trace drift " << format_number(drift, 3) << '\n';
}

void run_rates(const RunConfig& c, std::ostream& out, Outputs& files) {
  const double nu = c.params.nu_si;
  std::string csv = "method,a_plus_nu,a_minus_nu,w_nu,w_si_per_s,n_st,fit_residual\n";
  std::optional<RateResult> pert;
  std::optional<NumericRun> num;
  if (c.method != MethodSelector::numeric) pert = perturbative_rates(c.params);
  if (c.method != MethodSelector::perturbative) num = numeric_rates(c.params, c.numeric_options());

  if (pert) {
    csv += rates_row("perturbative", *pert, nu);
    print_rates(out, "perturbative", *pert, nu);
  }
  if (num) {
    csv += rates_row(to_string(num->rates.method), num->rates, nu);
    print_rates(out, "numeric", num->rates, nu);
    std::ostringstream t;
    write_trajectory_csv(t, num->trajectory);
    files.add("rates_trajectory.csv", t.str());
  }
  if (pert && num) {
    auto dev = [](double a, double b) { return b != 0.0 ? (a - b) / std::abs(b) : std::nan(""); };
    out << "relative deviation (numeric - perturbative): A+ " << format_number(dev(num->rates.a_plus, pert->a_plus), 4)
        << ", A- " << format_number(dev(num->rates.a_minus, pert->a_minus), 4) << ", W "
        << format_number(dev(num->rates.w, pert->w), 4) << '\n';
  }
  if (auto w = c.params.lamb_dicke_warning(); !w.empty()) out << "warning: " << w << '\n';
  files.add("rates.csv", csv);
}

bool run_sweep_mode(const RunConfig& c, std::ostream& out, Outputs& files) {
  const auto deltas = linspace(c.grid.delta_min, c.grid.delta_max, c.grid.delta_count);
  const auto deltas_c = linspace(c.grid.delta_c_min, c.grid.delta_c_max, c.grid.delta_c_count);
  bool partial = false;
  for (CellMethod m : methods_of(c.method)) {
    const SweepGrid grid = run_sweep(c.params, deltas, deltas_c, c.sweep_options(m));
    const std::string stem = "sweep_" + std::string(to_string(m));
    std::ostringstream csv;
    write_sweep_csv(csv, grid);
    files.add(stem + ".csv", csv.str());
    if (c.output.svg) {
      files.add(stem + "_w.svg", sweep_svg(grid, SweepQuantity::w));
      files.add(stem + "_n_st.svg", sweep_svg(grid, SweepQuantity::n_st));
    }
    out << to_string(m) << ": " << grid.cells.size() << " cells, " << grid.failures() << " failed\n";
    partial = partial || grid.failures() > 0;
    try {
      const Extrema ex = find_extrema(grid);
      const auto& best = grid.cell(ex.max_w.i, ex.max_w.j).rates;
      out << "  max W = " << format_number(best.w, 6) << " nu (" << format_number(best.w * c.params.nu_si, 6)
          << " s^-1) at Delta = " << format_number(deltas[ex.max_w.i], 6)
          << ", delta_c = " << format_number(deltas_c[ex.max_w.j], 6) << '\n';
      out << "  min n_st = " << format_number(grid.cell(ex.min_n_st.i, ex.min_n_st.j).rates.n_st, 6)
          << " at Delta = " << format_number(deltas[ex.min_n_st.i], 6)
          << ", delta_c = " << format_number(deltas_c[ex.min_n_st.j], 6) << '\n';
    } catch (const NumericalError&) {
      out << "  no cooling cell\n";
    }
  }
  return partial;
}

bool run_omega_scan_mode(const RunConfig& c, std::ostream& out, Outputs& files) {
  bool partial = false;
  for (CellMethod m : methods_of(c.method)) {
    const OmegaScan scan = run_omega_scan(c.params, c.omegas, c.grid, c.sweep_options(m));
    std::ostringstream csv;
    write_omega_scan_csv(csv, scan);
    files.add("omega_scan_" + std::string(to_string(m)) + ".csv", csv.str());
    out << to_string(m) << ":\n";
    for (const auto& p : scan.points) {
      out << "  Omega = " << format_number(p.omega, 6) << "  max W = " << format_number(p.max_w * scan.nu_si, 6)
          << " s^-1  min n_st = " << format_number(p.min_n_st, 6) << '\n';
      partial = partial || p.failed_cells > 0;
    }
  }
  return partial;
}

void run_molecule(const RunConfig& c, std::ostream& out, Outputs& files) {
  const auto table = load_molecule_table(c.molecule_table);
  const PhysicalSpec ps = c.physical.value_or(PhysicalSpec{});
  std::ostringstream csv;
  csv << "name,wavenumber_cm1,dipole_au,gamma_table_s1,gamma_formula_s1,eta,g_nu,kappa_nu,gamma_nu,cooperativity\n";
  out << std::left << std::setw(10) << "molecule" << std::right << std::setw(12) << "gamma_tab" << std::setw(12)
      << "gamma_A" << std::setw(11) << "eta" << std::setw(11) << "g/nu" << std::setw(11) << "C1" << '\n';
  bool any = false;
  for (const auto& m : table) {
    if (!ps.molecule.empty() && m.name != ps.molecule) continue;
    any = true;
    const ModelParams p = to_model_params(m, ps.trap, ps.cavity);
    const double gamma_formula = einstein_a(m.wavenumber, m.dipole);
    const double c1 = cooperativity(p.g, p.kappa, p.gamma);
    csv << m.name << ',' << format_number(m.wavenumber) << ',' << format_number(m.dipole) << ','
        << format_number(m.gamma_si) << ',' << format_number(gamma_formula) << ',' << format_number(p.eta) << ','
        << format_number(p.g) << ',' << format_number(p.kappa) << ',' << format_number(p.gamma) << ','
        << format_number(c1) << '\n';
    out << std::left << std::setw(10) << m.name << std::right << std::setw(12) << format_number(m.gamma_si, 4)
        << std::setw(12) << format_number(gamma_formula, 4) << std::setw(11) << format_number(p.eta, 4)
        << std::setw(11) << format_number(p.g, 4) << std::setw(11) << format_number(c1, 4) << '\n';
  }
  if (!any) throw ConfigError("molecule '" + ps.molecule + "' not in " + c.molecule_table.string());
  files.add("molecules.csv", csv.str());
}

void run_convergence(const RunConfig& c, std::ostream& out, Outputs& files) {
  const auto report = convergence_scan(c.params, c.convergence_n_traps, c.numeric_options(), c.convergence_tolerance);
  std::ostringstream csv;
  csv << "n_trap,a_plus_nu,a_minus_nu,w_nu,w_si_per_s,n_st,rel_change\n";
  for (const auto& r : report.rows) {
    csv << r.n_trap << ',' << format_number(r.rates.a_plus) << ',' << format_number(r.rates.a_minus) << ','
        << format_number(r.rates.w) << ',' << format_number(r.rates.w * c.params.nu_si) << ','
        << format_number(r.rates.n_st) << ',' << format_number(r.rel_change) << '\n';
    out << "n_trap = " << r.n_trap << "  W = " << format_number(r.rates.w * c.params.nu_si, 6)
        << " s^-1  change " << format_number(r.rel_change, 3) << '\n';
  }
  if (report.converged())
    out << "converged at n_trap = " << report.converged_at << " (tolerance " << format_number(report.tolerance) << ")\n";
  else
    out << "not converged within tolerance " << format_number(report.tolerance) << '\n';
  files.add("convergence.csv", csv.str());
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out) {
  Outputs files;
  bool partial = false;
  switch (config.mode) {
    case Mode::simulate: run_simulate(config, out, files); break;
    case Mode::rates: run_rates(config, out, files); break;
    case Mode::sweep: partial = run_sweep_mode(config, out, files); break;
    case Mode::omega_scan: partial = run_omega_scan_mode(config, out, files); break;
    case Mode::molecule: run_molecule(config, out, files); break;
    case Mode::convergence: run_convergence(config, out, files); break;
  }
  files.add("manifest.cfg", "# cavcool " + std::string(version()) + " run manifest\n# generated " + timestamp() +
                                "\n" + render_config(config));

  std::error_code ec;
  fs::create_directories(config.output.dir, ec);
  if (ec) throw Error("cannot create output directory " + config.output.dir.string() + ": " + ec.message());
  for (const auto& [name, content] : files.files) write_file_atomic(config.output.dir / name, content);
  return partial ? kExitPartial : kExitOk;
}

int report_error(const std::exception& e, std::ostream& err) {
  int code = kExitNumerical;
  const char* kind = "internal";
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e)) {
    code = kExitConfig;
    kind = "config";
  } else if (dynamic_cast<const NumericalError*>(&e)) {
    kind = "numerical";
  }
  std::string msg = e.what();
  for (char& ch : msg)
    if (ch == '"' || ch == '\n') ch = '\'';
  err << "error: code=" << code << " kind=" << kind << " message=\"" << msg << "\"\n";
  return code;
}

}  // namespace cavcool
