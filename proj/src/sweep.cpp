#include "cavcool/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <boost/math/tools/minima.hpp>

#include "cavcool/error.hpp"
#include "cavcool/io.hpp"

namespace cavcool {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SweepCell run_cell(const ModelParams& base, double delta, double delta_c, const SweepOptions& o) {
  SweepCell cell;
  try {
    cell.rates = evaluate_cell(base, delta, delta_c, o.method, o.numeric);
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.rates.a_plus = cell.rates.a_minus = cell.rates.w = cell.rates.n_st = kNaN;
    cell.rates.method = o.method == CellMethod::numeric ? RateMethod::trajectory_fit : RateMethod::perturbative;
    cell.error = e.what();
  }
  return cell;
}

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  return s;
}

}  // namespace

std::string_view to_string(CellMethod m) { return m == CellMethod::numeric ? "numeric" : "perturbative"; }

std::size_t SweepGrid::failures() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return !c.ok; }));
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("linspace: count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  for (int k = 0; k < count; ++k) v[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
  v.back() = hi;
  return v;
}

RateResult evaluate_cell(const ModelParams& base, double delta, double delta_c, CellMethod method,
                         const NumericOptions& numeric) {
  ModelParams p = base;
  p.delta = delta;
  p.delta_c = delta_c;
  if (method == CellMethod::perturbative) return perturbative_rates(p);
  return numeric_rates(p, numeric).rates;
}

SweepGrid run_sweep(const ModelParams& base, const std::vector<double>& delta_axis,
                    const std::vector<double>& delta_c_axis, const SweepOptions& options) {
  if (delta_axis.empty() || delta_c_axis.empty()) throw std::invalid_argument("run_sweep: empty axis");
  base.validate();

  SweepGrid grid;
  grid.delta_axis = delta_axis;
  grid.delta_c_axis = delta_c_axis;
  grid.method = options.method;
  grid.base = base;
  const std::size_t n = delta_axis.size() * delta_c_axis.size();
  grid.cells.resize(n);

  const auto cols = delta_c_axis.size();
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < n; k += stride)
      grid.cells[k] = run_cell(base, delta_axis[k / cols], delta_c_axis[k % cols], options);
  };

  const auto workers = static_cast<std::size_t>(std::clamp<long>(options.workers, 1, static_cast<long>(n)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }

  const std::size_t failed = grid.failures();
  if (static_cast<double>(failed) > options.max_failure_fraction * static_cast<double>(n)) {
    std::string first;
    for (const auto& c : grid.cells)
      if (!c.ok) {
        first = c.error;
        break;
      }
    throw NumericalError("sweep: " + std::to_string(failed) + " of " + std::to_string(n) +
                         " cells failed (first: " + first + ")");
  }
  return grid;
}

Extrema find_extrema(const SweepGrid& grid) {
  // Lexicographic key: primary value, |delta_c|, |delta + nu|, linear index.
  using Key = std::tuple<double, double, double, std::size_t>;
  auto key = [&](std::size_t k, double primary) {
    const double d = grid.delta_axis[k / grid.cols()];
    const double dc = grid.delta_c_axis[k % grid.cols()];
    return Key{primary, std::abs(dc), std::abs(d + 1.0), k};
  };
  bool found = false;
  Key best_w{}, best_n{};
  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const auto& c = grid.cells[k];
    if (!c.ok || !(c.rates.w > 0.0)) continue;
    const Key kw = key(k, -c.rates.w);
    const Key kn = key(k, std::isnan(c.rates.n_st) ? std::numeric_limits<double>::infinity() : c.rates.n_st);
    if (!found || kw < best_w) best_w = kw;
    if (!found || kn < best_n) best_n = kn;
    found = true;
  }
  if (!found) throw NumericalError("find_extrema: no cooling cell in grid");
  auto index = [&](const Key& k) {
    const std::size_t lin = std::get<3>(k);
    return GridIndex{lin / grid.cols(), lin % grid.cols()};
  };
  return {index(best_w), index(best_n)};
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid) {
  os << "delta_nu,delta_c_nu,a_plus_nu,a_minus_nu,w_nu,w_si_per_s,n_st,method,status\n";
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      const auto& c = grid.cell(i, j);
      const auto& r = c.rates;
      os << format_number(grid.delta_axis[i]) << ',' << format_number(grid.delta_c_axis[j]) << ','
         << format_number(r.a_plus) << ',' << format_number(r.a_minus) << ',' << format_number(r.w) << ','
         << format_number(r.w * grid.base.nu_si) << ',' << format_number(r.n_st) << ',' << to_string(r.method) << ','
         << (c.ok ? std::string("ok") : "failed: " + csv_safe(c.error)) << '\n';
    }
  }
}

// -- SVG ----------------------------------------------------------------------

namespace {

// Viridis-like ramp.
std::string ramp(double t) {
  static const double stops[][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(t));
  const double f = t - k;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
  return buf;
}

}  // namespace

std::string sweep_svg(const SweepGrid& grid, SweepQuantity quantity) {
  const bool is_w = quantity == SweepQuantity::w;
  auto value = [&](const SweepCell& c) {
    if (!c.ok) return kNaN;
    if (is_w) return c.rates.w;
    return c.rates.w > 0.0 ? c.rates.n_st : kNaN;
  };
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : grid.cells) {
    const double v = value(c);
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) lo = hi = 0.0;

  const double cell = 16.0, left = 70.0, top = 40.0;
  const double w = cell * static_cast<double>(grid.rows()), h = cell * static_cast<double>(grid.cols());
  const double width = left + w + 110.0, height = top + h + 60.0;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<text x=\"" << left << "\" y=\"20\" font-size=\"13\">"
    << (is_w ? "cooling rate W [nu]" : "steady-state occupation n_st") << " (" << to_string(grid.method)
    << ", Omega = " << format_number(grid.base.omega, 6) << " nu)</text>\n";
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    for (std::size_t j = 0; j < grid.cols(); ++j) {
      const double v = value(grid.cell(i, j));
      const std::string fill = std::isfinite(v) ? ramp(hi > lo ? (v - lo) / (hi - lo) : 0.5) : "#bbbbbb";
      // delta_c increases upwards.
      s << "<rect x=\"" << left + cell * static_cast<double>(i) << "\" y=\""
        << top + h - cell * static_cast<double>(j + 1) << "\" width=\"" << cell << "\" height=\"" << cell
        << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  auto label = [&](double x, double y, const std::string& text, const char* anchor) {
    s << "<text x=\"" << x << "\" y=\"" << y << "\" text-anchor=\"" << anchor << "\">" << text << "</text>\n";
  };
  label(left, top + h + 15, format_number(grid.delta_axis.front(), 4), "start");
  label(left + w, top + h + 15, format_number(grid.delta_axis.back(), 4), "end");
  label(left + w / 2, top + h + 32, "Delta [nu]", "middle");
  label(left - 5, top + h, format_number(grid.delta_c_axis.front(), 4), "end");
  label(left - 5, top + 10, format_number(grid.delta_c_axis.back(), 4), "end");
  label(left - 5, top + h / 2, "delta_c [nu]", "end");

  const double bx = left + w + 20;
  for (int k = 0; k < 50; ++k) {
    s << "<rect x=\"" << bx << "\" y=\"" << top + h - (k + 1) * h / 50 << "\" width=\"14\" height=\"" << h / 50 + 0.5
      << "\" fill=\"" << ramp(k / 49.0) << "\"/>\n";
  }
  label(bx + 18, top + 10, format_number(hi, 4), "start");
  label(bx + 18, top + h, format_number(lo, 4), "start");
  s << "</svg>\n";
  return s.str();
}

// -- Omega scans -----------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLocatorStep = 5e-4;

struct Candidate {
  double value;  // objective to minimize
  double delta;
};

double objective(const RateResult& r, SweepQuantity q) {
  if (q == SweepQuantity::w) return std::isfinite(r.w) ? -r.w : kInf;
  return r.w > 0.0 && std::isfinite(r.n_st) ? r.n_st : kInf;
}

// Polishes a grid extremum along delta at fixed delta_c. The perturbative
// rates are cheap enough to scan the whole delta range finely and locate the
// narrow sideband feature; the requested method is then minimized by Brent's
// method in a bracket around it.
Candidate refine_along_delta(const ModelParams& base, double delta_c, double lo, double hi, SweepQuantity q,
                             const SweepOptions& o) {
  const int count = std::max(3, static_cast<int>(std::ceil((hi - lo) / kLocatorStep)) + 1);
  const auto axis = linspace(lo, hi, count);
  std::vector<double> f(axis.size(), kInf);
  for (std::size_t k = 0; k < axis.size(); ++k) {
    try {
      f[k] = objective(evaluate_cell(base, axis[k], delta_c, CellMethod::perturbative), q);
    } catch (const Error&) {
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  if (!std::isfinite(f[best])) return {kInf, axis[best]};

  // Bracket: the region within a factor 2 of the located extremum (at least
  // two locator steps) on either side.
  std::size_t a = best, b = best;
  const double cut = q == SweepQuantity::w ? 0.5 * f[best] : 2.0 * f[best];
  while (a > 0 && f[a - 1] <= cut) --a;
  while (b + 1 < axis.size() && f[b + 1] <= cut) ++b;
  const double width = std::max(2.0 * kLocatorStep, axis[b] - axis[a]);
  const double blo = std::max(lo, axis[best] - width), bhi = std::min(hi, axis[best] + width);

  auto eval = [&](double d) {
    try {
      return objective(evaluate_cell(base, d, delta_c, o.method, o.numeric), q);
    } catch (const Error&) {
      return kInf;
    }
  };
  Candidate c{eval(axis[best]), axis[best]};
  boost::uintmax_t iters = 40;
  const auto [x, fx] = boost::math::tools::brent_find_minima(eval, blo, bhi, 24, iters);
  if (fx < c.value) c = {fx, x};
  return c;
}

}  // namespace

OmegaScan run_omega_scan(const ModelParams& base, const std::vector<double>& omega_axis, const GridSpec& spec,
                         const SweepOptions& options) {
  if (omega_axis.empty()) throw std::invalid_argument("run_omega_scan: empty omega axis");
  for (std::size_t k = 0; k < omega_axis.size(); ++k) {
    if (!(omega_axis[k] > 0.0)) throw std::invalid_argument("run_omega_scan: omega values must be positive");
    if (k > 0 && !(omega_axis[k] > omega_axis[k - 1]))
      throw std::invalid_argument("run_omega_scan: omega axis must be strictly increasing");
  }
  const auto deltas = linspace(spec.delta_min, spec.delta_max, spec.delta_count);
  const auto deltas_c = linspace(spec.delta_c_min, spec.delta_c_max, spec.delta_c_count);

  OmegaScan scan;
  scan.method = options.method;
  scan.nu_si = base.nu_si;
  for (double omega : omega_axis) {
    ModelParams p = base;
    p.omega = omega;
    const SweepGrid grid = run_sweep(p, deltas, deltas_c, options);
    const Extrema ex = find_extrema(grid);

    OmegaPoint pt;
    pt.omega = omega;
    pt.failed_cells = grid.failures();
    const auto& cw = grid.cell(ex.max_w.i, ex.max_w.j);
    pt.max_w = cw.rates.w;
    pt.max_w_delta = deltas[ex.max_w.i];
    pt.max_w_delta_c = deltas_c[ex.max_w.j];
    const auto& cn = grid.cell(ex.min_n_st.i, ex.min_n_st.j);
    pt.min_n_st = cn.rates.n_st;
    pt.min_n_st_delta = deltas[ex.min_n_st.i];
    pt.min_n_st_delta_c = deltas_c[ex.min_n_st.j];

    if (spec.refine && deltas.size() > 1) {
      const Candidate w = refine_along_delta(p, pt.max_w_delta_c, deltas.front(), deltas.back(), SweepQuantity::w, options);
      if (-w.value > pt.max_w) {
        pt.max_w = -w.value;
        pt.max_w_delta = w.delta;
      }
      const Candidate n =
          refine_along_delta(p, pt.min_n_st_delta_c, deltas.front(), deltas.back(), SweepQuantity::n_st, options);
      if (n.value < pt.min_n_st) {
        pt.min_n_st = n.value;
        pt.min_n_st_delta = n.delta;
      }
    }
    scan.points.push_back(pt);
  }
  return scan;
}

void write_omega_scan_csv(std::ostream& os, const OmegaScan& scan) {
  os << "omega_nu,max_w_nu,max_w_si_per_s,max_w_delta_nu,max_w_delta_c_nu,min_n_st,min_n_st_delta_nu,"
        "min_n_st_delta_c_nu,failed_cells\n";
  for (const auto& p : scan.points) {
    os << format_number(p.omega) << ',' << format_number(p.max_w) << ',' << format_number(p.max_w * scan.nu_si) << ','
       << format_number(p.max_w_delta) << ',' << format_number(p.max_w_delta_c) << ',' << format_number(p.min_n_st)
       << ',' << format_number(p.min_n_st_delta) << ',' << format_number(p.min_n_st_delta_c) << ','
       << p.failed_cells << '\n';
  }
}

}  // namespace cavcool
