#include "cavcool/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "cavcool/error.hpp"
#include "cavcool/io.hpp"

namespace cavcool {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::rates: return "rates";
    case Mode::sweep: return "sweep";
    case Mode::omega_scan: return "omega-scan";
    case Mode::molecule: return "molecule";
    case Mode::convergence: return "convergence";
  }
  return "?";
}

std::string_view to_string(MethodSelector m) {
  switch (m) {
    case MethodSelector::numeric: return "numeric";
    case MethodSelector::perturbative: return "perturbative";
    case MethodSelector::both: return "both";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::simulate, Mode::rates, Mode::sweep, Mode::omega_scan, Mode::molecule, Mode::convergence})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

MethodSelector parse_method(std::string_view s) {
  for (MethodSelector m : {MethodSelector::numeric, MethodSelector::perturbative, MethodSelector::both})
    if (to_string(m) == s) return m;
  throw ConfigError("unknown method '" + std::string(s) + "' (expected numeric, perturbative or both)");
}

NumericOptions RunConfig::numeric_options() const {
  NumericOptions o;
  o.dt = numerics.dt;
  o.initial = numerics.initial;
  o.samples = numerics.samples;
  o.horizon_factor = numerics.horizon_factor;
  o.max_attempts = numerics.max_attempts;
  return o;
}

SweepOptions RunConfig::sweep_options(CellMethod m) const {
  SweepOptions o;
  o.method = m;
  o.workers = workers;
  o.numeric = numeric_options();
  return o;
}

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Raw structure: section name -> keys. The unnamed leading section is "".
struct Document {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_lines;
};

Document tokenize(std::string_view text) {
  Document doc;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError("empty section name", lineno);
      if (doc.section_lines.count(current)) throw ConfigError("duplicate section [" + current + "]", lineno);
      doc.section_lines[current] = lineno;
      doc.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", lineno);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", lineno);
    auto& sec = doc.sections[current];
    if (sec.count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
    sec[key] = {value, lineno};
  }
  return doc;
}

double to_double(const Entry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("'" + key + "': not a finite number: '" + e.value + "'", e.line);
  return v;
}

long to_long(const Entry& e, const std::string& key) {
  const char* s = e.value.c_str();
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || errno == ERANGE)
    throw ConfigError("'" + key + "': not an integer: '" + e.value + "'", e.line);
  return v;
}

bool to_bool(const Entry& e, const std::string& key) {
  if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
  if (e.value == "false" || e.value == "no" || e.value == "0") return false;
  throw ConfigError("'" + key + "': expected true or false", e.line);
}

std::vector<std::string> split_list(const Entry& e) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(e.value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list element", e.line);
    out.push_back(item);
  }
  return out;
}

// Consumes keys of one section, flagging the unknown ones afterwards.
class Reader {
 public:
  Reader(const Section* s, std::string name) : s_(s), name_(std::move(name)) {}

  bool present() const { return s_ != nullptr; }

  const Entry* find(const std::string& key) {
    if (!s_) return nullptr;
    auto it = s_->find(key);
    if (it == s_->end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  void number(const std::string& key, double& out) {
    if (auto* e = find(key)) out = to_double(*e, key);
  }
  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (auto* e = find(key)) out = static_cast<Int>(to_long(*e, key));
  }
  void boolean(const std::string& key, bool& out) {
    if (auto* e = find(key)) out = to_bool(*e, key);
  }
  void text(const std::string& key, std::string& out) {
    if (auto* e = find(key)) out = e->value;
  }

  void reject_unknown() const {
    if (!s_) return;
    for (const auto& [key, e] : *s_)
      if (!used_.count(key))
        throw ConfigError("unknown key '" + key + "'" + (name_.empty() ? "" : " in [" + name_ + "]"), e.line);
  }

  int first_line() const {
    int line = 0;
    if (s_)
      for (const auto& [k, e] : *s_) line = line == 0 ? e.line : std::min(line, e.line);
    return line;
  }

 private:
  const Section* s_;
  std::string name_;
  std::set<std::string> used_;
};

const char* const kParamKeys[] = {"delta", "delta_c", "omega", "g",       "kappa", "gamma",
                                  "eta",   "phi",     "theta_l", "theta_c", "nu_si"};

void read_params(Reader& r, ModelParams& p) {
  r.number("delta", p.delta);
  r.number("delta_c", p.delta_c);
  r.number("omega", p.omega);
  r.number("g", p.g);
  r.number("kappa", p.kappa);
  r.number("gamma", p.gamma);
  r.number("eta", p.eta);
  r.number("phi", p.phi);
  r.number("theta_l", p.theta_l);
  r.number("theta_c", p.theta_c);
  r.number("nu_si", p.nu_si);
}

std::filesystem::path resolve_path(const std::string& value, const std::filesystem::path& base_dir) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base_dir / p;
}

void require_file(const std::filesystem::path& p, int line) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) throw ConfigError("file not found: " + p.string(), line);
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const Document doc = tokenize(text);
  auto section = [&](const std::string& name) -> const Section* {
    auto it = doc.sections.find(name);
    return it == doc.sections.end() ? nullptr : &it->second;
  };
  static const std::set<std::string> known = {"",        "params", "molecule", "trap",        "cavity", "drive",
                                              "geometry", "numerics", "sweep", "omega_scan", "convergence", "output"};
  for (const auto& [name, line] : doc.section_lines)
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]", line);

  RunConfig cfg;
  Reader root(section(""), "");
  const Entry* mode = root.find("mode");
  if (!mode) throw ConfigError("mode required");
  cfg.mode = [&] {
    try {
      return parse_mode(mode->value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), mode->line);
    }
  }();
  cfg.method = cfg.mode == Mode::rates ? MethodSelector::both : MethodSelector::numeric;
  if (const Entry* m = root.find("method")) {
    try {
      cfg.method = parse_method(m->value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), m->line);
    }
  }

  // Direct block: parameter keys at top level and/or in [params].
  Reader params(section("params"), "params");
  bool direct = params.present();
  int direct_line = params.first_line();
  for (const char* k : kParamKeys)
    if (section("") && section("")->count(k)) {
      direct = true;
      const int l = section("")->at(k).line;
      direct_line = direct_line == 0 ? l : std::min(direct_line, l);
    }
  read_params(root, cfg.params);
  read_params(params, cfg.params);

  Reader molecule(section("molecule"), "molecule"), trap(section("trap"), "trap"), cavity(section("cavity"), "cavity"),
      drive(section("drive"), "drive"), geometry(section("geometry"), "geometry");
  const bool physical = molecule.present() && cfg.mode != Mode::molecule;

  auto read_trap_cavity = [&](PhysicalSpec& ps) {
    trap.number("nu_si", ps.trap.nu_si);
    trap.number("depth_uk", ps.trap.depth_uk);
    trap.number("wavelength_nm", ps.trap.wavelength_nm);
    cavity.number("field_amplitude", ps.cavity.field_amplitude);
    cavity.number("kappa_si", ps.cavity.kappa_si);
    if (!(ps.trap.nu_si > 0.0)) throw ConfigError("trap 'nu_si' must be > 0", trap.first_line());
    if (!(ps.cavity.field_amplitude > 0.0) || !(ps.cavity.kappa_si > 0.0))
      throw ConfigError("cavity 'field_amplitude' and 'kappa_si' must be > 0", cavity.first_line());
  };

  if (cfg.mode == Mode::molecule) {
    if (direct) throw ConfigError("mode molecule takes no nu-unit parameter block", direct_line);
    for (Reader* r : {&drive, &geometry})
      if (r->present()) throw ConfigError("mode molecule takes no [drive] or [geometry] section", r->first_line());
    PhysicalSpec ps;
    molecule.text("name", ps.molecule);  // optional filter
    std::string table;
    molecule.text("table", table);
    ps.table = table.empty() ? default_molecule_table_path() : resolve_path(table, base_dir);
    require_file(ps.table, molecule.first_line());
    read_trap_cavity(ps);
    cfg.molecule_table = ps.table;
    cfg.physical = ps;
  } else if (physical) {
    if (direct)
      throw ConfigError("both a nu-unit parameter block and a [molecule] block are present; use exactly one",
                        direct_line);
    PhysicalSpec ps;
    molecule.text("name", ps.molecule);
    if (ps.molecule.empty()) throw ConfigError("[molecule] requires 'name'", molecule.first_line());
    std::string table;
    molecule.text("table", table);
    ps.table = table.empty() ? default_molecule_table_path() : resolve_path(table, base_dir);
    require_file(ps.table, molecule.first_line());
    const auto rows = load_molecule_table(ps.table);
    const MoleculeSpec* spec = nullptr;
    try {
      spec = &find_molecule(rows, ps.molecule);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), molecule.first_line());
    }
    read_trap_cavity(ps);
    drive.number("omega", ps.drive.omega);
    drive.number("delta", ps.drive.delta);
    drive.number("delta_c", ps.drive.delta_c);
    geometry.number("phi", ps.geometry.phi);
    geometry.number("theta_l", ps.geometry.theta_l);
    geometry.number("theta_c", ps.geometry.theta_c);
    try {
      cfg.params = to_model_params(*spec, ps.trap, ps.cavity, ps.drive, ps.geometry);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), molecule.first_line());
    }
    cfg.physical = ps;
  } else {
    for (Reader* r : {&trap, &cavity, &drive, &geometry})
      if (r->present()) throw ConfigError("physical-spec sections require a [molecule] section", r->first_line());
    if (!direct) throw ConfigError("a parameter block is required: nu-unit keys or a [molecule] section");
  }

  Reader numerics(section("numerics"), "numerics");
  auto& n = cfg.numerics;
  numerics.number("dt", n.dt);
  numerics.number("t_end", n.t_end);
  numerics.integer("n_trap", n.n_trap);
  numerics.integer("record_every", n.record_every);
  numerics.integer("samples", n.samples);
  numerics.number("horizon_factor", n.horizon_factor);
  numerics.integer("max_attempts", n.max_attempts);
  if (const Entry* e = numerics.find("initial")) {
    if (e->value == "thermal")
      n.initial.kind = InitialState::Kind::thermal;
    else if (e->value == "fock")
      n.initial.kind = InitialState::Kind::fock;
    else
      throw ConfigError("'initial': expected thermal or fock", e->line);
  }
  numerics.number("initial_mean_n", n.initial.mean_n);
  numerics.integer("initial_fock_n", n.initial.fock_n);

  Reader sweep(section("sweep"), "sweep");
  sweep.number("delta_min", cfg.grid.delta_min);
  sweep.number("delta_max", cfg.grid.delta_max);
  sweep.integer("delta_count", cfg.grid.delta_count);
  sweep.number("delta_c_min", cfg.grid.delta_c_min);
  sweep.number("delta_c_max", cfg.grid.delta_c_max);
  sweep.integer("delta_c_count", cfg.grid.delta_c_count);
  sweep.integer("workers", cfg.workers);

  Reader oscan(section("omega_scan"), "omega_scan");
  if (const Entry* e = oscan.find("omegas")) {
    cfg.omegas.clear();
    for (const auto& item : split_list(*e)) cfg.omegas.push_back(to_double(Entry{item, e->line}, "omegas"));
    for (std::size_t k = 0; k < cfg.omegas.size(); ++k)
      if (!(cfg.omegas[k] > 0.0) || (k > 0 && !(cfg.omegas[k] > cfg.omegas[k - 1])))
        throw ConfigError("'omegas' must be positive and strictly increasing", e->line);
  }
  oscan.boolean("refine", cfg.grid.refine);

  Reader conv(section("convergence"), "convergence");
  if (const Entry* e = conv.find("n_trap")) {
    cfg.convergence_n_traps.clear();
    for (const auto& item : split_list(*e)) {
      const long v = to_long(Entry{item, e->line}, "n_trap");
      if (v < 3) throw ConfigError("convergence 'n_trap' values must be >= 3", e->line);
      cfg.convergence_n_traps.push_back(static_cast<int>(v));
    }
  }
  conv.number("tolerance", cfg.convergence_tolerance);

  Reader output(section("output"), "output");
  if (const Entry* e = output.find("dir")) cfg.output.dir = resolve_path(e->value, base_dir);
  output.boolean("svg", cfg.output.svg);

  for (Reader* r : {&root, &params, &molecule, &trap, &cavity, &drive, &geometry, &numerics, &sweep, &oscan, &conv,
                    &output})
    r->reject_unknown();

  // Range checks.
  auto line_of = [&](const char* sec, const char* key) {
    const Section* s = section(sec);
    if (s)
      if (auto it = s->find(key); it != s->end()) return it->second.line;
    return 0;
  };
  if (n.dt < 0.0) throw ConfigError("'dt' must be >= 0", line_of("numerics", "dt"));
  if (n.t_end < 0.0) throw ConfigError("'t_end' must be >= 0", line_of("numerics", "t_end"));
  if (n.n_trap < 2) throw ConfigError("'n_trap' must be >= 2", line_of("numerics", "n_trap"));
  if (n.record_every < 0) throw ConfigError("'record_every' must be >= 0", line_of("numerics", "record_every"));
  if (n.samples < 10) throw ConfigError("'samples' must be >= 10", line_of("numerics", "samples"));
  if (!(n.horizon_factor > 0.0)) throw ConfigError("'horizon_factor' must be > 0", line_of("numerics", "horizon_factor"));
  if (n.max_attempts < 1) throw ConfigError("'max_attempts' must be >= 1", line_of("numerics", "max_attempts"));
  if (n.initial.mean_n < 0.0) throw ConfigError("'initial_mean_n' must be >= 0", line_of("numerics", "initial_mean_n"));
  if (n.initial.fock_n < 0 || n.initial.fock_n >= n.n_trap)
    throw ConfigError("'initial_fock_n' must lie in [0, n_trap)", line_of("numerics", "initial_fock_n"));
  if (cfg.grid.delta_count < 1 || cfg.grid.delta_c_count < 1)
    throw ConfigError("sweep counts must be >= 1", line_of("sweep", "delta_count"));
  if (cfg.grid.delta_max < cfg.grid.delta_min || cfg.grid.delta_c_max < cfg.grid.delta_c_min)
    throw ConfigError("sweep ranges must satisfy min <= max", line_of("sweep", "delta_max"));
  if (cfg.workers < 1) throw ConfigError("'workers' must be >= 1", line_of("sweep", "workers"));
  if (!(cfg.convergence_tolerance > 0.0))
    throw ConfigError("convergence 'tolerance' must be > 0", line_of("convergence", "tolerance"));
  if (cfg.mode == Mode::simulate && !(n.t_end > 0.0))
    throw ConfigError("mode simulate requires numerics.t_end > 0", line_of("numerics", "t_end"));

  cfg.params.layout.n_trap = n.n_trap;
  if (cfg.mode != Mode::molecule) {
    try {
      cfg.params.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), direct_line);
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

std::string render_config(const RunConfig& c) {
  std::ostringstream s;
  auto kv = [&](const char* key, double v) { s << key << " = " << format_exact(v) << '\n'; };
  s << "mode = " << to_string(c.mode) << '\n';
  s << "method = " << to_string(c.method) << '\n';
  if (c.mode == Mode::molecule) {
    s << "\n[molecule]\ntable = " << std::filesystem::absolute(c.molecule_table).string() << '\n';
    if (c.physical && !c.physical->molecule.empty()) s << "name = " << c.physical->molecule << '\n';
    if (c.physical) {
      s << "\n[trap]\n";
      kv("nu_si", c.physical->trap.nu_si);
      s << "\n[cavity]\n";
      kv("field_amplitude", c.physical->cavity.field_amplitude);
      kv("kappa_si", c.physical->cavity.kappa_si);
    }
  } else {
    if (c.physical) s << "# resolved from molecule " << c.physical->molecule << '\n';
    s << "\n[params]\n";
    const auto& p = c.params;
    kv("delta", p.delta);
    kv("delta_c", p.delta_c);
    kv("omega", p.omega);
    kv("g", p.g);
    kv("kappa", p.kappa);
    kv("gamma", p.gamma);
    kv("eta", p.eta);
    kv("phi", p.phi);
    kv("theta_l", p.theta_l);
    kv("theta_c", p.theta_c);
    kv("nu_si", p.nu_si);
  }
  const auto& n = c.numerics;
  s << "\n[numerics]\n";
  kv("dt", n.dt);
  kv("t_end", n.t_end);
  s << "n_trap = " << n.n_trap << '\n';
  s << "record_every = " << n.record_every << '\n';
  s << "samples = " << n.samples << '\n';
  s << "initial = " << (n.initial.kind == InitialState::Kind::fock ? "fock" : "thermal") << '\n';
  kv("initial_mean_n", n.initial.mean_n);
  s << "initial_fock_n = " << n.initial.fock_n << '\n';
  kv("horizon_factor", n.horizon_factor);
  s << "max_attempts = " << n.max_attempts << '\n';

  s << "\n[sweep]\n";
  kv("delta_min", c.grid.delta_min);
  kv("delta_max", c.grid.delta_max);
  s << "delta_count = " << c.grid.delta_count << '\n';
  kv("delta_c_min", c.grid.delta_c_min);
  kv("delta_c_max", c.grid.delta_c_max);
  s << "delta_c_count = " << c.grid.delta_c_count << '\n';
  s << "workers = " << c.workers << '\n';

  s << "\n[omega_scan]\nomegas = ";
  for (std::size_t k = 0; k < c.omegas.size(); ++k) s << (k ? ", " : "") << format_exact(c.omegas[k]);
  s << "\nrefine = " << (c.grid.refine ? "true" : "false") << '\n';

  s << "\n[convergence]\nn_trap = ";
  for (std::size_t k = 0; k < c.convergence_n_traps.size(); ++k) s << (k ? ", " : "") << c.convergence_n_traps[k];
  s << '\n';
  kv("tolerance", c.convergence_tolerance);

  s << "\n[output]\ndir = " << std::filesystem::absolute(c.output.dir).string() << '\n';
  s << "svg = " << (c.output.svg ? "true" : "false") << '\n';
  return s.str();
}

}  // namespace cavcool
