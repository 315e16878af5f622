// casimir: command-line front end for the induced-force calculators.
//
// Subcommands: plates, particles, oscillator, phase-map, selftest.
// Values cross the CLI boundary in SI (meters, kelvin, rad/s, Pa, J, N)
// unless a subcommand's natural-units mode says otherwise; internally all
// computations run in inverse-length units with hbar*c = 1.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "casimir/common.hpp"
#include "casimir/halfplanes.hpp"
#include "casimir/materials.hpp"
#include "casimir/numerics.hpp"
#include "casimir/oscillator.hpp"
#include "casimir/particles.hpp"
#include "casimir/selftest.hpp"

namespace {

using json = nlohmann::ordered_json;
using casimir::Sign;
using casimir::constants::hbar_c_si;
using casimir::constants::k_boltzmann_si;
using casimir::constants::speed_of_light_si;

constexpr const char* kVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitSelftestFailed = 3;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string fmt_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Output table: cells carry both display text (CSV) and a typed JSON value.

struct Cell {
  std::string text;
  json value;
};

Cell num_cell(double v) { return {fmt_double(v), json(v)}; }
Cell int_cell(long v) { return {std::to_string(v), json(v)}; }
Cell text_cell(const std::string& s) { return {s, json(s)}; }
Cell bool_cell(bool b) { return {b ? "true" : "false", json(b)}; }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

void write_table(const Table& table, const json& config_echo, const std::string& format,
                 const std::string& output_path) {
  std::ostringstream out;
  if (format == "csv") {
    for (size_t i = 0; i < table.header.size(); ++i)
      out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
      for (size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << row[i].text;
      out << "\n";
    }
  } else {
    json doc;
    doc["metadata"] = {{"version", kVersion}, {"config", config_echo}};
    json rows = json::array();
    for (const auto& row : table.rows) {
      json obj;
      for (size_t i = 0; i < row.size(); ++i) obj[table.header[i]] = row[i].value;
      rows.push_back(std::move(obj));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << "\n";
  }

  if (output_path.empty() || output_path == "-") {
    std::cout << out.str();
  } else {
    std::ofstream file(output_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file '" + output_path + "'");
    file << out.str();
  }
}

// ---------------------------------------------------------------------------
// Sweep grammar: start:stop:count with optional :log / :linear suffix.

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  bool log = false;
};

SweepRange parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4)
    throw CLI::ValidationError("range", "expected start:stop:count[:log|:linear], got '" + text + "'");

  SweepRange r;
  try {
    r.start = std::stod(parts[0]);
    r.stop = std::stod(parts[1]);
    r.count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw CLI::ValidationError("range", "non-numeric field in '" + text + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      r.log = true;
    } else if (parts[3] != "linear") {
      throw CLI::ValidationError("range", "spacing must be 'log' or 'linear' in '" + text + "'");
    }
  }
  if (r.count < 1) throw CLI::ValidationError("range", "count must be >= 1");
  if (r.start < 0.0 || r.stop < 0.0)
    throw CLI::ValidationError("range", "sweep bounds must be non-negative");
  if (r.log && (r.start <= 0.0 || r.stop <= 0.0))
    throw CLI::ValidationError("range", "log spacing requires strictly positive bounds");
  return r;
}

std::vector<double> expand_range(const SweepRange& r) {
  std::vector<double> values(static_cast<size_t>(r.count));
  if (r.count == 1) {
    values[0] = r.start;
    return values;
  }
  for (int i = 0; i < r.count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(r.count - 1);
    values[static_cast<size_t>(i)] =
        r.log ? r.start * std::pow(r.stop / r.start, t) : r.start + (r.stop - r.start) * t;
  }
  return values;
}

struct SweepSpec {
  std::string var;
  SweepRange range;
};

SweepSpec parse_sweep(const std::string& text, const std::vector<std::string>& allowed) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw CLI::ValidationError("sweep", "expected VAR=start:stop:count[:log], got '" + text + "'");
  SweepSpec spec;
  spec.var = text.substr(0, eq);
  bool ok = false;
  for (const auto& name : allowed) ok = ok || name == spec.var;
  if (!ok)
    throw CLI::ValidationError("sweep", "unknown sweep variable '" + spec.var + "'");
  spec.range = parse_range(text.substr(eq + 1));
  return spec;
}

// ---------------------------------------------------------------------------
// Shared option groups.

struct CommonOptions {
  std::string format = "csv";
  std::string output;
  int threads = 0;  // 0: resolve from CASIMIR_THREADS, fallback 1
  casimir::numerics::QuadratureConfig quad;

  int resolved_threads() const {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("CASIMIR_THREADS")) {
      const int n = std::atoi(env);
      if (n > 0) return n;
    }
    return 1;
  }
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--output", opts.output, "Output path ('-' or empty: stdout)");
  cmd->add_option("--threads", opts.threads,
                  "Worker threads for sweeps (default: CASIMIR_THREADS or 1)");
  cmd->add_option("--rel-tol", opts.quad.rel_tol, "Quadrature relative tolerance")
      ->capture_default_str();
  cmd->add_option("--abs-tol", opts.quad.abs_tol, "Quadrature absolute tolerance")
      ->capture_default_str();
  cmd->add_option("--max-subdivisions", opts.quad.max_subdivisions,
                  "Adaptive quadrature subdivision limit")
      ->capture_default_str();
  cmd->add_option("--sum-truncation-rel", opts.quad.sum_truncation_rel,
                  "Matsubara sum truncation threshold")
      ->capture_default_str();
  cmd->add_option("--max-matsubara-terms", opts.quad.max_matsubara_terms,
                  "Matsubara sum term limit")
      ->capture_default_str();
}

json quad_echo(const casimir::numerics::QuadratureConfig& q) {
  return {{"rel_tol", q.rel_tol},
          {"abs_tol", q.abs_tol},
          {"max_subdivisions", q.max_subdivisions},
          {"sum_truncation_rel", q.sum_truncation_rel},
          {"max_matsubara_terms", q.max_matsubara_terms}};
}

// Runs `work(i)` for i in [0, n) across the requested worker count; each
// index writes only its own output slot, so assembly stays in input order.
void parallel_rows(size_t n, int threads, const std::function<void(size_t)>& work) {
  const int workers = std::max(1, threads);
  if (workers == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (size_t i = static_cast<size_t>(w); i < n; i += static_cast<size_t>(workers)) work(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

casimir::numerics::ThermalState thermal_from_kelvin(double temp_k) {
  if (temp_k < 0.0) throw CLI::ValidationError("temp", "temperature must be >= 0");
  if (temp_k == 0.0) return casimir::numerics::ThermalState::zero_temperature();
  return casimir::numerics::ThermalState::finite(1.0 / (k_boltzmann_si * temp_k), hbar_c_si);
}

std::string sign_text(Sign s, bool plate_style) {
  return casimir::sign_label(s, plate_style ? "zero" : "none");
}

// ---------------------------------------------------------------------------
// plates

struct PlatesArgs {
  CommonOptions common;
  std::string eps1 = "constant:1", mu1 = "constant:1";
  std::string eps2 = "constant:1", mu2 = "constant:1";
  double gap = 1e-6;
  double temp = 0.0;
  std::string sweep;
};

int run_plates(const PlatesArgs& args) {
  const double freq_scale = 1.0 / speed_of_light_si;  // rad/s -> 1/m
  casimir::halfplanes::HalfSpacePair pair;
  pair.plate1 = {casimir::materials::parse_response_model(args.eps1, freq_scale),
                 casimir::materials::parse_response_model(args.mu1, freq_scale)};
  pair.plate2 = {casimir::materials::parse_response_model(args.eps2, freq_scale),
                 casimir::materials::parse_response_model(args.mu2, freq_scale)};
  pair.gap = args.gap;
  pair.validate();
  if (pair.plate1.below_unity_warning() || pair.plate2.below_unity_warning())
    std::cerr << "warning: response below 1 at some frequencies; outside the "
                 "model's usual assumptions\n";

  std::vector<double> gaps{args.gap};
  std::vector<double> temps{args.temp};
  if (!args.sweep.empty()) {
    const SweepSpec spec = parse_sweep(args.sweep, {"gap", "temp"});
    (spec.var == "gap" ? gaps : temps) = expand_range(spec.range);
  }

  struct Row {
    double gap, temp;
    casimir::halfplanes::ForceResult force;
    bool failed = false;
    std::string error;
  };
  std::vector<Row> rows;
  for (double g : gaps)
    for (double t : temps) rows.push_back({g, t, {}, false, {}});

  parallel_rows(rows.size(), args.common.resolved_threads(), [&](size_t i) {
    Row& row = rows[i];
    try {
      casimir::halfplanes::HalfSpacePair p = pair;
      p.gap = row.gap;
      row.force = casimir::halfplanes::force_per_area(p, thermal_from_kelvin(row.temp),
                                                      args.common.quad);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  });

  Table table;
  table.header = {"gap_m", "temp_K", "force_Pa", "sign", "tm_Pa", "te_Pa",
                  "matsubara_terms", "converged"};
  bool all_converged = true;
  for (const Row& row : rows) {
    if (row.failed) {
      std::cerr << "error: " << row.error << "\n";
      return kExitUsage;
    }
    const auto& f = row.force;
    all_converged = all_converged && f.diagnostics.converged;
    table.rows.push_back({num_cell(row.gap), num_cell(row.temp), num_cell(f.value * hbar_c_si),
                          text_cell(sign_text(f.sign, true)), num_cell(f.tm * hbar_c_si),
                          num_cell(f.te * hbar_c_si), int_cell(f.diagnostics.matsubara_terms),
                          bool_cell(f.diagnostics.converged)});
  }

  json echo = {{"subcommand", "plates"},
               {"eps1", pair.plate1.eps.describe()},
               {"mu1", pair.plate1.mu.describe()},
               {"eps2", pair.plate2.eps.describe()},
               {"mu2", pair.plate2.mu.describe()},
               {"gap", args.gap},
               {"temp", args.temp},
               {"sweep", args.sweep},
               {"quadrature", quad_echo(args.common.quad)}};
  write_table(table, echo, args.common.format, args.common.output);
  return all_converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// particles

struct ParticlesArgs {
  CommonOptions common;
  std::string alpha1e = "constant:0", alpha1h = "constant:0";
  std::string alpha2e = "constant:0", alpha2h = "constant:0";
  double r = 1e-6;
  double temp = 0.0;
  double beta = 0.0;  // natural-units beta*hbar*c; 0 means zero temperature
  bool natural = false;
  std::string sweep;
};

int run_particles(const ParticlesArgs& args) {
  const double freq_scale = args.natural ? 1.0 : 1.0 / speed_of_light_si;
  casimir::materials::ParticleSpec p1{
      casimir::materials::parse_response_model(args.alpha1e, freq_scale),
      casimir::materials::parse_response_model(args.alpha1h, freq_scale)};
  casimir::materials::ParticleSpec p2{
      casimir::materials::parse_response_model(args.alpha2e, freq_scale),
      casimir::materials::parse_response_model(args.alpha2h, freq_scale)};
  p1.validate();
  p2.validate();

  auto thermal_for = [&](double temp) {
    if (args.natural) {
      if (args.beta > 0.0) return casimir::numerics::ThermalState::finite(args.beta);
      if (temp == 0.0) return casimir::numerics::ThermalState::zero_temperature();
      return casimir::numerics::ThermalState::finite(1.0 / temp);  // k_B = hbar*c = 1
    }
    return thermal_from_kelvin(temp);
  };

  std::vector<double> rs{args.r};
  std::vector<double> temps{args.temp};
  if (!args.sweep.empty()) {
    const SweepSpec spec = parse_sweep(args.sweep, {"r", "temp"});
    (spec.var == "r" ? rs : temps) = expand_range(spec.range);
  }

  const double energy_unit = args.natural ? 1.0 : hbar_c_si;  // -> J (lengths in m)

  struct Row {
    double r, temp;
    casimir::particles::PairFreeEnergy energy;
    casimir::particles::ForceResult force;
    bool failed = false;
    std::string error;
  };
  std::vector<Row> rows;
  for (double r : rs)
    for (double t : temps) rows.push_back({r, t, {}, {}, false, {}});

  parallel_rows(rows.size(), args.common.resolved_threads(), [&](size_t i) {
    Row& row = rows[i];
    try {
      casimir::particles::PairGeometry g{row.r, thermal_for(row.temp)};
      row.energy = g.thermal.is_zero_temperature()
                       ? casimir::particles::zero_t_free_energy(p1, p2, row.r)
                       : casimir::particles::free_energy(p1, p2, g, args.common.quad);
      row.force = casimir::particles::pair_force(p1, p2, g, args.common.quad);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  });

  Table table;
  table.header = {"r", "temp", "f_ee", "f_hh", "f_eh", "f_he", "total", "force", "sign",
                  "converged"};
  bool all_converged = true;
  for (const Row& row : rows) {
    if (row.failed) {
      std::cerr << "error: " << row.error << "\n";
      return kExitUsage;
    }
    all_converged = all_converged && row.energy.converged && row.force.converged;
    table.rows.push_back({num_cell(row.r), num_cell(row.temp),
                          num_cell(row.energy.f_ee * energy_unit),
                          num_cell(row.energy.f_hh * energy_unit),
                          num_cell(row.energy.f_eh * energy_unit),
                          num_cell(row.energy.f_he * energy_unit),
                          num_cell(row.energy.total * energy_unit),
                          num_cell(row.force.value * energy_unit),
                          text_cell(sign_text(row.force.sign, false)),
                          bool_cell(row.energy.converged && row.force.converged)});
  }

  json echo = {{"subcommand", "particles"},
               {"alpha1e", p1.alpha_e.describe()},
               {"alpha1h", p1.alpha_h.describe()},
               {"alpha2e", p2.alpha_e.describe()},
               {"alpha2h", p2.alpha_h.describe()},
               {"r", args.r},
               {"temp", args.temp},
               {"beta", args.beta},
               {"natural_units", args.natural},
               {"sweep", args.sweep},
               {"quadrature", quad_echo(args.common.quad)}};
  write_table(table, echo, args.common.format, args.common.output);
  return all_converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// oscillator

struct OscillatorArgs {
  CommonOptions common;
  std::string mode = "tm";
  double a1 = 1.0, a2 = 1.0, a3 = 1.0;
  double c = 0.0;
  double beta = 1.0;
  std::string sweep;
};

int run_oscillator(const OscillatorArgs& args) {
  casimir::oscillator::OscillatorTriplet triplet;
  triplet.a1 = args.a1;
  triplet.a2 = args.a2;
  triplet.a3 = args.a3;
  triplet.c = args.c;
  if (args.mode == "tm") {
    triplet.mode = casimir::oscillator::CouplingMode::tm_analog;
  } else if (args.mode == "te") {
    triplet.mode = casimir::oscillator::CouplingMode::te_analog;
  } else if (args.mode == "mixed") {
    triplet.mode = casimir::oscillator::CouplingMode::mixed;
  } else {
    throw CLI::ValidationError("mode", "must be tm, te, or mixed");
  }
  triplet.validate();

  std::vector<double> cs{args.c};
  std::vector<double> betas{args.beta};
  if (!args.sweep.empty()) {
    const SweepSpec spec = parse_sweep(args.sweep, {"c", "beta"});
    (spec.var == "c" ? cs : betas) = expand_range(spec.range);
  }

  struct Row {
    double c, beta;
    casimir::oscillator::InducedInteraction result;
    bool failed = false;
    std::string error;
  };
  std::vector<Row> rows;
  for (double c : cs)
    for (double b : betas) rows.push_back({c, b, {}, false, {}});

  parallel_rows(rows.size(), args.common.resolved_threads(), [&](size_t i) {
    Row& row = rows[i];
    try {
      casimir::oscillator::OscillatorTriplet t = triplet;
      t.c = row.c;
      row.result = casimir::oscillator::induced_free_energy_and_sign(
          t, casimir::numerics::ThermalState::finite(row.beta), args.common.quad);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  });

  Table table;
  table.header = {"mode", "a1", "a2", "a3", "c", "beta", "delta_f", "sign", "terms", "converged"};
  bool all_converged = true;
  for (const Row& row : rows) {
    if (row.failed) {
      std::cerr << "error: " << row.error << "\n";
      return kExitUsage;
    }
    all_converged = all_converged && row.result.sum.converged;
    table.rows.push_back({text_cell(args.mode), num_cell(args.a1), num_cell(args.a2),
                          num_cell(args.a3), num_cell(row.c), num_cell(row.beta),
                          num_cell(row.result.delta_f),
                          text_cell(sign_text(row.result.sign, false)),
                          int_cell(row.result.sum.evaluations),
                          bool_cell(row.result.sum.converged)});
  }

  json echo = {{"subcommand", "oscillator"}, {"mode", args.mode},
               {"a1", args.a1},             {"a2", args.a2},
               {"a3", args.a3},             {"c", args.c},
               {"beta", args.beta},         {"sweep", args.sweep},
               {"quadrature", quad_echo(args.common.quad)}};
  write_table(table, echo, args.common.format, args.common.output);
  return all_converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// phase-map

struct PhaseMapArgs {
  CommonOptions common;
  std::string x = "eps1=1:10:10";
  std::string y = "mu2=1:10:10";
  std::string eps1 = "constant:1", mu1 = "constant:1";
  std::string eps2 = "constant:1", mu2 = "constant:1";
  bool diagonal = false;
  double gap = 1e-6;
  double temp = 0.0;
};

int run_phase_map(const PhaseMapArgs& args) {
  const std::vector<std::string> axis_vars = {"eps1", "mu1", "eps2", "mu2"};
  const SweepSpec xs = parse_sweep(args.x, axis_vars);
  const SweepSpec ys = parse_sweep(args.y, axis_vars);
  if (xs.var == ys.var) throw CLI::ValidationError("phase-map", "x and y must sweep different variables");

  const double freq_scale = 1.0 / speed_of_light_si;
  casimir::halfplanes::HalfSpacePair base;
  base.plate1 = {casimir::materials::parse_response_model(args.eps1, freq_scale),
                 casimir::materials::parse_response_model(args.mu1, freq_scale)};
  base.plate2 = {casimir::materials::parse_response_model(args.eps2, freq_scale),
                 casimir::materials::parse_response_model(args.mu2, freq_scale)};
  base.gap = args.gap;

  // Swept variables override the base plates with constant models; with
  // --diagonal, plate 2 mirrors plate 1 so the sweep walks equal media.
  auto make_pair = [&](double xv, double yv) {
    casimir::halfplanes::HalfSpacePair pair = base;
    auto apply = [&](const std::string& var, double value) {
      const auto model = casimir::materials::ResponseModel::constant(value);
      if (var == "eps1") pair.plate1.eps = model;
      else if (var == "mu1") pair.plate1.mu = model;
      else if (var == "eps2") pair.plate2.eps = model;
      else pair.plate2.mu = model;
    };
    apply(xs.var, xv);
    apply(ys.var, yv);
    if (args.diagonal) pair.plate2 = pair.plate1;
    return pair;
  };

  const auto grid = casimir::halfplanes::classify(
      make_pair, expand_range(xs.range), expand_range(ys.range), thermal_from_kelvin(args.temp),
      args.common.quad, args.common.resolved_threads());

  Table table;
  table.header = {xs.var, ys.var, "force_Pa", "sign", "tm_Pa", "te_Pa", "converged"};
  bool all_converged = true;
  for (const auto& point : grid) {
    all_converged = all_converged && point.force.diagnostics.converged;
    table.rows.push_back({num_cell(point.x), num_cell(point.y),
                          num_cell(point.force.value * hbar_c_si),
                          text_cell(sign_text(point.force.sign, true)),
                          num_cell(point.force.tm * hbar_c_si),
                          num_cell(point.force.te * hbar_c_si),
                          bool_cell(point.force.diagnostics.converged)});
  }

  json echo = {{"subcommand", "phase-map"},
               {"x", args.x},
               {"y", args.y},
               {"eps1", args.eps1},
               {"mu1", args.mu1},
               {"eps2", args.eps2},
               {"mu2", args.mu2},
               {"diagonal", args.diagonal},
               {"gap", args.gap},
               {"temp", args.temp},
               {"quadrature", quad_echo(args.common.quad)}};
  write_table(table, echo, args.common.format, args.common.output);
  return all_converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------------------
// selftest

int run_selftest(bool quick, bool mutate) {
  casimir::selftest::Options opts;
  opts.quick = quick;
  opts.mutate_kernel_constant = mutate;
  const auto results = casimir::selftest::run(opts);

  std::printf("%-48s %-6s %-24s %-24s %10s\n", "check", "result", "observed", "expected",
              "time_ms");
  for (const auto& r : results) {
    std::printf("%-48s %-6s %-24.16e %-24.16e %10.1f\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.observed, r.expected, r.elapsed_ms);
  }
  const bool ok = casimir::selftest::all_passed(results);
  std::printf("selftest: %s\n", ok ? "all checks passed" : "FAILURES detected");
  return ok ? kExitOk : kExitSelftestFailed;
}

// ---------------------------------------------------------------------------
// Flat-JSON config file support: values become synthetic command-line
// arguments inserted ahead of the user's flags, so explicit flags win.

std::vector<std::string> config_args(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open config file '" + path + "'");
  json doc;
  try {
    file >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config file '" + path + "': " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("config file must be a flat JSON object");

  std::vector<std::string> args;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back("--" + key);
    } else if (value.is_number()) {
      args.push_back("--" + key);
      args.push_back(fmt_param(value.get<double>()));
    } else if (value.is_string()) {
      args.push_back("--" + key);
      args.push_back(value.get<std::string>());
    } else {
      throw std::runtime_error("config key '" + key + "' must be a scalar");
    }
  }
  return args;
}

std::vector<std::string> assemble_args(int argc, char** argv) {
  std::vector<std::string> raw(argv + 1, argv + argc);

  std::string config_path;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == "--config" && i + 1 < raw.size()) {
      config_path = raw[i + 1];
    } else if (raw[i].rfind("--config=", 0) == 0) {
      config_path = raw[i].substr(9);
    }
  }

  if (config_path.empty()) return raw;
  const auto extra = config_args(config_path);
  std::vector<std::string> merged;
  merged.reserve(raw.size() + extra.size());
  // Keep the subcommand token first, then config-derived flags, then the
  // explicit flags (TakeLast policy makes the explicit ones win).
  size_t pos = 0;
  if (!raw.empty() && !raw[0].empty() && raw[0][0] != '-') {
    merged.push_back(raw[0]);
    pos = 1;
  }
  merged.insert(merged.end(), extra.begin(), extra.end());
  merged.insert(merged.end(), raw.begin() + static_cast<long>(pos), raw.end());
  return merged;
}

void take_last_everywhere(CLI::App* app) {
  for (CLI::Option* opt : app->get_options()) {
    if (opt->get_expected_min() > 0) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
  for (CLI::App* sub : app->get_subcommands({})) take_last_everywhere(sub);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induced electromagnetic (Casimir-type) force calculator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "Flat JSON config file (flags override)");

  PlatesArgs plates;
  CLI::App* plates_cmd =
      app.add_subcommand("plates", "Casimir force per unit area between two half-spaces");
  plates_cmd->add_option("--config", config_path, "Flat JSON config file (flags override)");
  plates_cmd->add_option("--eps1", plates.eps1, "Plate 1 permittivity model")->capture_default_str();
  plates_cmd->add_option("--mu1", plates.mu1, "Plate 1 permeability model")->capture_default_str();
  plates_cmd->add_option("--eps2", plates.eps2, "Plate 2 permittivity model")->capture_default_str();
  plates_cmd->add_option("--mu2", plates.mu2, "Plate 2 permeability model")->capture_default_str();
  plates_cmd->add_option("--gap", plates.gap, "Vacuum gap in meters")->capture_default_str();
  plates_cmd->add_option("--temp", plates.temp, "Temperature in kelvin (0 = T = 0)")
      ->capture_default_str();
  plates_cmd->add_option("--sweep", plates.sweep, "gap|temp=start:stop:count[:log]");
  add_common_options(plates_cmd, plates.common);

  ParticlesArgs particles;
  CLI::App* particles_cmd =
      app.add_subcommand("particles", "Induced pair interaction between polarizable particles");
  particles_cmd->add_option("--config", config_path, "Flat JSON config file (flags override)");
  particles_cmd->add_option("--alpha1e", particles.alpha1e, "Particle 1 electric polarizability")
      ->capture_default_str();
  particles_cmd->add_option("--alpha1h", particles.alpha1h, "Particle 1 magnetic polarizability")
      ->capture_default_str();
  particles_cmd->add_option("--alpha2e", particles.alpha2e, "Particle 2 electric polarizability")
      ->capture_default_str();
  particles_cmd->add_option("--alpha2h", particles.alpha2h, "Particle 2 magnetic polarizability")
      ->capture_default_str();
  particles_cmd->add_option("--r", particles.r, "Separation (meters, or natural units)")
      ->capture_default_str();
  particles_cmd->add_option("--temp", particles.temp, "Temperature in kelvin (0 = T = 0)")
      ->capture_default_str();
  particles_cmd->add_option("--beta", particles.beta,
                            "Natural-units beta*hbar*c (overrides --temp when > 0)");
  particles_cmd->add_flag("--natural-units", particles.natural,
                          "Treat r, alpha, and output in hbar*c = 1 units");
  particles_cmd->add_option("--sweep", particles.sweep, "r|temp=start:stop:count[:log]");
  add_common_options(particles_cmd, particles.common);

  OscillatorArgs osc;
  CLI::App* osc_cmd =
      app.add_subcommand("oscillator", "Three-oscillator model interaction sign");
  osc_cmd->add_option("--config", config_path, "Flat JSON config file (flags override)");
  osc_cmd->add_option("--mode", osc.mode, "Coupling arrangement: tm, te, or mixed")
      ->capture_default_str();
  osc_cmd->add_option("--a1", osc.a1, "Eigenfrequency squared of oscillator 1")
      ->capture_default_str();
  osc_cmd->add_option("--a2", osc.a2, "Eigenfrequency squared of oscillator 2")
      ->capture_default_str();
  osc_cmd->add_option("--a3", osc.a3, "Eigenfrequency squared of oscillator 3")
      ->capture_default_str();
  osc_cmd->add_option("--c", osc.c, "Coupling strength")->capture_default_str();
  osc_cmd->add_option("--beta", osc.beta, "Inverse temperature (hbar = 1 units)")
      ->capture_default_str();
  osc_cmd->add_option("--sweep", osc.sweep, "c|beta=start:stop:count[:log]");
  add_common_options(osc_cmd, osc.common);

  PhaseMapArgs phase;
  CLI::App* phase_cmd =
      app.add_subcommand("phase-map", "Sign map of the plate force over a material grid");
  phase_cmd->add_option("--config", config_path, "Flat JSON config file (flags override)");
  phase_cmd->add_option("--x", phase.x, "eps1|mu1|eps2|mu2=start:stop:count[:log]")
      ->capture_default_str();
  phase_cmd->add_option("--y", phase.y, "eps1|mu1|eps2|mu2=start:stop:count[:log]")
      ->capture_default_str();
  phase_cmd->add_option("--eps1", phase.eps1, "Plate 1 permittivity model (fixed)")
      ->capture_default_str();
  phase_cmd->add_option("--mu1", phase.mu1, "Plate 1 permeability model (fixed)")
      ->capture_default_str();
  phase_cmd->add_option("--eps2", phase.eps2, "Plate 2 permittivity model (fixed)")
      ->capture_default_str();
  phase_cmd->add_option("--mu2", phase.mu2, "Plate 2 permeability model (fixed)")
      ->capture_default_str();
  phase_cmd->add_flag("--diagonal", phase.diagonal, "Mirror plate 1 onto plate 2 (equal media)");
  phase_cmd->add_option("--gap", phase.gap, "Vacuum gap in meters")->capture_default_str();
  phase_cmd->add_option("--temp", phase.temp, "Temperature in kelvin")->capture_default_str();
  add_common_options(phase_cmd, phase.common);

  bool selftest_quick = false;
  bool selftest_mutate = false;
  CLI::App* selftest_cmd = app.add_subcommand("selftest", "Run the built-in oracle suite");
  selftest_cmd->add_flag("--quick", selftest_quick, "Reduced random-draw counts (< 10 s)");
  selftest_cmd->add_flag("--mutate-kernel", selftest_mutate,
                         "Fault injection: perturb a pinned constant; the run must fail");

  take_last_everywhere(&app);

  std::vector<std::string> args;
  try {
    args = assemble_args(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    // CLI11 wants reversed argument order for the vector overload.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (plates_cmd->parsed()) return run_plates(plates);
    if (particles_cmd->parsed()) return run_particles(particles);
    if (osc_cmd->parsed()) return run_oscillator(osc);
    if (phase_cmd->parsed()) return run_phase_map(phase);
    if (selftest_cmd->parsed()) return run_selftest(selftest_quick, selftest_mutate);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  }
  return kExitUsage;
}
