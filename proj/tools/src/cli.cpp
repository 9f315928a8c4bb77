#include "lfc3d/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "lfc3d/cycle.hpp"
#include "lfc3d/degree.hpp"
#include "lfc3d/error.hpp"
#include "lfc3d/lfc.hpp"
#include "lfc3d/parallel.hpp"

namespace lfc3d::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kDefaultKappa = 6;
constexpr int kClassifyResolution = 256;
constexpr int kExportResolution = 64;
constexpr double kAgreementFloor = 0.99;

// ---------------------------------------------------------------------------
// TOML

[[noreturn]] void bad_key(const std::string& source, const std::string& key,
                          const std::string& what) {
  throw UsageError(source + ": '" + key + "' " + what);
}

double read_double(const toml::node& node, const std::string& source, const std::string& key) {
  if (auto v = node.value<double>()) return *v;
  bad_key(source, key, "must be a number");
}

std::int64_t read_int(const toml::node& node, const std::string& source, const std::string& key) {
  if (node.is_integer()) return *node.value<std::int64_t>();
  bad_key(source, key, "must be an integer");
}

std::string read_string(const toml::node& node, const std::string& source,
                        const std::string& key) {
  if (auto v = node.value<std::string>()) return *v;
  bad_key(source, key, "must be a string");
}

int narrow(std::int64_t v, const std::string& source, const std::string& key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    bad_key(source, key, "is out of range");
  }
  return static_cast<int>(v);
}

void read_overrides(const toml::table& table, const std::string& source, PresetOverrides& o) {
  for (const auto& [k, node] : table) {
    const std::string key(k.str());
    const std::string full = "overrides." + key;
    if (key == "period") o.period = read_double(node, source, full);
    else if (key == "t0") o.t0 = read_double(node, source, full);
    else if (key == "te") o.te = read_double(node, source, full);
    else if (key == "amplitude") o.amplitude = read_double(node, source, full);
    else bad_key(source, full, "is not a known key");
  }
}

RunConfig from_table(const toml::table& table, const std::string& source) {
  RunConfig c;
  for (const auto& [k, node] : table) {
    const std::string key(k.str());
    if (key == "preset") {
      c.preset = read_string(node, source, key);
    } else if (key == "overrides") {
      const toml::table* t = node.as_table();
      if (!t) bad_key(source, key, "must be a table");
      read_overrides(*t, source, c.overrides);
    } else if (key == "kappa") {
      c.kappa = narrow(read_int(node, source, key), source, key);
    } else if (key == "nodes") {
      c.nodes = narrow(read_int(node, source, key), source, key);
    } else if (key == "nodes_t") {
      c.nodes_t = narrow(read_int(node, source, key), source, key);
    } else if (key == "xi") {
      c.xi = read_double(node, source, key);
    } else if (key == "levels") {
      const toml::array* a = node.as_array();
      if (!a) bad_key(source, key, "must be an array of integers");
      c.levels.clear();
      for (const toml::node& e : *a) c.levels.push_back(narrow(read_int(e, source, key), source, key));
    } else if (key == "out") {
      c.out = read_string(node, source, key);
    } else if (key == "format") {
      c.format = read_string(node, source, key);
    } else if (key == "samples") {
      const std::int64_t v = read_int(node, source, key);
      if (v < 1) bad_key(source, key, "must be positive");
      c.samples = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      const std::int64_t v = read_int(node, source, key);
      if (v < 0) bad_key(source, key, "must be non-negative");
      c.seed = static_cast<std::uint64_t>(v);
    } else if (key == "threads") {
      c.threads = narrow(read_int(node, source, key), source, key);
    } else if (key == "resolution") {
      c.resolution = narrow(read_int(node, source, key), source, key);
    } else if (key == "points") {
      c.points = narrow(read_int(node, source, key), source, key);
    } else {
      bad_key(source, key, "is not a known key");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Output helpers

json overrides_json(const PresetOverrides& o) {
  json j = json::object();
  if (o.period) j["period"] = *o.period;
  if (o.t0) j["t0"] = *o.t0;
  if (o.te) j["te"] = *o.te;
  if (o.amplitude) j["amplitude"] = *o.amplitude;
  return j;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json config_json(const RunConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["overrides"] = overrides_json(c.overrides);
  j["kappa"] = optional_json(c.kappa);
  j["nodes"] = c.nodes;
  j["nodes_t"] = optional_json(c.nodes_t);
  j["xi"] = c.xi;
  j["levels"] = c.levels;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["resolution"] = optional_json(c.resolution);
  j["points"] = c.points;
  j["format"] = c.format;
  j["out"] = c.out;
  j["threads"] = c.threads;
  return j;
}

json flux_json(const FluxResult& r) {
  json j;
  j["value"] = r.value;
  j["per_patch"] = r.per_patch;
  const FluxParameters& p = r.parameters;
  j["parameters"] = {{"kappa", p.kappa}, {"n_space", p.n_space}, {"n_time", p.n_time},
                     {"h", p.h},         {"dt", p.dt},           {"xi", p.xi}};
  return j;
}

double relative_error(double value, double reference) {
  const double diff = std::abs(value - reference);
  return std::abs(reference) > 1e-14 ? diff / std::abs(reference) : diff;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw UsageError("cannot open '" + c.out + "' for writing");
  file << text;
  if (!file) throw UsageError("failed writing '" + c.out + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void apply_threads(const RunConfig& c) {
  int threads = c.threads;
  if (threads == 0) {
    if (const char* env = std::getenv("LFC3D_THREADS"); env && *env) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*end != '\0' || v < 0 || v > 4096) {
        throw UsageError(std::string("LFC3D_THREADS must be a non-negative integer (got '") + env +
                         "')");
      }
      threads = static_cast<int>(v);
    }
  }
  set_thread_count(threads);
}

int kappa_of(const RunConfig& c) { return c.kappa.value_or(kDefaultKappa); }
int nodes_t_of(const RunConfig& c) { return c.nodes_t.value_or(c.nodes); }

GeneratingCycleMesh build_cycle(const PresetCase& p, const RunConfig& c) {
  return build_generating_cycle(p.velocity, p.surface, p.t0, p.te, 1.0 / c.nodes,
                                (p.te - p.t0) / nodes_t_of(c), kappa_of(c));
}

// ---------------------------------------------------------------------------
// Subcommands

int run_flux(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const PresetCase p = make_preset(c.preset, c.overrides);
  const FluxResult r = lfc3d_flux(p, c.nodes, nodes_t_of(c), kappa_of(c), c.xi);
  json j;
  j["preset"] = p.name;
  j.update(flux_json(r));
  int code = 0;
  try {
    const GatedReference ref = gated_eulerian_oracle(p);
    j["oracle"] = ref.value;
    j["relative_error"] = relative_error(r.value, ref.value);
  } catch (const ReferenceQualityError& e) {
    j["oracle"] = nullptr;
    j["relative_error"] = nullptr;
    err << "error: " << e.what() << "\n";
    code = 2;
  }
  j["config"] = config_json(c);
  emit(c, dump(j), out);
  return code;
}

int run_convergence(const RunConfig& c, std::ostream& out, std::ostream&) {
  const PresetCase p = make_preset(c.preset, c.overrides);
  const std::vector<int> kappas = c.kappa ? std::vector<int>{*c.kappa} : std::vector<int>{2, 4, 6};
  const ConvergenceTable table = convergence_study(p, kappas, c.levels, c.xi);
  emit(c, convergence_csv(table), out);
  return 0;
}

int run_classify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const PresetCase p = make_preset(c.preset, c.overrides);
  const GeneratingCycleMesh mesh = build_cycle(p, c);
  const DegreeClassifier classifier(mesh, c.resolution.value_or(kClassifyResolution));
  const auto box = classifier.mesh().bounds();

  struct Row {
    Vec3 x;
    std::optional<int> oracle;
    DegreeEstimate degree;
  };
  std::vector<Row> rows(static_cast<std::size_t>(c.points));
  parallel_for(c.points, [&](std::ptrdiff_t i) {
    std::mt19937_64 rng(mix_seed(c.seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Row& row = rows[i];
    for (int d = 0; d < 3; ++d) row.x[d] = box.min()[d] + unit(rng) * (box.max()[d] - box.min()[d]);
    row.degree = classifier.classify(row.x, 5, mix_seed(c.seed ^ 0x5eedULL, i));
    try {
      row.oracle = fluxing_index_oracle(p.velocity, p.surface, p.t0, p.te - p.t0, row.x).index;
    } catch (const Error&) {
      // Tangential or unresolved pathline: reported with an empty index.
    }
  });

  std::ostringstream csv;
  csv << "x,y,z,index,method,agree,flagged\n";
  int agree = 0, unflagged_disagree = 0;
  for (const Row& r : rows) {
    const bool same = r.oracle && *r.oracle == r.degree.degree;
    const bool flagged = r.degree.flagged || r.degree.degenerate || !r.oracle;
    agree += same;
    unflagged_disagree += !same && !flagged;
    const std::string xyz = fmt(r.x[0]) + "," + fmt(r.x[1]) + "," + fmt(r.x[2]) + ",";
    csv << xyz << (r.oracle ? std::to_string(*r.oracle) : "") << ",oracle," << same << ","
        << flagged << "\n";
    csv << xyz << r.degree.degree << ",degree," << same << "," << flagged << "\n";
  }
  emit(c, csv.str(), out);
  const double rate = static_cast<double>(agree) / c.points;
  if (rate < kAgreementFloor || unflagged_disagree > 0) {
    err << "error: oracle and degree agree on " << agree << " of " << c.points << " points ("
        << unflagged_disagree << " disagreements without a degeneracy flag)\n";
    return 2;
  }
  return 0;
}

int run_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const PresetCase p = make_preset(c.preset, c.overrides);
  IdentityOptions options;
  options.mc_samples = c.samples;
  options.seed = c.seed;
  if (c.resolution) options.tessellation = *c.resolution;
  if (nodes_t_of(c) != c.nodes) {
    throw UsageError("verify runs with nNodeT = nNodeS; drop --nodes-t");
  }
  const IdentityReport report = verify_identities(p, kappa_of(c), c.nodes, options);

  json j;
  j["preset"] = report.preset;
  j.update(flux_json(report.flux));
  j["oracle"] = report.oracle;
  j["relative_error"] = relative_error(report.flux.value, report.oracle);
  json volumes = json::object();
  for (const auto& [index, vol] : report.donating.volume) volumes[std::to_string(index)] = vol;
  j["donating_region"] = {{"value", report.donating.value},
                          {"standard_error", report.donating.standard_error},
                          {"samples", report.donating.samples},
                          {"degenerate", report.donating.degenerate},
                          {"volume", volumes}};
  json checks = json::array();
  for (const IdentityCheck& ch : report.checks) {
    checks.push_back({{"name", ch.name},
                      {"lhs", ch.lhs},
                      {"rhs", ch.rhs},
                      {"difference", ch.difference},
                      {"tolerance", ch.tolerance},
                      {"passed", ch.passed}});
  }
  j["checks"] = checks;
  j["passed"] = report.passed;
  j["config"] = config_json(c);
  emit(c, dump(j), out);
  if (!report.passed) {
    for (const IdentityCheck& ch : report.checks) {
      if (!ch.passed) {
        err << "error: " << ch.name << " failed: difference " << ch.difference << " > "
            << ch.tolerance << "\n";
      }
    }
    return 2;
  }
  return 0;
}

int run_export(const RunConfig& c, std::ostream& out, std::ostream&) {
  const MeshFormat format = parse_mesh_format(c.format);
  const PresetCase p = make_preset(c.preset, c.overrides);
  const GeneratingCycleMesh mesh = build_cycle(p, c);
  emit(c, export_cycle_mesh(mesh, format, c.resolution.value_or(kExportResolution)), out);
  return 0;
}

int run_presets(const RunConfig& c, std::ostream& out, std::ostream&) {
  std::ostringstream os;
  for (const std::string& name : preset_names()) {
    os << name << "\t" << make_preset(name).description << "\n";
  }
  emit(c, os.str(), out);
  return 0;
}

// ---------------------------------------------------------------------------
// Flags

struct Flags {
  std::string config, preset, out, format;
  int kappa = 0, nodes = 0, nodes_t = 0, threads = 0, resolution = 0, points = 0;
  double xi = 0.0, period = 0.0, t0 = 0.0, te = 0.0, amplitude = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<int> levels;
};

struct Bound {
  CLI::App* app = nullptr;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  CLI::Option* find(const std::string& name) const {
    for (const auto& [n, o] : options)
      if (n == name) return o;
    return nullptr;
  }
  bool given(const std::string& name) const {
    const CLI::Option* o = find(name);
    return o && o->count() > 0;
  }
};

enum Opt : unsigned {
  kModel = 1u << 0,    // preset, overrides, kappa, nodes, xi
  kSamples = 1u << 1,
  kSeed = 1u << 2,
  kFormat = 1u << 3,
  kResolution = 1u << 4,
  kLevels = 1u << 5,
  kPoints = 1u << 6,
};

Bound add_command(CLI::App& app, const std::string& name, const std::string& help, unsigned opts,
                  Flags& f) {
  Bound b;
  b.app = app.add_subcommand(name, help);
  CLI::App* s = b.app;
  auto add = [&](const std::string& key, CLI::Option* o) { b.options.emplace_back(key, o); };
  add("config", s->add_option("--config", f.config, "TOML run file; flags override its values")
                    ->check(CLI::ExistingFile));
  add("out", s->add_option("--out", f.out, "output path (default: standard output)"));
  add("threads", s->add_option("--threads", f.threads, "worker threads (0: LFC3D_THREADS or all)")
                     ->check(CLI::NonNegativeNumber));
  if (opts & kModel) {
    add("preset", s->add_option("--preset", f.preset, "test case (see `lfc3d presets`)"));
    add("kappa", s->add_option("--kappa", f.kappa, "order of accuracy")
                     ->check(CLI::IsMember({2, 4, 6})));
    add("nodes", s->add_option("--nodes", f.nodes, "nNodeS = nNodeT = N")->check(CLI::PositiveNumber));
    add("nodes-t", s->add_option("--nodes-t", f.nodes_t, "nNodeT")->check(CLI::PositiveNumber));
    add("xi", s->add_option("--xi", f.xi, "lower limit of the antiderivative in x"));
    add("period", s->add_option("--period", f.period, "LeVeque period T"));
    add("t0", s->add_option("--t0", f.t0, "start time"));
    add("te", s->add_option("--te", f.te, "end time"));
    add("amplitude", s->add_option("--amplitude", f.amplitude, "moving-surface amplitude factor"));
  }
  if (opts & kSamples) {
    add("samples", s->add_option("--samples", f.samples, "Monte Carlo samples")
                       ->check(CLI::PositiveNumber));
  }
  if (opts & kSeed) add("seed", s->add_option("--seed", f.seed, "RNG seed"));
  if (opts & kFormat) {
    add("format", s->add_option("--format", f.format, "mesh format")
                      ->check(CLI::IsMember({"vtk", "obj"})));
  }
  if (opts & kResolution) {
    add("resolution", s->add_option("--resolution", f.resolution, "cells per patch edge")
                          ->check(CLI::Range(2, 1 << 14)));
  }
  if (opts & kLevels) {
    add("levels", s->add_option("--levels", f.levels, "doubling node counts, e.g. 32,64,128")
                      ->delimiter(','));
  }
  if (opts & kPoints) {
    add("points", s->add_option("--points", f.points, "number of random seed points")
                      ->check(CLI::PositiveNumber));
  }
  return b;
}

RunConfig merge(const Bound& b, const Flags& f) {
  RunConfig c = b.given("config") ? load_config(f.config) : RunConfig{};
  if (b.given("preset")) c.preset = f.preset;
  if (b.given("kappa")) c.kappa = f.kappa;
  if (b.given("nodes")) {
    c.nodes = f.nodes;
    c.nodes_t.reset();
  }
  if (b.given("nodes-t")) c.nodes_t = f.nodes_t;
  if (b.given("xi")) c.xi = f.xi;
  if (b.given("period")) c.overrides.period = f.period;
  if (b.given("t0")) c.overrides.t0 = f.t0;
  if (b.given("te")) c.overrides.te = f.te;
  if (b.given("amplitude")) c.overrides.amplitude = f.amplitude;
  if (b.given("out")) c.out = f.out;
  if (b.given("format")) c.format = f.format;
  if (b.given("samples")) c.samples = f.samples;
  if (b.given("seed")) c.seed = f.seed;
  if (b.given("threads")) c.threads = f.threads;
  if (b.given("resolution")) c.resolution = f.resolution;
  if (b.given("levels")) c.levels = f.levels;
  if (b.given("points")) c.points = f.points;
  return c;
}

}  // namespace

RunConfig parse_config(const std::string& toml_text, const std::string& source) {
  try {
    return from_table(toml::parse(toml_text, source), source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw UsageError(os.str());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << file.rdbuf();
  return parse_config(text.str(), path);
}

void validate(const RunConfig& c) {
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), c.preset) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw UsageError("unknown preset '" + c.preset + "'; valid presets: " + list);
  }
  if (c.kappa && *c.kappa != 2 && *c.kappa != 4 && *c.kappa != 6) {
    throw UsageError("kappa must be 2, 4 or 6 (got " + std::to_string(*c.kappa) + ")");
  }
  if (c.nodes < 1) throw UsageError("nodes must be positive");
  if (c.nodes_t && *c.nodes_t < 1) throw UsageError("nodes_t must be positive");
  if (!std::isfinite(c.xi)) throw UsageError("xi must be finite");
  if (c.levels.empty()) throw UsageError("levels must not be empty");
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (c.levels[i] < 1) throw UsageError("levels must be positive");
    if (i > 0 && c.levels[i] != 2 * c.levels[i - 1]) {
      throw UsageError("levels must double at each step");
    }
  }
  if (c.samples < 1) throw UsageError("samples must be positive");
  if (c.threads < 0) throw UsageError("threads must be non-negative");
  if (c.resolution && *c.resolution < 2) throw UsageError("resolution must be at least 2");
  if (c.points < 1) throw UsageError("points must be positive");
  if (c.format != "vtk" && c.format != "obj") {
    throw UsageError("format must be vtk or obj (got '" + c.format + "')");
  }
  try {
    make_preset(c.preset, c.overrides);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lagrangian flux of a scalar through a moving surface", "lfc3d"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::pair<Bound, int (*)(const RunConfig&, std::ostream&, std::ostream&)>> commands;
  commands.emplace_back(add_command(app, "flux", "flux through the preset surface, with the "
                                    "Eulerian oracle for comparison", kModel, f), run_flux);
  commands.emplace_back(add_command(app, "convergence", "error and rate table (CSV)",
                                    kModel | kLevels, f), run_convergence);
  commands.emplace_back(add_command(app, "classify", "fluxing index vs mapping degree at random "
                                    "points (CSV)", kModel | kSeed | kResolution | kPoints, f),
                        run_classify);
  commands.emplace_back(add_command(app, "verify", "oracle, cycle flux, donating-region integral "
                                    "and identity checks (JSON)",
                                    kModel | kSamples | kSeed | kResolution, f), run_verify);
  commands.emplace_back(add_command(app, "export-cycle", "write the generating cycle as VTK or OBJ",
                                    kModel | kFormat | kResolution, f), run_export);
  commands.emplace_back(add_command(app, "presets", "list test cases", 0, f), run_presets);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const bool help = dynamic_cast<const CLI::CallForHelp*>(&e) ||
                      dynamic_cast<const CLI::CallForAllHelp*>(&e);
    app.exit(e, out, err);
    return help ? 0 : 1;
  }

  for (const auto& [bound, run] : commands) {
    if (!bound.app->parsed()) continue;
    try {
      const RunConfig config = merge(bound, f);
      validate(config);
      apply_threads(config);
      return run(config, out, err);
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const ArgumentError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const ConfigurationError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const InsufficientDataError& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}

}  // namespace lfc3d::cli
