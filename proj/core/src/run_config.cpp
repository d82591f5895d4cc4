#include "membrane/run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <yaml-cpp/yaml.h>

#include "membrane/error.hpp"

namespace membrane {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
    fail(at.Mark(), message);
  }

  [[noreturn]] void fail(const YAML::Mark& mark, const std::string& message) const {
    std::ostringstream out;
    out << source_;
    if (!mark.is_null()) out << ':' << mark.line + 1 << ':' << mark.column + 1;
    out << ": " << message;
    throw Error(ErrorCode::ConfigError, out.str());
  }

  void expect_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void allow_keys(const YAML::Node& node, const std::string& section,
                  std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + section);
    }
  }

  template <typename T>
  T get(const YAML::Node& parent, const char* key, T fallback, const char* type) const {
    const YAML::Node node = parent[key];
    if (!node) return fallback;
    if (!node.IsScalar()) fail(node, std::string("'") + key + "' must be " + type);
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, std::string("'") + key + "' must be " + type + ", got '" + node.Scalar() + "'");
    }
  }

  double real(const YAML::Node& p, const char* key, double fallback) const {
    const double v = get<double>(p, key, fallback, "a number");
    if (!std::isfinite(v)) fail(p[key], std::string("'") + key + "' must be finite");
    return v;
  }
  int integer(const YAML::Node& p, const char* key, int fallback) const {
    return get<int>(p, key, fallback, "an integer");
  }
  long long_integer(const YAML::Node& p, const char* key, long fallback) const {
    return get<long>(p, key, fallback, "an integer");
  }
  bool boolean(const YAML::Node& p, const char* key, bool fallback) const {
    return get<bool>(p, key, fallback, "true or false");
  }
  std::string text(const YAML::Node& p, const char* key, const std::string& fallback) const {
    return get<std::string>(p, key, fallback, "a string");
  }

  void positive(const YAML::Node& p, const char* key, double v) const {
    if (!(v > 0.0)) fail(p[key] ? p[key] : p, std::string("'") + key + "' must be positive");
  }

 private:
  std::string source_;
};

struct Target {
  std::string field;
  int component = 0;
};

std::optional<Target> parse_target(const std::string& s) {
  for (const char* f : {"vz", "vr", "z", "r"}) {
    const std::string prefix(f);
    if (s.rfind(prefix, 0) != 0 || s.size() == prefix.size()) continue;
    const std::string digits = s.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    const int index = std::stoi(digits);
    if (index < 1) return std::nullopt;
    return Target{prefix, index - 1};
  }
  return std::nullopt;
}

int rows_of(const std::string& field, const AxisymmetryShape& shape) {
  return field == "z" || field == "vz" ? shape.m() : shape.k();
}

void read_base_family(const Reader& rd, const YAML::Node& node, InitialData& init,
                      const AxisymmetryShape& shape) {
  init.family = rd.text(node, "family", "clifford");
  if (init.family == "clifford") {
    rd.allow_keys(node, "clifford initial data",
                  {"family", "rho0", "a0", "rho_dot0", "a_dot0", "base", "perturbations", "random"});
    init.rho0 = rd.real(node, "rho0", 1.0);
    init.a0 = rd.real(node, "a0", 1.0);
    init.rho_dot0 = rd.real(node, "rho_dot0", 0.0);
    init.a_dot0 = rd.real(node, "a_dot0", 0.0);
    rd.positive(node, "rho0", init.rho0);
    rd.positive(node, "a0", init.a0);
    if (shape.m() < 2) rd.fail(node["family"], "the clifford family needs shape.z_dim >= 2");
  } else if (init.family == "torus_of_revolution") {
    rd.allow_keys(node, "torus_of_revolution initial data",
                  {"family", "R0", "b", "base", "perturbations", "random"});
    init.R0 = rd.real(node, "R0", 2.0);
    init.b = rd.real(node, "b", 0.5);
    rd.positive(node, "b", init.b);
    if (!(init.R0 > init.b)) rd.fail(node["R0"] ? node["R0"] : node, "'R0' must exceed 'b'");
  } else {
    rd.fail(node["family"] ? node["family"] : node, "unknown initial family '" + init.family + "'");
  }
}

void read_initial(const Reader& rd, const YAML::Node& node, RunConfig& cfg) {
  rd.expect_map(node, "'initial'");
  InitialData& init = cfg.initial;
  const std::string family = rd.text(node, "family", "clifford");
  YAML::Node base = node;
  if (family == "perturbed") {
    rd.allow_keys(node, "perturbed initial data", {"family", "base", "perturbations", "random"});
    if (!node["base"]) rd.fail(node, "perturbed initial data needs a 'base' mapping");
    base.reset(node["base"]);
    rd.expect_map(base, "'initial.base'");
  }
  read_base_family(rd, base, init, cfg.shape);
  if (family != "perturbed" && (node["perturbations"] || node["random"] || node["base"])) {
    rd.fail(node, "perturbations need family: perturbed");
  }

  if (const YAML::Node list = node["perturbations"]) {
    if (!list.IsSequence()) rd.fail(list, "'perturbations' must be a list");
    for (const YAML::Node& item : list) {
      rd.expect_map(item, "a perturbation");
      rd.allow_keys(item, "a perturbation", {"target", "mode", "amplitude", "phase"});
      const std::string target = rd.text(item, "target", "");
      const auto t = parse_target(target);
      if (!t || t->component >= rows_of(t->field, cfg.shape)) {
        rd.fail(item["target"] ? item["target"] : item, "invalid perturbation target '" + target + "'");
      }
      FourierTerm term;
      term.field = t->field;
      term.component = t->component;
      term.mode = rd.integer(item, "mode", 1);
      term.amplitude = rd.real(item, "amplitude", 0.0);
      term.phase = rd.real(item, "phase", 0.0);
      if (term.mode < 0 || term.mode > cfg.n / 2 - 1) {
        rd.fail(item["mode"] ? item["mode"] : item, "perturbation mode out of range for grid.n");
      }
      init.perturbations.push_back(term);
    }
  }
  if (const YAML::Node r = node["random"]) {
    rd.expect_map(r, "'random'");
    rd.allow_keys(r, "random perturbation", {"count", "amplitude", "max_mode", "targets"});
    RandomPerturbation rp;
    rp.count = rd.integer(r, "count", 1);
    rp.amplitude = rd.real(r, "amplitude", 0.0);
    rp.max_mode = rd.integer(r, "max_mode", 4);
    if (rp.count < 1) rd.fail(r["count"], "'count' must be at least 1");
    if (rp.amplitude < 0.0) rd.fail(r["amplitude"], "'amplitude' must be non-negative");
    if (rp.max_mode < 1 || rp.max_mode > cfg.n / 2 - 1) {
      rd.fail(r["max_mode"] ? r["max_mode"] : r, "'max_mode' out of range for grid.n");
    }
    const YAML::Node targets = r["targets"];
    if (!targets || !targets.IsSequence() || targets.size() == 0) {
      rd.fail(targets ? targets : r, "'targets' must be a non-empty list");
    }
    for (const YAML::Node& tn : targets) {
      const auto name = tn.as<std::string>();
      const auto t = parse_target(name);
      if (!t || t->component >= rows_of(t->field, cfg.shape)) {
        rd.fail(tn, "invalid perturbation target '" + name + "'");
      }
      rp.targets.push_back(name);
    }
    init.random = rp;
  }
}

void read_solver(const Reader& rd, const YAML::Node& node, SolverParams& p) {
  rd.expect_map(node, "'solver'");
  rd.allow_keys(node, "solver",
                {"cfl", "t_end", "indicator_floor", "radius_floor", "dt_floor", "record_every",
                 "max_steps", "indicator_step_fraction", "initial_gauge_tolerance"});
  p.cfl = rd.real(node, "cfl", p.cfl);
  p.t_end = rd.real(node, "t_end", p.t_end);
  p.indicator_floor = rd.real(node, "indicator_floor", p.indicator_floor);
  p.radius_floor = rd.real(node, "radius_floor", p.radius_floor);
  p.dt_floor = rd.real(node, "dt_floor", p.dt_floor);
  p.record_every = rd.integer(node, "record_every", p.record_every);
  p.max_steps = rd.long_integer(node, "max_steps", p.max_steps);
  p.indicator_step_fraction = rd.real(node, "indicator_step_fraction", p.indicator_step_fraction);
  p.initial_gauge_tolerance = rd.real(node, "initial_gauge_tolerance", p.initial_gauge_tolerance);
  try {
    p.validate();
  } catch (const Error& e) {
    rd.fail(node, e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& source_name) {
  const Reader rd(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    rd.fail(e.mark, e.msg);
  }
  if (!root.IsMap()) rd.fail(root, "a run config must be a mapping");
  rd.allow_keys(root, "the run config",
                {"shape", "initial", "grid", "solver", "run", "output", "breakdown"});

  RunConfig cfg;
  cfg.source_text = text;
  cfg.source_name = source_name;

  if (const YAML::Node s = root["shape"]) {
    rd.expect_map(s, "'shape'");
    rd.allow_keys(s, "shape", {"sphere_dims", "z_dim"});
    std::vector<int> dims{1};
    if (const YAML::Node d = s["sphere_dims"]) {
      if (!d.IsSequence()) rd.fail(d, "'sphere_dims' must be a list of integers");
      dims.clear();
      for (const YAML::Node& v : d) {
        try {
          dims.push_back(v.as<int>());
        } catch (const YAML::BadConversion&) {
          rd.fail(v, "'sphere_dims' entries must be integers");
        }
      }
    }
    try {
      cfg.shape = AxisymmetryShape(dims, rd.integer(s, "z_dim", 2));
    } catch (const Error& e) {
      rd.fail(s, e.what());
    }
  }

  if (const YAML::Node g = root["grid"]) {
    rd.expect_map(g, "'grid'");
    rd.allow_keys(g, "grid", {"n"});
    cfg.n = rd.integer(g, "n", cfg.n);
    if (cfg.n < 8 || cfg.n % 2 != 0) rd.fail(g["n"] ? g["n"] : g, "'n' must be even and at least 8");
  }

  if (const YAML::Node i = root["initial"]) {
    read_initial(rd, i, cfg);
  } else if (cfg.shape.m() < 2) {
    rd.fail(root, "the default clifford family needs shape.z_dim >= 2");
  }

  if (const YAML::Node s = root["solver"]) read_solver(rd, s, cfg.solver);

  if (const YAML::Node r = root["run"]) {
    rd.expect_map(r, "'run'");
    rd.allow_keys(r, "run", {"directions", "seed"});
    if (const YAML::Node d = r["directions"]) {
      if (!d.IsSequence() || d.size() == 0) rd.fail(d, "'directions' must be a non-empty list");
      cfg.directions.clear();
      for (const YAML::Node& v : d) {
        const auto name = v.as<std::string>();
        if (name == "forward") {
          cfg.directions.push_back(Direction::Forward);
        } else if (name == "backward") {
          cfg.directions.push_back(Direction::Backward);
        } else {
          rd.fail(v, "direction must be 'forward' or 'backward', got '" + name + "'");
        }
      }
    }
    if (const YAML::Node seed = r["seed"]) {
      try {
        cfg.seed = seed.as<std::uint64_t>();
      } catch (const YAML::BadConversion&) {
        rd.fail(seed, "'seed' must be a non-negative integer");
      }
    }
  }

  if (const YAML::Node o = root["output"]) {
    rd.expect_map(o, "'output'");
    rd.allow_keys(o, "output", {"dir", "snapshots", "snapshot_every"});
    cfg.output.dir = rd.text(o, "dir", cfg.output.dir.string());
    cfg.output.snapshots = rd.boolean(o, "snapshots", cfg.output.snapshots);
    cfg.output.snapshot_every = rd.integer(o, "snapshot_every", cfg.output.snapshot_every);
    if (cfg.output.snapshot_every < 1) rd.fail(o["snapshot_every"], "'snapshot_every' must be >= 1");
  }

  if (const YAML::Node b = root["breakdown"]) {
    rd.expect_map(b, "'breakdown'");
    rd.allow_keys(b, "breakdown", {"x_budget", "y_budget", "window"});
    cfg.budget.x_inf = rd.real(b, "x_budget", cfg.budget.x_inf);
    cfg.budget.y_inf = rd.real(b, "y_budget", cfg.budget.y_inf);
    cfg.trend_window = rd.integer(b, "window", cfg.trend_window);
    rd.positive(b, "x_budget", cfg.budget.x_inf);
    rd.positive(b, "y_budget", cfg.budget.y_inf);
    if (cfg.trend_window < 2) rd.fail(b["window"], "'window' must be at least 2");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.string());
}

std::string override_config(const std::string& text,
                            const std::map<std::string, std::string>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ConfigError, "template: " + e.msg);
  }
  if (!root.IsMap()) throw Error(ErrorCode::ConfigError, "template must be a mapping");
  for (const auto& [path, value] : overrides) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    if (parts.empty()) throw Error(ErrorCode::ConfigError, "empty override key");
    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!cur[parts[i]] || !cur[parts[i]].IsMap()) cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
      cur.reset(cur[parts[i]]);
    }
    cur[parts.back()] = YAML::Load(value);
  }
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << root;
  return std::string(out.c_str()) + "\n";
}

FieldState build_initial_state(const RunConfig& cfg) {
  const AxisymmetryShape& shape = cfg.shape;
  const InitialData& init = cfg.initial;
  const int n = cfg.n;
  FieldState s = FieldState::at_rest(shape, n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double y = grid_point(j, n);
    if (init.family == "clifford") {
      s.z(0, j) = init.rho0 * std::cos(y);
      s.z(1, j) = init.rho0 * std::sin(y);
      s.vz(0, j) = init.rho_dot0 * std::cos(y);
      s.vz(1, j) = init.rho_dot0 * std::sin(y);
      for (int i = 0; i < shape.k(); ++i) {
        s.r(i, j) = init.a0;
        s.vr(i, j) = init.a_dot0;
      }
    } else {
      s.z(0, j) = init.b * std::sin(y);
      for (int i = 0; i < shape.k(); ++i) s.r(i, j) = init.R0 + init.b * std::cos(y);
    }
  }

  std::vector<FourierTerm> terms = init.perturbations;
  if (init.random) {
    const RandomPerturbation& rp = *init.random;
    boost::random::mt19937_64 gen(cfg.seed);
    boost::random::uniform_int_distribution<std::size_t> pick(0, rp.targets.size() - 1);
    boost::random::uniform_int_distribution<int> mode(1, rp.max_mode);
    boost::random::uniform_real_distribution<double> amp(-rp.amplitude, rp.amplitude);
    boost::random::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (int c = 0; c < rp.count; ++c) {
      const auto target = parse_target(rp.targets[pick(gen)]);
      FourierTerm t;
      t.field = target->field;
      t.component = target->component;
      t.mode = mode(gen);
      t.amplitude = amp(gen);
      t.phase = phase(gen);
      terms.push_back(t);
    }
  }
  for (const FourierTerm& t : terms) {
    FieldBlock& block = t.field == "z" ? s.z : t.field == "r" ? s.r : t.field == "vz" ? s.vz : s.vr;
    for (int j = 0; j < n; ++j) {
      block(t.component, j) += t.amplitude * std::cos(t.mode * grid_point(j, n) + t.phase);
    }
  }

  for (double v : s.r.values()) {
    if (!(v > 0.0)) throw Error(ErrorCode::ConfigError, cfg.source_name + ": initial data has r <= 0");
  }
  for (double v2 : squared_speed(s)) {
    if (!(v2 < 1.0)) {
      throw Error(ErrorCode::ConfigError, cfg.source_name + ": initial data is not time-like");
    }
  }
  return s;
}

}  // namespace membrane
