#include "atomion/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace atomion {

using nlohmann::json;

std::string to_string(Emit e) {
  switch (e) {
    case Emit::spectrum: return "spectrum";
    case Emit::separations: return "separations";
    case Emit::energies: return "energies";
    case Emit::overlaps: return "overlaps";
    case Emit::fidelity: return "fidelity";
    case Emit::effective: return "effective";
    case Emit::densities: return "densities";
  }
  return "?";
}

Emit emit_from_string(const std::string& s) {
  for (Emit e : {Emit::spectrum, Emit::separations, Emit::energies, Emit::overlaps, Emit::fidelity,
                 Emit::effective, Emit::densities})
    if (to_string(e) == s) return e;
  throw std::invalid_argument("unknown emit target '" + s + "'");
}

bool RunConfig::emits(Emit e) const { return std::find(emit.begin(), emit.end(), e) != emit.end(); }

bool RunConfig::needs_ion_frame() const {
  return sweep.ion_frame || emits(Emit::densities) || emits(Emit::effective);
}

RunConfig default_config() {
  RunConfig c;
  c.sweep.g = {0, 0.5, 1, 2, 3, 5, 8, 10, 15, 20, 40, 80};
  c.sweep.beta = {0, 0.034, 1};
  return c;
}

namespace {

// Reads one JSON object, remembering its path and rejecting unknown keys.
class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(sub(it.key()), "unknown key");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(sub(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_model(const json& j, ModelParams& m) {
  Reader r(j, "model");
  r.get("kappa", m.kappa);
  r.get("v0", m.v0);
  r.get("gamma", m.gamma);
  r.get("g", m.g);
  r.get("beta", m.beta);
  r.get("eta", m.eta);
  r.get("l_a", m.l_a);
  r.get("n_atoms", m.n_atoms);
  std::string contact = to_string(m.contact);
  r.get("contact", contact);
  try {
    m.contact = contact_scheme_from_string(contact);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model.contact", e.what());
  }
}

void read_grid(const json& j, GridConfig& g) {
  Reader r(j, "grid");
  r.get("lf_extent", g.lf_extent);
  r.get("lf_points", g.lf_points);
  r.get("cmf_extent", g.cmf_extent);
  r.get("cmf_points", g.cmf_points);
  r.get("if_ion_extent", g.if_ion_extent);
  r.get("if_ion_points", g.if_ion_points);
  r.get("if_rel_extent", g.if_rel_extent);
  r.get("if_rel_points", g.if_rel_points);
}

void read_solver(const json& j, SolverConfig& s) {
  Reader r(j, "solver");
  r.get("tolerance", s.eigen.tolerance);
  r.get("max_iterations", s.eigen.max_iterations);
  r.get("guard_vectors", s.eigen.guard_vectors);
  r.get("preconditioner_shift", s.eigen.preconditioner_shift);
  r.get("seed", s.eigen.seed);
  r.get("degeneracy_tolerance", s.eigen.degeneracy_tolerance);
  r.get("tolerance_3d", s.tolerance_3d);
  r.get("threads", s.threads);
  if (const json* im = r.child("imaginary")) {
    Reader ri(*im, "solver.imaginary");
    ri.get("time_step", s.imaginary.time_step);
    ri.get("max_steps", s.imaginary.max_steps);
    ri.get("check_every", s.imaginary.check_every);
    ri.get("energy_change", s.imaginary.energy_change);
  }
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c = default_config();
  Reader r(j, "");
  if (const json* m = r.child("model")) read_model(*m, c.model);
  if (const json* g = r.child("grid")) read_grid(*g, c.grid);
  if (const json* s = r.child("sweep")) {
    Reader rs(*s, "sweep");
    rs.get("g", c.sweep.g);
    rs.get("beta", c.sweep.beta);
    rs.get("states", c.sweep.states);
    rs.get("ion_frame", c.sweep.ion_frame);
  }
  if (const json* s = r.child("solver")) read_solver(*s, c.solver);
  r.get("output", c.output);
  if (const json* cache = r.child("cache")) {
    Reader rc(*cache, "cache");
    rc.get("root", c.cache_root);
    std::string policy = c.cache == CachePolicy::reuse ? "reuse" : "recompute";
    rc.get("policy", policy);
    if (policy == "reuse") c.cache = CachePolicy::reuse;
    else if (policy == "recompute") c.cache = CachePolicy::recompute;
    else throw ConfigError("cache.policy", "expected 'reuse' or 'recompute', got '" + policy + "'");
  }
  std::vector<std::string> emit;
  for (Emit e : c.emit) emit.push_back(to_string(e));
  r.get("emit", emit);
  c.emit.clear();
  for (std::size_t i = 0; i < emit.size(); ++i) {
    try {
      c.emit.push_back(emit_from_string(emit[i]));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("emit[" + std::to_string(i) + "]", e.what());
    }
  }
  return c;
}

json to_json(const RunConfig& c) {
  const ModelParams& m = c.model;
  json j;
  j["model"] = {{"kappa", m.kappa}, {"v0", m.v0},   {"gamma", m.gamma},     {"g", m.g},
                {"beta", m.beta},   {"eta", m.eta}, {"l_a", m.l_a},         {"n_atoms", m.n_atoms},
                {"contact", to_string(m.contact)}};
  const GridConfig& g = c.grid;
  j["grid"] = {{"lf_extent", g.lf_extent},         {"lf_points", g.lf_points},
               {"cmf_extent", g.cmf_extent},       {"cmf_points", g.cmf_points},
               {"if_ion_extent", g.if_ion_extent}, {"if_ion_points", g.if_ion_points},
               {"if_rel_extent", g.if_rel_extent}, {"if_rel_points", g.if_rel_points}};
  j["sweep"] = {{"g", c.sweep.g}, {"beta", c.sweep.beta}, {"states", c.sweep.states},
                {"ion_frame", c.sweep.ion_frame}};
  const SolverConfig& s = c.solver;
  j["solver"] = {{"tolerance", s.eigen.tolerance},
                 {"max_iterations", s.eigen.max_iterations},
                 {"guard_vectors", s.eigen.guard_vectors},
                 {"preconditioner_shift", s.eigen.preconditioner_shift},
                 {"seed", s.eigen.seed},
                 {"degeneracy_tolerance", s.eigen.degeneracy_tolerance},
                 {"tolerance_3d", s.tolerance_3d},
                 {"threads", s.threads},
                 {"imaginary",
                  {{"time_step", s.imaginary.time_step},
                   {"max_steps", s.imaginary.max_steps},
                   {"check_every", s.imaginary.check_every},
                   {"energy_change", s.imaginary.energy_change}}}};
  j["output"] = c.output;
  j["cache"] = {{"root", c.cache_root}, {"policy", c.cache == CachePolicy::reuse ? "reuse" : "recompute"}};
  std::vector<std::string> emit;
  for (Emit e : c.emit) emit.push_back(to_string(e));
  j["emit"] = emit;
  return j;
}

json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << origin << ':' << line << ':' << col << ": syntax error";
    throw ConfigError("", os.str());
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(parse_config_text(ss.str(), path));
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("", "override '" + assignment + "' is not of the form key.path=value");
  const std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError(path, "empty key in override");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

void validate(const RunConfig& c) {
  try {
    c.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
  if (c.model.eta != 1.0) throw ConfigError("model.eta", "only eta = 1 is supported by the solvers");
  auto check_grid = [](const char* field, double extent, std::size_t n) {
    try {
      (void)make_grid(extent, n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("grid.") + field, e.what());
    }
  };
  check_grid("lf_points", c.grid.lf_extent, c.grid.lf_points);
  check_grid("cmf_points", c.grid.cmf_extent, c.grid.cmf_points);
  check_grid("if_ion_points", c.grid.if_ion_extent, c.grid.if_ion_points);
  check_grid("if_rel_points", c.grid.if_rel_extent, c.grid.if_rel_points);

  if (c.sweep.g.empty()) throw ConfigError("sweep.g", "must not be empty");
  for (std::size_t i = 0; i < c.sweep.g.size(); ++i)
    if (!(c.sweep.g[i] >= 0.0)) throw ConfigError("sweep.g[" + std::to_string(i) + "]", "must be non-negative");
  if (c.sweep.beta.empty()) throw ConfigError("sweep.beta", "must not be empty");
  for (std::size_t i = 0; i < c.sweep.beta.size(); ++i)
    if (!(c.sweep.beta[i] >= 0.0)) throw ConfigError("sweep.beta[" + std::to_string(i) + "]", "must be non-negative");
  if (c.sweep.states.empty()) throw ConfigError("sweep.states", "must not be empty");
  for (std::size_t i = 0; i < c.sweep.states.size(); ++i)
    if (c.sweep.states[i] < 0 || c.sweep.states[i] > 4)
      throw ConfigError("sweep.states[" + std::to_string(i) + "]", "state indices must lie in 0..4");
  if (c.needs_ion_frame())
    for (std::size_t i = 0; i < c.sweep.beta.size(); ++i)
      if (c.sweep.beta[i] == 0.0)
        throw ConfigError("sweep.beta[" + std::to_string(i) + "]",
                          "ion-frame output requested but beta = 0 (the ion is pinned)");
  if (!(c.solver.eigen.tolerance > 0.0)) throw ConfigError("solver.tolerance", "must be positive");
  if (!(c.solver.tolerance_3d > 0.0)) throw ConfigError("solver.tolerance_3d", "must be positive");
  if (c.solver.threads == 0) throw ConfigError("solver.threads", "must be at least 1");
  if (!(c.solver.imaginary.time_step > 0.0)) throw ConfigError("solver.imaginary.time_step", "must be positive");
  if (c.solver.imaginary.check_every == 0) throw ConfigError("solver.imaginary.check_every", "must be at least 1");
  if (c.output.empty()) throw ConfigError("output", "must not be empty");
}

}  // namespace atomion
