#include "atomion/run.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "atomion/cache.hpp"
#include "atomion/meanfield.hpp"
#include "atomion/observables.hpp"

namespace atomion {

namespace fs = std::filesystem;
using nlohmann::json;

int RunReport::exit_code() const {
  for (const auto& p : points)
    if (p.status == "convergence_failure") return 3;
  return failures > 0 ? 1 : 0;
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const std::size_t t = std::min(threads, n);
  if (t <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

using Key = std::pair<double, double>;  // (beta, g)

struct Solved {
  std::optional<CacheEntry> entry;
  std::string status = "ok";
  std::string message;
  std::string hash;
  bool cache_hit = false;
  bool solved = false;
};

constexpr std::size_t kStates = 5;

class Solver {
public:
  Solver(const RunConfig& c, std::ostream* log)
      : cfg_(c), log_(log), cmf_grid_(make_grid(c.grid.cmf_extent, c.grid.cmf_points)),
        ion_grid_(make_grid(c.grid.if_ion_extent, c.grid.if_ion_points)),
        rel_grid_(make_grid(c.grid.if_rel_extent, c.grid.if_rel_points)) {
    if (!c.cache_root.empty()) cache_.emplace(c.cache_root);
  }

  ModelParams params(double beta, double g) const {
    ModelParams p = cfg_.model;
    p.beta = beta;
    p.g = g;
    return p;
  }

  Solved cmf(double beta, double g) const {
    const ModelParams p = params(beta, g);
    CacheKey key{Frame::cmf_relative, p, ProductGrid{{cmf_grid_, cmf_grid_}}, kStates, cfg_.solver.eigen.tolerance};
    return cached(key, [&] {
      auto r = lowest_eigenstates(build_relative_cmf(cmf_grid_, p), kStates, cfg_.solver.eigen);
      return CacheEntry{std::move(r.record), std::move(r.states)};
    });
  }

  Solved ion_frame(double beta, double g) const {
    const ModelParams p = params(beta, g);
    CacheKey key{Frame::ion_frame, p, ProductGrid{{ion_grid_, rel_grid_, rel_grid_}}, 1, cfg_.solver.tolerance_3d};
    return cached(key, [&] {
      EigenOptions eo = cfg_.solver.eigen;
      eo.tolerance = cfg_.solver.tolerance_3d;
      auto gs = ground_state_3d(build_if_hamiltonian(ion_grid_, rel_grid_, p), eo, cfg_.solver.imaginary);
      CacheEntry e;
      e.record.params = p;
      e.record.frame = Frame::ion_frame;
      e.record.grid = gs.state.grid;
      e.record.energies = {gs.energy};
      e.record.parity = {+1};
      e.record.exchange = {+1};
      e.record.cluster = {0};
      e.record.residuals = {gs.residual};
      e.record.iterations = {gs.polish_iterations};
      e.states.push_back(std::move(gs.state));
      return e;
    });
  }

  const Grid1D& cmf_grid() const { return cmf_grid_; }
  const Grid1D& ion_grid() const { return ion_grid_; }
  const Grid1D& rel_grid() const { return rel_grid_; }

  void say(const std::string& s) const {
    if (!log_) return;
    std::lock_guard<std::mutex> lock(log_mutex_);
    *log_ << s << '\n';
  }

private:
  template <class Fn>
  Solved cached(const CacheKey& key, Fn&& solve) const {
    Solved s;
    s.hash = key.hash();
    if (cache_ && cfg_.cache == CachePolicy::reuse) {
      if (auto e = cache_->load(key)) {
        s.entry = std::move(e);
        s.cache_hit = true;
        say("cache hit  " + to_string(key.frame) + " beta=" + num(key.params.beta) + " g=" + num(key.params.g));
        return s;
      }
    }
    try {
      s.entry = solve();
      s.solved = true;
      say("solved     " + to_string(key.frame) + " beta=" + num(key.params.beta) + " g=" + num(key.params.g));
      if (cache_) cache_->store(key, *s.entry);
    } catch (const ConvergenceError& e) {
      s.status = "convergence_failure";
      s.message = e.what();
      say(std::string("FAILED     ") + e.what());
    } catch (const std::exception& e) {
      s.status = "error";
      s.message = e.what();
      say(std::string("ERROR      ") + e.what());
    }
    return s;
  }

  const RunConfig& cfg_;
  std::ostream* log_;
  Grid1D cmf_grid_, ion_grid_, rel_grid_;
  std::optional<EigenCache> cache_;
  mutable std::mutex log_mutex_;
};

// Rows produced for one sweep point, keyed by file name.
using Rows = std::map<std::string, std::vector<std::string>>;

const std::map<std::string, std::string>& headers() {
  static const std::map<std::string, std::string> h = {
      {"spectrum.csv",
       "beta,g,state,status,spectrum.energy,spectrum.energy_lab,spectrum.parity,spectrum.exchange,"
       "spectrum.cluster,spectrum.residual,spectrum.iterations,spectrum.if_energy"},
      {"separations.csv", "beta,g,state,status,sep.d_AA,sep.d_AI,sep.P_bunched,sep.contact"},
      {"separation_dist.csv", "beta,g,state,kind,x,rho"},
      {"energies.csv",
       "beta,g,state,route,status,energy.K_A,energy.P_A,energy.V_AA,energy.V_AI,energy.K_I,energy.P_I,"
       "energy.sum,energy.total"},
      {"overlaps.csv",
       "beta,g,state,status,overlap.n2000,overlap.n1100,overlap.n1010,overlap.n1001,overlap.n0200,"
       "overlap.n0110,overlap.n0101,overlap.n0020,overlap.n0011,overlap.n0002"},
      {"fidelity.csv", "beta,g,state,status,fidelity.b1_g0,fidelity.b0_g0,fidelity.b0_gsame"},
      {"effective.csv", "beta,g,species,source,z,effective.potential,effective.orbital"},
      {"densities.csv", "beta,g,species,z,density.rho"},
      {"smf.csv", "beta,g,smf.ion_energy,smf.atom_energy,smf.energy,smf.if_energy,smf.iterations"},
  };
  return h;
}

std::vector<std::string> files_for(Emit e) {
  switch (e) {
    case Emit::spectrum: return {"spectrum.csv"};
    case Emit::separations: return {"separations.csv", "separation_dist.csv"};
    case Emit::energies: return {"energies.csv"};
    case Emit::overlaps: return {"overlaps.csv"};
    case Emit::fidelity: return {"fidelity.csv"};
    case Emit::effective: return {"effective.csv", "smf.csv"};
    case Emit::densities: return {"densities.csv"};
  }
  return {};
}

std::string blanks(std::size_t n) { return std::string(n, ','); }

void failure_rows(const RunConfig& c, double beta, double g, const std::string& status, Rows& rows) {
  const std::string pre = num(beta) + "," + num(g) + ",";
  for (int s : c.sweep.states) {
    const std::string st = pre + std::to_string(s) + ",";
    if (c.emits(Emit::spectrum)) rows["spectrum.csv"].push_back(st + status + blanks(8));
    if (c.emits(Emit::separations)) rows["separations.csv"].push_back(st + status + blanks(4));
    if (c.emits(Emit::energies)) rows["energies.csv"].push_back(st + "cmf," + status + blanks(8));
    if (c.emits(Emit::overlaps)) rows["overlaps.csv"].push_back(st + status + blanks(10));
    if (c.emits(Emit::fidelity)) rows["fidelity.csv"].push_back(st + status + blanks(3));
  }
}

struct PointInputs {
  const Solved* cmf = nullptr;
  const Solved* iff = nullptr;
  const Solved* ref_b1_g0 = nullptr;
  const Solved* ref_b0_g0 = nullptr;
  const Solved* ref_b0_g = nullptr;
};

Rows point_rows(const RunConfig& c, const Solver& solver, const OneBodySpectrum& orbitals, double beta,
                double g, const PointInputs& in) {
  Rows rows;
  if (!in.cmf->entry) {
    failure_rows(c, beta, g, in.cmf->status, rows);
    return rows;
  }
  const ModelParams p = solver.params(beta, g);
  const CacheEntry& e = *in.cmf->entry;
  const std::string pre = num(beta) + "," + num(g) + ",";
  const bool have_if = in.iff && in.iff->entry;
  const double e_r = beta > 0.0 ? cm_solution(p).energy : 0.0;

  for (int s : c.sweep.states) {
    const auto i = static_cast<std::size_t>(s);
    const WaveFn& psi = e.states[i];
    const double en = e.record.energies[i];
    const std::string st = pre + std::to_string(s) + ",";

    if (c.emits(Emit::spectrum)) {
      std::string row = st + "ok," + num(en) + "," + num(en + e_r) + "," + std::to_string(e.record.parity[i]) + "," +
                        std::to_string(e.record.exchange[i]) + "," + std::to_string(e.record.cluster[i]) + "," +
                        num(e.record.residuals[i]) + "," + std::to_string(e.record.iterations[i]) + ",";
      if (s == 0 && have_if) row += num(in.iff->entry->record.energies[0]);
      rows["spectrum.csv"].push_back(row);
    }
    if (c.emits(Emit::separations)) {
      const auto m = mean_separations(psi);
      const auto rho2 = two_body_density(psi);
      rows["separations.csv"].push_back(st + "ok," + num(m.d_aa) + "," + num(m.d_ai) + "," +
                                        num(bunching_probability(psi.grid.axes[0], rho2)) + "," +
                                        num(contact_density(psi, p)));
      const auto aa = interatomic_separation_dist(psi.grid.axes[0], rho2);
      const auto ai = atom_ion_separation_dist(psi.grid.axes[0], rho2);
      for (const auto* d : {&aa, &ai})
        for (std::size_t k = 0; k < d->x.size(); ++k)
          rows["separation_dist.csv"].push_back(st + (d->kind == SeparationKind::atom_atom ? "AA," : "AI,") +
                                                num(d->x[k]) + "," + num(d->rho[k]));
    }
    if (c.emits(Emit::energies)) {
      auto line = [&](const char* route, const EnergyBreakdown& b) {
        return st + route + ",ok," + num(b.K_A) + "," + num(b.P_A) + "," + num(b.V_AA) + "," + num(b.V_AI) + "," +
               num(b.K_I) + "," + num(b.P_I) + "," + num(b.sum()) + "," + num(b.total);
      };
      rows["energies.csv"].push_back(line("cmf", lab_energy_components(psi, p, en)));
      if (s == 0 && have_if)
        rows["energies.csv"].push_back(
            line("if", lab_energy_components_if(in.iff->entry->states[0], p, in.iff->entry->record.energies[0])));
    }
    if (c.emits(Emit::overlaps)) {
      std::string row = st + "ok";
      for (const auto& w : number_state_overlaps(psi, orbitals)) row += "," + num(w.weight);
      rows["overlaps.csv"].push_back(row);
    }
    if (c.emits(Emit::fidelity)) {
      std::string row = st + "ok";
      for (const Solved* ref : {in.ref_b1_g0, in.ref_b0_g0, in.ref_b0_g}) {
        row += ",";
        if (ref && ref->entry) row += num(fidelity(psi, ref->entry->states[0]));
      }
      rows["fidelity.csv"].push_back(row);
    }
  }

  if (have_if && (c.emits(Emit::densities) || c.emits(Emit::effective))) {
    const auto lab = lab_densities_from_if(in.iff->entry->states[0]);
    if (c.emits(Emit::densities)) {
      for (std::size_t k = 0; k < lab.atom.size(); ++k)
        rows["densities.csv"].push_back(pre + "atom," + num(lab.atom_grid.point(k)) + "," + num(lab.atom[k]));
      for (std::size_t k = 0; k < lab.ion.size(); ++k)
        rows["densities.csv"].push_back(pre + "ion," + num(lab.ion_grid.point(k)) + "," + num(lab.ion[k]));
    }
    if (c.emits(Emit::effective)) {
      SmfOptions so;
      so.eigen = c.solver.eigen;
      const auto smf = smf_solve_if(solver.ion_grid(), solver.rel_grid(), p, so);
      std::vector<double> smf_ion(smf.ion_orbital.size());
      for (std::size_t k = 0; k < smf_ion.size(); ++k) smf_ion[k] = smf.ion_orbital[k] * smf.ion_orbital[k];
      const EffectivePotential pots[] = {
          effective_atom_potential(lab.ion_grid, lab.ion, solver.rel_grid(), p, DensitySource::exact_if),
          effective_atom_potential(smf.ion_grid, smf_ion, solver.rel_grid(), p, DensitySource::smf),
          effective_ion_potential(lab.atom_grid, lab.atom, solver.ion_grid(), p, DensitySource::exact_if)};
      rows["smf.csv"].push_back(pre + num(smf.ion_energy) + "," + num(smf.atom_energy) + "," + num(smf.energy) + "," +
                                num(in.iff->entry->record.energies[0]) + "," + std::to_string(smf.iterations));
      // The SMF ion factor: its trap and the orbital it binds.
      const double ion_trap = (p.n_atoms + 1.0 / (p.beta * p.eta * p.eta)) / std::pow(p.l_a, 4);
      for (std::size_t k = 0; k < smf.ion_grid.size(); ++k) {
        const double z = smf.ion_grid.point(k);
        rows["effective.csv"].push_back(pre + "ion,smf," + num(z) + "," + num(ion_trap * z * z) + "," + num(smf_ion[k]));
      }
      for (const auto& pot : pots) {
        const auto orb = effective_ground_orbital(pot, p);
        const std::string tag = std::string(pot.species == Species::atom ? "atom," : "ion,") +
                                (pot.source == DensitySource::smf ? "smf," : "exact_if,");
        for (std::size_t k = 0; k < pot.values.size(); ++k)
          rows["effective.csv"].push_back(pre + tag + num(pot.grid.point(k)) + "," + num(pot.values[k]) + "," +
                                          num(orb.phi[k] * orb.phi[k]));
      }
    }
  }
  return rows;
}

}  // namespace

RunReport run(const RunConfig& c, std::ostream* log) {
  validate(c);
  RunReport report;
  fs::create_directories(c.output);
  const Solver solver(c, log);
  const bool any_output = !c.emit.empty();

  // Phase 1: every eigensolve the requested outputs need, deduplicated.
  std::map<Key, Solved> cmf, iff;
  if (any_output) {
    for (double b : c.sweep.beta)
      for (double g : c.sweep.g) {
        cmf[{b, g}];
        if (c.needs_ion_frame() && b > 0.0) iff[{b, g}];
      }
    if (c.emits(Emit::fidelity))
      for (double g : c.sweep.g) {
        cmf[{1.0, 0.0}];
        cmf[{0.0, 0.0}];
        cmf[{0.0, g}];
      }
  }
  std::vector<std::pair<Key, Solved*>> jobs;
  for (auto& [k, v] : cmf) jobs.push_back({k, &v});
  const std::size_t n_cmf = jobs.size();
  for (auto& [k, v] : iff) jobs.push_back({k, &v});
  parallel_for(jobs.size(), c.solver.threads, [&](std::size_t i) {
    const auto [b, g] = jobs[i].first;
    *jobs[i].second = i < n_cmf ? solver.cmf(b, g) : solver.ion_frame(b, g);
  });
  for (const auto& [k, s] : jobs) {
    report.solves += s->solved ? 1 : 0;
    report.cache_hits += s->cache_hit ? 1 : 0;
  }

  // Phase 2: observables per sweep point, then a single ordered write.
  std::vector<Key> points;
  for (double b : c.sweep.beta)
    for (double g : c.sweep.g) points.push_back({b, g});
  const OneBodySpectrum orbitals = solve_1d(build_h1b(solver.cmf_grid(), c.model));
  std::vector<Rows> rows(points.size());
  if (any_output) {
    parallel_for(points.size(), c.solver.threads, [&](std::size_t i) {
      const auto [b, g] = points[i];
      PointInputs in;
      in.cmf = &cmf.at({b, g});
      if (auto it = iff.find({b, g}); it != iff.end()) in.iff = &it->second;
      if (c.emits(Emit::fidelity)) {
        in.ref_b1_g0 = &cmf.at({1.0, 0.0});
        in.ref_b0_g0 = &cmf.at({0.0, 0.0});
        in.ref_b0_g = &cmf.at({0.0, g});
      }
      try {
        rows[i] = point_rows(c, solver, orbitals, b, g, in);
      } catch (const std::exception& e) {
        solver.say(std::string("ERROR      observables: ") + e.what());
        rows[i].clear();
        failure_rows(c, b, g, "error", rows[i]);
      }
    });
  }

  for (const auto& [b, g] : points) {
    PointStatus ps;
    ps.beta = b;
    ps.g = g;
    if (any_output) {
      const Solved& s = cmf.at({b, g});
      ps.cmf_hash = s.hash;
      ps.cmf_cache_hit = s.cache_hit;
      ps.status = s.status;
      ps.message = s.message;
      if (s.entry) {
        for (std::size_t i = 0; i < s.entry->record.residuals.size(); ++i) {
          ps.max_residual = std::max(ps.max_residual, s.entry->record.residuals[i]);
          ps.iterations = std::max(ps.iterations, s.entry->record.iterations[i]);
        }
      }
      if (auto it = iff.find({b, g}); it != iff.end()) {
        ps.if_hash = it->second.hash;
        ps.if_cache_hit = it->second.cache_hit;
        if (ps.status == "ok" && it->second.status != "ok") {
          ps.status = it->second.status;
          ps.message = it->second.message;
        }
      }
    }
    if (ps.status != "ok") ++report.failures;
    report.points.push_back(ps);
  }

  for (Emit e : c.emit)
    for (const auto& name : files_for(e)) {
      const fs::path path = fs::path(c.output) / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << headers().at(name) << '\n';
      std::size_t n = 0;
      for (const auto& r : rows)
        if (auto it = r.find(name); it != r.end())
          for (const auto& line : it->second) {
            out << line << '\n';
            ++n;
          }
      out.close();
      report.files.push_back({name, sha256_file(path), n});
    }

  json manifest;
  manifest["software"] = {{"name", "atomion"}, {"version", kVersion}};
  manifest["config"] = to_json(c);
  manifest["solves"] = report.solves;
  manifest["cache_hits"] = report.cache_hits;
  manifest["failures"] = report.failures;
  for (const auto& p : report.points)
    manifest["points"].push_back({{"beta", p.beta},
                                  {"g", p.g},
                                  {"status", p.status},
                                  {"message", p.message},
                                  {"cmf_params_hash", p.cmf_hash},
                                  {"if_params_hash", p.if_hash},
                                  {"cmf_cache_hit", p.cmf_cache_hit},
                                  {"if_cache_hit", p.if_cache_hit},
                                  {"max_residual", p.max_residual},
                                  {"iterations", p.iterations}});
  manifest["files"] = json::array();
  for (const auto& f : report.files)
    manifest["files"].push_back({{"name", f.name}, {"sha256", f.sha256}, {"rows", f.rows}});
  std::ofstream(fs::path(c.output) / "manifest.json") << manifest.dump(2) << '\n';
  return report;
}

}  // namespace atomion
