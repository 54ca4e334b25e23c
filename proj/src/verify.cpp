#include "atomion/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "atomion/eigensolve.hpp"

namespace atomion {

bool VerifyReport::ok() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

CheckResult analytic_oscillator(const RunConfig& c) {
  TermFlags t;
  t.atom_ion = false;
  const auto sp = solve_1d(build_h1b(make_grid(c.grid.lf_extent, c.grid.lf_points), c.model, t));
  const double w = 1.0 / (c.model.l_a * c.model.l_a);
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double exact = (2.0 * k + 1.0) * w;
    worst = std::max(worst, std::abs(sp.energies[k] - exact) / exact);
  }
  return {"analytic_oscillator", worst <= 1e-8, fmt("max relative error %.3e (tolerance 1e-8)", worst)};
}

CheckResult bound_states(const OneBodySpectrum& sp) {
  int negative = 0;
  for (double e : sp.energies) negative += e < 0.0;
  return {"bound_states", negative == 2,
          fmt("%.0f negative eigenvalues of h_1b (expected 2), lowest %.10g", negative, sp.energies[0])};
}

CheckResult boundary_decay(const OneBodySpectrum& sp, const char* which) {
  const std::size_t n = sp.grid.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 50);
  double worst = 0.0;
  for (int s = 0; s < 4; ++s) {
    double peak = 0.0, tail = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = sp.orbitals[s][k] * sp.orbitals[s][k];
      peak = std::max(peak, d);
      if (k < edge || k >= n - edge) tail = std::max(tail, d);
    }
    worst = std::max(worst, tail / peak);
  }
  CheckResult r{std::string("boundary_decay_") + which, worst <= 1e-8,
                fmt("edge/peak density %.3e (limit 1e-8) at extent L=%g", worst, sp.grid.extent())};
  if (!r.passed) r.detail += "; enlarge the grid extent";
  return r;
}

// Symmetry of a matrix-free operator, and invariance of the exchange and
// parity sectors, on random vectors.
CheckResult operator_symmetry(const OperatorSpec& op, const std::string& name) {
  const auto u = random_vector(op.size(), 11), v = random_vector(op.size(), 12);
  const auto hu = op.apply(u), hv = op.apply(v);
  const double scale = norm2(u) * norm2(hv) + norm2(v) * norm2(hu);
  const double herm = std::abs(dot(u, hv) - dot(hu, v)) / scale;
  double leak = 0.0;
  for (const Sector s : {Sector{+1, 0}, Sector{0, +1}}) {
    auto pu = u;
    project_sector(op.grid(), s, pu);
    const auto hpu = op.apply(pu);
    auto phpu = hpu;
    project_sector(op.grid(), s, phpu);
    double diff = 0.0;
    for (std::size_t i = 0; i < hpu.size(); ++i) diff += (hpu[i] - phpu[i]) * (hpu[i] - phpu[i]);
    leak = std::max(leak, std::sqrt(diff) / norm2(hpu));
  }
  const double worst = std::max(herm, leak);
  return {"hermiticity_" + name, worst <= 1e-10,
          fmt("asymmetry %.3e, symmetry-sector leakage %.3e (tolerance 1e-10)", herm, leak)};
}

CheckResult dense_symmetry(const OperatorSpec& op) {
  const auto m = op.dense_matrix();
  const std::size_t n = op.size();
  double worst = 0.0, big = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(m[i * n + j] - m[j * n + i]));
      big = std::max(big, std::abs(m[i * n + j]));
    }
  return {"hermiticity_h1b", worst <= 1e-10 * big, fmt("max |H - H^T| / max |H| = %.3e (tolerance 1e-10)", worst / big)};
}

CheckResult separable_limit(const RunConfig& c, const OneBodySpectrum& eps) {
  ModelParams p = c.model;
  p.g = 0.0;
  p.beta = 0.0;
  const auto res = lowest_eigenstates(build_relative_cmf(make_grid(c.grid.cmf_extent, c.grid.cmf_points), p), 5,
                                      c.solver.eigen);
  const auto& e = eps.energies;
  const double oracle[5] = {2 * e[0], e[0] + e[1], 2 * e[1], e[0] + e[2], e[0] + e[3]};
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) worst = std::max(worst, std::abs(res.record.energies[k] - oracle[k]));
  return {"separable_limit", worst <= 1e-8, fmt("max |E_k - (e_i + e_j)| = %.3e (tolerance 1e-8)", worst)};
}

CheckResult frame_equivalence(const RunConfig& c) {
  ModelParams p = c.model;
  p.g = 0.0;
  p.beta = 1.0;
  const auto cmf = lowest_eigenstates(build_relative_cmf(make_grid(c.grid.cmf_extent, c.grid.cmf_points), p), 1,
                                      c.solver.eigen);
  EigenOptions eo = c.solver.eigen;
  eo.tolerance = c.solver.tolerance_3d;
  const auto gs = ground_state_3d(build_if_hamiltonian(make_grid(c.grid.if_ion_extent, c.grid.if_ion_points),
                                                       make_grid(c.grid.if_rel_extent, c.grid.if_rel_points), p),
                                  eo, c.solver.imaginary);
  const double lab = cmf.record.energies[0] + cm_solution(p).energy;
  const double rel = std::abs(gs.energy - lab) / std::abs(lab);
  char buf[200];
  std::snprintf(buf, sizeof buf, "ion frame %.8g vs centre-of-mass frame %.8g, relative difference %.3e (tolerance 1e-2)",
                gs.energy, lab, rel);
  return {"frame_equivalence", rel <= 1e-2, buf};
}

CheckResult grid_halving(const RunConfig& c) {
  ModelParams p = c.model;
  p.g = 1.0;
  p.beta = 0.0;
  const Grid1D coarse = make_grid(c.grid.cmf_extent, c.grid.cmf_points);
  const Grid1D fine = make_grid(c.grid.cmf_extent, 2 * c.grid.cmf_points);
  const auto a = lowest_eigenstates(build_relative_cmf(coarse, p), 5, c.solver.eigen);
  std::vector<WaveFn> warm;
  for (const auto& s : a.states) warm.push_back(resample(s, ProductGrid{{fine, fine}}));
  const auto b = lowest_eigenstates(build_relative_cmf(fine, p), 5, c.solver.eigen, &warm);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) worst = std::max(worst, std::abs(a.record.energies[k] - b.record.energies[k]));
  return {"grid_halving", worst <= 1e-4, fmt("max eigenvalue shift %.3e on halving the spacing (tolerance 1e-4)", worst)};
}

}  // namespace

std::vector<std::string> verify_check_names() {
  return {"analytic_oscillator", "bound_states",    "boundary_decay_lf", "boundary_decay_cmf",
          "hermiticity_h1b",     "hermiticity_cmf", "hermiticity_if",    "separable_limit",
          "grid_halving",        "frame_equivalence"};
}

VerifyReport verify(const RunConfig& c, std::ostream* log, const std::vector<std::string>& only) {
  const auto known = verify_check_names();
  for (const auto& name : only)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw std::invalid_argument("verify: unknown check " + name);
  VerifyReport report;
  auto record = [&](const std::function<CheckResult()>& check, const char* name) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) return;
    CheckResult r{name, false, {}};
    try {
      r = check();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (log) *log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << std::endl;
    report.checks.push_back(std::move(r));
  };

  const Grid1D lf = make_grid(c.grid.lf_extent, c.grid.lf_points);
  const Grid1D cg = make_grid(c.grid.cmf_extent, c.grid.cmf_points);
  const auto h_lf = build_h1b(lf, c.model);
  const auto sp_lf = solve_1d(h_lf);
  const auto sp_cmf = solve_1d(build_h1b(cg, c.model));

  record([&] { return analytic_oscillator(c); }, "analytic_oscillator");
  record([&] { return bound_states(sp_lf); }, "bound_states");
  record([&] { return boundary_decay(sp_lf, "lf"); }, "boundary_decay_lf");
  record([&] { return boundary_decay(sp_cmf, "cmf"); }, "boundary_decay_cmf");
  record([&] { return dense_symmetry(h_lf); }, "hermiticity_h1b");
  record([&] {
    ModelParams p = c.model;
    p.g = 1.0;
    p.beta = 1.0;
    return operator_symmetry(build_relative_cmf(cg, p), "cmf");
  }, "hermiticity_cmf");
  record([&] {
    ModelParams p = c.model;
    p.g = 1.0;
    p.beta = 1.0;
    return operator_symmetry(build_if_hamiltonian(make_grid(c.grid.if_ion_extent, c.grid.if_ion_points),
                                                  make_grid(c.grid.if_rel_extent, c.grid.if_rel_points), p),
                             "if");
  }, "hermiticity_if");
  record([&] { return separable_limit(c, sp_cmf); }, "separable_limit");
  record([&] { return grid_halving(c); }, "grid_halving");
  record([&] { return frame_equivalence(c); }, "frame_equivalence");
  return report;
}

}  // namespace atomion
