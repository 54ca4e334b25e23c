#include <doctest.h>

#include <cmath>

#include "atomion/eigensolve.hpp"

using namespace atomion;

namespace {

ModelParams params(double beta, double g) {
  auto p = default_params();
  p.beta = beta;
  p.g = g;
  return p;
}

}  // namespace

TEST_CASE("solve_1d: harmonic oscillator levels and normalisation") {
  TermFlags t;
  t.atom_ion = false;
  const auto g = make_grid(4.0, 128);
  const auto sp = solve_1d(build_h1b(g, default_params(), t));
  for (int k = 0; k < 5; ++k) CHECK(sp.energies[k] == doctest::Approx(4.0 * (2 * k + 1)).epsilon(1e-10));
  std::vector<double> d(g.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = sp.orbitals[3][i] * sp.orbitals[3][i];
  CHECK(integrate(g, d) == doctest::Approx(1.0));
}

TEST_CASE("solve_1d: h_1b has two bound states") {
  const auto sp = solve_1d(build_h1b(make_grid(4.0, 512), default_params()));
  CHECK(sp.energies[0] == doctest::Approx(-22.6924292011).epsilon(1e-9));
  CHECK(sp.energies[1] == doctest::Approx(-18.8452108257).epsilon(1e-9));
  CHECK(sp.energies[2] > 0.0);
}

TEST_CASE("sector projection is idempotent and exchange-symmetric") {
  ProductGrid pg{{make_grid(2.0, 16), make_grid(2.0, 16)}};
  std::vector<double> v(pg.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i * i % 101));
  project_sector(pg, {+1, -1}, v);
  auto w = v;
  project_sector(pg, {+1, -1}, w);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(w[i] == doctest::Approx(v[i]));
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = 0; b < 16; ++b) {
      CHECK(v[a * 16 + b] == doctest::Approx(v[b * 16 + a]));
      CHECK(v[a * 16 + b] == doctest::Approx(-v[pg.axes[0].mirror(a) * 16 + pg.axes[0].mirror(b)]));
    }
}

TEST_CASE("lowest_eigenstates reproduces the separable oracle on the same grid") {
  const auto g = make_grid(4.0, 96);
  const auto e = solve_1d(build_h1b(g, default_params())).energies;
  const auto r = lowest_eigenstates(build_relative_cmf(g, params(0.0, 0.0)), 5);
  const double oracle[5] = {2 * e[0], e[0] + e[1], 2 * e[1], e[0] + e[2], e[0] + e[3]};
  for (int k = 0; k < 5; ++k) CHECK(r.record.energies[k] == doctest::Approx(oracle[k]).epsilon(1e-10));
  CHECK(r.record.parity[0] == +1);
  CHECK(r.record.parity[1] == -1);
  for (const auto& s : r.states) {
    CHECK(s.norm() == doctest::Approx(1.0));
    CHECK(s.exchange == +1);
  }
  CHECK(inner_product(r.states[0], r.states[2]) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("lowest_eigenstates is deterministic and warm starts agree") {
  const auto g = make_grid(4.0, 64);
  const auto op = build_relative_cmf(g, params(1.0, 2.0));
  const auto a = lowest_eigenstates(op, 3);
  const auto b = lowest_eigenstates(op, 3);
  CHECK(a.states[0].amplitude == b.states[0].amplitude);
  const auto c = lowest_eigenstates(op, 3, {}, &a.states);
  for (int k = 0; k < 3; ++k) CHECK(c.record.energies[k] == doctest::Approx(a.record.energies[k]).epsilon(1e-10));
}

TEST_CASE("non-convergence raises ConvergenceError with a residual history") {
  EigenOptions o;
  o.max_iterations = 2;
  try {
    lowest_eigenstates(build_relative_cmf(make_grid(4.0, 64), params(0.0, 1.0)), 2, o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(!e.history().empty());
  }
}

TEST_CASE("exchange_project and resample") {
  const auto g = make_grid(4.0, 64);
  const auto r = lowest_eigenstates(build_relative_cmf(g, params(0.0, 1.0)), 1);
  const auto same = exchange_project(r.states[0]);
  CHECK(inner_product(same, r.states[0]) == doctest::Approx(1.0));
  const auto fine = make_grid(4.0, 128);
  const auto up = resample(r.states[0], ProductGrid{{fine, fine}});
  CHECK(up.norm() == doctest::Approx(1.0));
  const auto back = resample(up, r.states[0].grid);
  CHECK(inner_product(back, r.states[0]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("ion-frame ground state with the coupling switched off is a product") {
  auto p = params(1.0, 0.0);
  const auto gi = make_grid(2.0, 16), gr = make_grid(3.0, 48);
  TermFlags t;
  t.ion_coupling = false;
  EigenOptions o;
  o.tolerance = 1e-7;
  const auto gs = ground_state_3d(build_if_hamiltonian(gi, gr, p, t), o);
  // Ion factor: -beta d^2 + (N + 1/beta) z^2 / l^4, ground energy sqrt(beta (N + 1/beta)) / l^2.
  const auto pair = lowest_eigenstates(build_if_atom_pair(gr, p), 1, o);
  CHECK(gs.energy == doctest::Approx(pair.record.energies[0] + 4.0 * std::sqrt(3.0)).epsilon(1e-6));
  CHECK(gs.residual < 1e-7);
}
