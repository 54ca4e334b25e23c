#include <doctest.h>

#include <cmath>
#include <random>

#include "atomion/eigensolve.hpp"

using namespace atomion;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

ModelParams params(double beta, double g) {
  auto p = default_params();
  p.beta = beta;
  p.g = g;
  return p;
}

}  // namespace

TEST_CASE("frame names and degrees of freedom") {
  for (auto f : {Frame::lf_one_body, Frame::cmf_relative, Frame::ion_frame, Frame::cm_analytic, Frame::cmf_full,
                 Frame::if_atoms})
    CHECK(frame_from_string(to_string(f)) == f);
  CHECK(frame_dofs(Frame::lf_one_body) == 1);
  CHECK(frame_dofs(Frame::cmf_relative) == 2);
  CHECK(frame_dofs(Frame::ion_frame) == 3);
  CHECK_THROWS(frame_from_string("bogus"));
}

TEST_CASE("h_1b dense matrix is symmetric and matches apply") {
  const auto op = build_h1b(make_grid(4.0, 64), default_params());
  const auto m = op.dense_matrix();
  const auto v = random_vector(64, 3);
  const auto hv = op.apply(v);
  for (std::size_t i = 0; i < 64; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 64; ++j) {
      CHECK(m[i * 64 + j] == doctest::Approx(m[j * 64 + i]));
      row += m[i * 64 + j] * v[j];
    }
    CHECK(row == doctest::Approx(hv[i]).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("relative operator is symmetric for beta > 0 and g > 0") {
  const auto op = build_relative_cmf(make_grid(4.0, 48), params(1.0, 3.0));
  const auto u = random_vector(op.size(), 1), v = random_vector(op.size(), 2);
  CHECK(dot(u, op.apply(v)) == doctest::Approx(dot(op.apply(u), v)).epsilon(1e-12));
}

TEST_CASE("relative operator at g = 0, beta = 0 acts separably on products of orbitals") {
  const auto g = make_grid(4.0, 64);
  const auto sp = solve_1d(build_h1b(g, default_params()));
  const auto op = build_relative_cmf(g, params(0.0, 0.0));
  std::vector<double> prod(64 * 64);
  for (std::size_t a = 0; a < 64; ++a)
    for (std::size_t b = 0; b < 64; ++b) prod[a * 64 + b] = sp.orbitals[0][a] * sp.orbitals[2][b];
  const auto h = op.apply(prod);
  for (std::size_t i = 0; i < prod.size(); ++i)
    CHECK(h[i] == doctest::Approx((sp.energies[0] + sp.energies[2]) * prod[i]).scale(1.0).epsilon(1e-8));
}

TEST_CASE("term flags remove terms") {
  const auto g = make_grid(4.0, 32);
  TermFlags t;
  t.atom_ion = false;
  t.contact = false;
  t.kinetic = false;
  t.trap = false;
  t.positional_coupling = false;
  const auto op = build_relative_cmf(g, params(1.0, 5.0), t);
  for (double v : op.potential()) CHECK(v == 0.0);
}

TEST_CASE("builders reject unsupported parameters") {
  auto p = default_params();
  p.eta = 2.0;
  CHECK_THROWS(build_relative_cmf(make_grid(4.0, 32), p));
  CHECK_THROWS(build_if_hamiltonian(make_grid(2.0, 16), make_grid(3.0, 32), params(0.0, 0.0)));
}

TEST_CASE("centre-of-mass solution") {
  const auto p = params(1.0, 0.0);
  const auto cm = cm_solution(p);
  CHECK(cm.omega == doctest::Approx(8.0));
  CHECK(cm.energy == doctest::Approx(4.0));
  const double d = p.d();
  CHECK(cm.mean_r2 == doctest::Approx(d * 0.25 / 2.0));
  CHECK(cm.mean_d2r == doctest::Approx(1.0 / (2.0 * d * 0.25)));
  // Numerical oscillator on a grid.
  const auto sp = solve_1d(build_cm_oscillator(make_grid(2.0, 128), p));
  CHECK(sp.energies[0] == doctest::Approx(cm.energy).epsilon(1e-9));
  CHECK(sp.energies[1] == doctest::Approx(3.0 * cm.energy).epsilon(1e-9));
}

TEST_CASE("ion-frame operator without the ion coupling separates") {
  const auto p = params(1.0, 0.0);
  const auto gi = make_grid(2.0, 16), gr = make_grid(3.0, 48);
  TermFlags t;
  t.ion_coupling = false;
  const auto full = build_if_hamiltonian(gi, gr, p, t);
  const auto pair = build_if_atom_pair(gr, p);
  // psi = chi(z_I) * u(r1, r2) with u random.
  std::vector<double> chi(16);
  for (std::size_t a = 0; a < 16; ++a) chi[a] = std::exp(-3.0 * gi.point(a) * gi.point(a));
  const auto u = random_vector(48 * 48, 9);
  std::vector<double> psi(16 * 48 * 48);
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t k = 0; k < u.size(); ++k) psi[a * u.size() + k] = chi[a] * u[k];
  const auto h = full.apply(psi);
  const auto hu = pair.apply(u);
  // Subtract the atom-pair action; the remainder must be (h_I chi) * u.
  std::vector<double> rest(h.size());
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t k = 0; k < u.size(); ++k) rest[a * u.size() + k] = h[a * u.size() + k] - chi[a] * hu[k];
  for (std::size_t a = 0; a < 16; ++a) {
    const double ratio = rest[a * u.size() + 5] / u[5];
    for (std::size_t k = 0; k < u.size(); k += 97) CHECK(rest[a * u.size() + k] == doctest::Approx(ratio * u[k]).scale(1e-6));
  }
}
