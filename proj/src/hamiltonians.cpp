#include "atomion/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atomion {

std::string to_string(Frame f) {
  switch (f) {
    case Frame::lf_one_body: return "lf-1b";
    case Frame::cmf_relative: return "cmf-relative";
    case Frame::ion_frame: return "if";
    case Frame::cm_analytic: return "cm-analytic";
    case Frame::cmf_full: return "cmf-full";
    case Frame::if_atoms: return "if-atoms";
  }
  return "?";
}

Frame frame_from_string(const std::string& s) {
  for (Frame f : {Frame::lf_one_body, Frame::cmf_relative, Frame::ion_frame, Frame::cm_analytic,
                  Frame::cmf_full, Frame::if_atoms})
    if (to_string(f) == s) return f;
  throw std::invalid_argument("unknown frame '" + s + "'");
}

std::size_t frame_dofs(Frame f) {
  switch (f) {
    case Frame::lf_one_body:
    case Frame::cm_analytic: return 1;
    case Frame::cmf_relative:
    case Frame::if_atoms: return 2;
    case Frame::ion_frame:
    case Frame::cmf_full: return 3;
  }
  return 0;
}

OperatorSpec::OperatorSpec(Frame frame, ProductGrid grid, ModelParams params, TermFlags terms,
                           std::vector<double> kinetic_symbol, std::vector<double> potential)
    : frame_(frame),
      grid_(std::move(grid)),
      params_(params),
      terms_(terms),
      symbol_(std::move(kinetic_symbol)),
      potential_(std::move(potential)),
      fft_(std::make_shared<const RealFft>(grid_.shape())) {
  if (grid_.dims() != frame_dofs(frame_)) throw std::invalid_argument("OperatorSpec: DOF count does not match frame");
  if (symbol_.size() != fft_->complex_size() || potential_.size() != grid_.size())
    throw std::invalid_argument("OperatorSpec: table size mismatch");
}

double OperatorSpec::kinetic_max() const { return *std::max_element(symbol_.begin(), symbol_.end()); }

void OperatorSpec::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != size() || out.size() != size()) throw std::invalid_argument("apply: size mismatch");
  fft_->apply_symbol(symbol_, in, out);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] += potential_[i] * in[i];
}

std::vector<double> OperatorSpec::apply(std::span<const double> in) const {
  std::vector<double> out(size());
  apply(in, out);
  return out;
}

void OperatorSpec::apply_inverse_kinetic(double shift, std::span<const double> in,
                                         std::span<double> out) const {
  if (!(shift > 0.0)) throw std::invalid_argument("apply_inverse_kinetic: shift must be positive");
  thread_local std::vector<double> inv;
  inv.resize(symbol_.size());
  for (std::size_t i = 0; i < symbol_.size(); ++i) inv[i] = 1.0 / (symbol_[i] + shift);
  fft_->apply_symbol(inv, in, out);
}

std::vector<double> OperatorSpec::dense_matrix() const {
  if (grid_.dims() != 1) throw std::invalid_argument("dense_matrix: operator is not 1D");
  const std::size_t n = size();
  std::vector<double> m(n * n), e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) m[i * n + j] = col[i];
  }
  // Symmetrise away FFT round-off.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = 0.5 * (m[i * n + j] + m[j * n + i]);
      m[i * n + j] = m[j * n + i] = a;
    }
  return m;
}

namespace {

struct AxisTables {
  std::vector<double> k;   // full wave numbers (FFT order)
  std::vector<double> kd;  // first-derivative symbol, Nyquist removed
};

AxisTables axis_tables(const Grid1D& g) { return {wave_numbers(g), first_derivative_symbol(g)}; }

// Index of k_i + k_j folded back into the Brillouin zone.
std::size_t pair_index(const AxisTables& ax, std::size_t i, std::size_t j) { return (i + j) % ax.k.size(); }

// (k_i + k_j)^2 - k_i^2 - k_j^2 with the pair momentum folded, so the symbol stays
// periodic when one atom's momentum wraps.
double pair_cross(const AxisTables& ax, std::size_t i, std::size_t j) {
  const double kk = ax.k[pair_index(ax, i, j)];
  return kk * kk - ax.k[i] * ax.k[i] - ax.k[j] * ax.k[j];
}

double one_body_potential(double r, const ModelParams& p, const TermFlags& t, double trap_coeff) {
  double v = 0.0;
  if (t.trap) v += trap_coeff * r * r;
  if (t.atom_ion) v += atom_ion_potential(r, p);
  return v;
}

double contact_coupling(const Grid1D& g, const ModelParams& p, const TermFlags& t) {
  if (!t.contact) return 0.0;
  return contact_diagonal(g, effective_contact_strength(p.g, g.spacing(), p.contact));
}

}  // namespace

OperatorSpec build_h1b(const Grid1D& grid, const ModelParams& p, TermFlags terms) {
  p.validate();
  const auto ax = axis_tables(grid);
  const double l4 = std::pow(p.l_a, 4);
  ProductGrid pg{{grid}};
  auto symbol = half_spectrum_table(pg.shape(), [&](std::span<const std::size_t> i) {
    return terms.kinetic ? ax.k[i[0]] * ax.k[i[0]] : 0.0;
  });
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = one_body_potential(grid.point(k), p, terms, 1.0 / l4);
  return OperatorSpec(Frame::lf_one_body, pg, p, terms, std::move(symbol), std::move(v));
}

OperatorSpec build_relative_cmf(const Grid1D& grid, const ModelParams& p, TermFlags terms) {
  p.validate();
  if (p.eta != 1.0) throw std::invalid_argument("coupled CM not supported (eta != 1)");
  if (p.n_atoms != 2) throw std::invalid_argument("build_relative_cmf: only N = 2 is supported");

  const double beta = p.beta;
  const double d = p.d();
  const double l4 = std::pow(p.l_a, 4);
  const auto ax = axis_tables(grid);
  ProductGrid pg{{grid, grid}};

  auto symbol = half_spectrum_table(pg.shape(), [&](std::span<const std::size_t> i) {
    double t = 0.0;
    if (terms.kinetic) t += (1.0 + beta) * (ax.k[i[0]] * ax.k[i[0]] + ax.k[i[1]] * ax.k[i[1]]);
    // -2 beta d_1 d_2  ->  +2 beta k_1 k_2
    if (terms.derivative_coupling) t += beta * pair_cross(ax, i[0], i[1]);
    return t;
  });

  const std::size_t n = grid.size();
  const double contact = contact_coupling(grid, p, terms);
  std::vector<double> one(n);
  for (std::size_t k = 0; k < n; ++k) one[k] = one_body_potential(grid.point(k), p, terms, (1.0 - d) / l4);

  std::vector<double> v(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double x = one[a] + one[b];
      if (terms.positional_coupling) x -= 2.0 * d / l4 * grid.odd_point(a) * grid.odd_point(b);
      if (a == b) x += contact;
      v[a * n + b] = x;
    }
  return OperatorSpec(Frame::cmf_relative, pg, p, terms, std::move(symbol), std::move(v));
}

OperatorSpec build_if_hamiltonian(const Grid1D& grid_ion, const Grid1D& grid_rel,
                                  const ModelParams& p, TermFlags terms) {
  p.validate();
  if (!(p.beta > 0.0)) throw std::invalid_argument("ion frame requires beta > 0");
  if (p.n_atoms != 2) throw std::invalid_argument("build_if_hamiltonian: only N = 2 is supported");

  const double beta = p.beta;
  const double l4 = std::pow(p.l_a, 4);
  const auto ai = axis_tables(grid_ion);
  const auto ar = axis_tables(grid_rel);
  ProductGrid pg{{grid_ion, grid_rel, grid_rel}};

  auto symbol = half_spectrum_table(pg.shape(), [&](std::span<const std::size_t> i) {
    const double kI = ai.k[i[0]], k1 = ar.k[i[1]], k2 = ar.k[i[2]];
    double t = 0.0;
    if (terms.kinetic) t += beta * kI * kI + (1.0 + beta) * (k1 * k1 + k2 * k2);
    if (terms.derivative_coupling) {
      // -2 beta d_1 d_2 + 2 beta d_I (d_1 + d_2)
      t += beta * pair_cross(ar, i[1], i[2]);
      if (terms.ion_coupling) t -= 2.0 * beta * ai.kd[i[0]] * ar.kd[pair_index(ar, i[1], i[2])];
    }
    return t;
  });

  const std::size_t ni = grid_ion.size(), nr = grid_rel.size();
  const double contact = contact_coupling(grid_rel, p, terms);
  const double ion_trap = (p.n_atoms + 1.0 / (beta * p.eta * p.eta)) / l4;
  std::vector<double> one(nr);
  for (std::size_t k = 0; k < nr; ++k) one[k] = one_body_potential(grid_rel.point(k), p, terms, 1.0 / l4);

  std::vector<double> v(ni * nr * nr);
  for (std::size_t a = 0; a < ni; ++a) {
    const double zi = grid_ion.odd_point(a);
    const double vi = terms.trap ? ion_trap * grid_ion.point(a) * grid_ion.point(a) : 0.0;
    for (std::size_t b = 0; b < nr; ++b)
      for (std::size_t c = 0; c < nr; ++c) {
        double x = vi + one[b] + one[c];
        if (terms.positional_coupling && terms.ion_coupling) x += 2.0 * zi * (grid_rel.odd_point(b) + grid_rel.odd_point(c)) / l4;
        if (b == c) x += contact;
        v[(a * nr + b) * nr + c] = x;
      }
  }
  return OperatorSpec(Frame::ion_frame, pg, p, terms, std::move(symbol), std::move(v));
}

OperatorSpec build_if_atom_pair(const Grid1D& grid, const ModelParams& p, TermFlags terms) {
  p.validate();
  if (p.n_atoms != 2) throw std::invalid_argument("build_if_atom_pair: only N = 2 is supported");
  const double beta = p.beta;
  const double l4 = std::pow(p.l_a, 4);
  const auto ax = axis_tables(grid);
  ProductGrid pg{{grid, grid}};
  auto symbol = half_spectrum_table(pg.shape(), [&](std::span<const std::size_t> i) {
    double t = 0.0;
    if (terms.kinetic) t += (1.0 + beta) * (ax.k[i[0]] * ax.k[i[0]] + ax.k[i[1]] * ax.k[i[1]]);
    if (terms.derivative_coupling) t += beta * pair_cross(ax, i[0], i[1]);
    return t;
  });
  const std::size_t n = grid.size();
  const double contact = contact_coupling(grid, p, terms);
  std::vector<double> one(n);
  for (std::size_t k = 0; k < n; ++k) one[k] = one_body_potential(grid.point(k), p, terms, 1.0 / l4);
  std::vector<double> v(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) v[a * n + b] = one[a] + one[b] + (a == b ? contact : 0.0);
  return OperatorSpec(Frame::if_atoms, pg, p, terms, std::move(symbol), std::move(v));
}

OperatorSpec build_cm_oscillator(const Grid1D& grid, const ModelParams& p) {
  p.validate();
  if (!(p.beta > 0.0)) throw std::invalid_argument("centre of mass requires beta > 0");
  const double d = p.d();
  const double l4 = std::pow(p.l_a, 4);
  const auto ax = axis_tables(grid);
  ProductGrid pg{{grid}};
  auto symbol = half_spectrum_table(pg.shape(), [&](std::span<const std::size_t> i) {
    return d * ax.k[i[0]] * ax.k[i[0]];
  });
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = grid.point(k) * grid.point(k) / (l4 * d);
  return OperatorSpec(Frame::cm_analytic, pg, p, TermFlags{}, std::move(symbol), std::move(v));
}

OperatorSpec build_full_cmf(const Grid1D& grid_cm, const Grid1D& grid_rel, const ModelParams& p,
                            TermFlags terms) {
  p.validate();
  if (!(p.beta > 0.0)) throw std::invalid_argument("centre of mass requires beta > 0");
  if (p.n_atoms != 2) throw std::invalid_argument("build_full_cmf: only N = 2 is supported");

  const double beta = p.beta, eta2 = p.eta * p.eta, d = p.d();
  const double l4 = std::pow(p.l_a, 4);
  const auto ac = axis_tables(grid_cm);
  const auto ar = axis_tables(grid_rel);
  ProductGrid pg{{grid_cm, grid_rel, grid_rel}};

  auto symbol = half_spectrum_table(pg.shape(), [&](std::span<const std::size_t> i) {
    double t = 0.0;
    if (terms.kinetic)
      t += d * ac.k[i[0]] * ac.k[i[0]] +
           (1.0 + beta) * (ar.k[i[1]] * ar.k[i[1]] + ar.k[i[2]] * ar.k[i[2]]);
    if (terms.derivative_coupling) t += beta * pair_cross(ar, i[1], i[2]);
    return t;
  });

  // Relative quadratic form sum r_i^2 + s2 (r_1 + r_2)^2 over l^4; s2 = -d at eta = 1.
  const double s2 = -2.0 * d + d * d * (p.n_atoms + 1.0 / (beta * eta2));
  const double cm_trap = (1.0 + p.n_atoms * beta * eta2) / (l4 * beta * eta2);
  const double cm_coupling = 2.0 * d * (eta2 - 1.0) / (l4 * beta * eta2);

  const std::size_t nc = grid_cm.size(), nr = grid_rel.size();
  const double contact = contact_coupling(grid_rel, p, terms);
  std::vector<double> v(nc * nr * nr);
  for (std::size_t a = 0; a < nc; ++a) {
    const double R = grid_cm.point(a), r_odd = grid_cm.odd_point(a);
    for (std::size_t b = 0; b < nr; ++b)
      for (std::size_t c = 0; c < nr; ++c) {
        const double r1 = grid_rel.point(b), r2 = grid_rel.point(c);
        const double s = grid_rel.odd_point(b) + grid_rel.odd_point(c);
        double x = 0.0;
        if (terms.trap) x += cm_trap * R * R + (r1 * r1 + r2 * r2) / l4;
        if (terms.positional_coupling) x += s2 * s * s / l4 + cm_coupling * r_odd * s;
        if (terms.atom_ion) x += atom_ion_potential(r1, p) + atom_ion_potential(r2, p);
        if (b == c) x += contact;
        v[(a * nr + b) * nr + c] = x;
      }
  }
  return OperatorSpec(Frame::cmf_full, pg, p, terms, std::move(symbol), std::move(v));
}

CMSolution cm_solution(const ModelParams& p) {
  p.validate();
  if (!(p.beta > 0.0)) throw std::invalid_argument("cm_solution: no centre-of-mass motion for a pinned ion (beta = 0)");
  const double d = p.d();
  const double l2 = p.l_a * p.l_a;
  CMSolution s;
  s.omega = 2.0 / l2;
  s.energy = 1.0 / l2;
  s.mean_r2 = 0.5 * d * l2;
  s.mean_d2r = 1.0 / (2.0 * d * l2);
  return s;
}

}  // namespace atomion
