#include "atomion/observables.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "atomion/fft.hpp"

namespace atomion {

namespace {

bool is_pair_frame(Frame f) {
  return f == Frame::cmf_relative || f == Frame::if_atoms || f == Frame::ion_frame;
}

void require_pair_grid(const ProductGrid& g, const char* who) {
  const std::size_t d = g.dims();
  if (d < 2 || !(g.axes[d - 1] == g.axes[d - 2]))
    throw std::invalid_argument(std::string(who) + ": needs two identical atom axes");
}

void require_square(const Grid1D& grid, std::span<const double> rho2, const char* who) {
  if (rho2.size() != grid.size() * grid.size())
    throw std::invalid_argument(std::string(who) + ": density is not on a square grid");
}

double euclidean_form(const ProductGrid& grid, const std::vector<double>& symbol,
                      const std::vector<double>& amp) {
  RealFft fft(grid.shape());
  return fft.quadratic_form(symbol, amp) * grid.cell_volume();
}

}  // namespace

std::vector<double> two_body_density(const WaveFn& psi) {
  if (psi.grid.dims() != 2) throw std::invalid_argument("two_body_density: needs a two-atom state");
  require_pair_grid(psi.grid, "two_body_density");
  std::vector<double> rho(psi.amplitude.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = psi.amplitude[i] * psi.amplitude[i];
  return rho;
}

std::vector<double> atom_pair_density(const WaveFn& psi) {
  require_pair_grid(psi.grid, "atom_pair_density");
  const std::size_t n = psi.grid.axes.back().size();
  const std::size_t block = n * n;
  const std::size_t lead = psi.amplitude.size() / block;
  const double w = psi.grid.cell_volume() / (psi.grid.axes.back().spacing() * psi.grid.axes.back().spacing());
  std::vector<double> rho(block, 0.0);
  for (std::size_t a = 0; a < lead; ++a)
    for (std::size_t i = 0; i < block; ++i) {
      const double v = psi.amplitude[a * block + i];
      rho[i] += v * v * w;
    }
  return rho;
}

SeparationDist interatomic_separation_dist(const Grid1D& grid, std::span<const double> rho2) {
  require_square(grid, rho2, "interatomic_separation_dist");
  const std::size_t n = grid.size();
  const double dz = grid.spacing();
  SeparationDist out;
  out.kind = SeparationKind::atom_atom;
  out.x.resize(2 * n - 1);
  out.rho.assign(2 * n - 1, 0.0);
  for (std::size_t m = 0; m < 2 * n - 1; ++m)
    out.x[m] = (static_cast<double>(m) - static_cast<double>(n - 1)) * dz;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.rho[i + (n - 1) - j] += rho2[i * n + j] * dz;
  return out;
}

SeparationDist atom_ion_separation_dist(const Grid1D& grid, std::span<const double> rho2) {
  require_square(grid, rho2, "atom_ion_separation_dist");
  const std::size_t n = grid.size();
  SeparationDist out;
  out.kind = SeparationKind::atom_ion;
  out.x = grid.points();
  out.rho.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.rho[i] += rho2[i * n + j] * grid.spacing();
  return out;
}

MeanSeparations mean_separations(const WaveFn& psi) {
  if (!is_pair_frame(psi.frame)) throw std::invalid_argument("mean_separations: unsupported frame");
  if (std::abs(psi.norm() - 1.0) > 1e-8) throw std::invalid_argument("mean_separations: state is not normalised");
  const Grid1D& g = psi.grid.axes.back();
  const auto rho2 = atom_pair_density(psi);
  const auto aa = interatomic_separation_dist(g, rho2);
  const auto ai = atom_ion_separation_dist(g, rho2);
  MeanSeparations m;
  for (std::size_t k = 0; k < aa.x.size(); ++k) m.d_aa += std::abs(aa.x[k]) * aa.rho[k] * g.spacing();
  for (std::size_t k = 0; k < ai.x.size(); ++k) m.d_ai += std::abs(ai.x[k]) * ai.rho[k] * g.spacing();
  return m;
}

double bunching_probability(const Grid1D& grid, std::span<const double> rho2) {
  require_square(grid, rho2, "bunching_probability");
  const std::size_t n = grid.size();
  std::vector<double> pos(n), neg(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = grid.point(k);
    pos[k] = z > 0.0 ? 1.0 : (z == 0.0 ? 0.5 : 0.0);
    neg[k] = 1.0 - pos[k];
  }
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p += rho2[i * n + j] * (pos[i] * pos[j] + neg[i] * neg[j]);
  return p * grid.spacing() * grid.spacing();
}

double contact_expectation(const WaveFn& psi) {
  require_pair_grid(psi.grid, "contact_expectation");
  const Grid1D& g = psi.grid.axes.back();
  const std::size_t n = g.size(), block = n * n;
  const std::size_t lead = psi.amplitude.size() / block;
  double s = 0.0;
  for (std::size_t a = 0; a < lead; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      const double v = psi.amplitude[a * block + i * n + i];
      s += v * v;
    }
  return s * psi.grid.cell_volume() / g.spacing();
}

double contact_density(const WaveFn& psi, const ModelParams& p) {
  const double dz = psi.grid.axes.back().spacing();
  return effective_contact_slope(p.g, dz, p.contact) * contact_expectation(psi);
}

EnergyBreakdown lab_energy_components(const WaveFn& rel, const ModelParams& p, double energy) {
  if (rel.frame != Frame::cmf_relative || rel.grid.dims() != 2)
    throw std::invalid_argument("lab_energy_components: needs a centre-of-mass-frame relative state");
  if (p.eta != 1.0) throw std::invalid_argument("lab_energy_components: eta != 1 not supported");
  require_pair_grid(rel.grid, "lab_energy_components");

  const Grid1D& g = rel.grid.axes[0];
  const auto k = wave_numbers(g);
  const auto shape = rel.grid.shape();
  const auto k1sq = half_spectrum_table(shape, [&](std::span<const std::size_t> i) { return k[i[0]] * k[i[0]]; });
  const auto k2sq = half_spectrum_table(shape, [&](std::span<const std::size_t> i) { return k[i[1]] * k[i[1]]; });
  // Ion kinetic symbol in these coordinates: the folded pair momentum squared.
  const auto pair = half_spectrum_table(shape, [&](std::span<const std::size_t> i) {
    const double kk = k[(i[0] + i[1]) % k.size()];
    return kk * kk;
  });
  const double t1 = euclidean_form(rel.grid, k1sq, rel.amplitude);
  const double t2 = euclidean_form(rel.grid, k2sq, rel.amplitude);
  const double tp = euclidean_form(rel.grid, pair, rel.amplitude);

  const double d = p.beta > 0.0 ? p.d() : 0.0;
  const std::size_t n = g.size();
  const double dv = rel.grid.cell_volume();
  const auto vai = atom_ion_potential(g, p);
  double rel_pa = 0.0, s2 = 0.0, v_ai = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const double w = rel.amplitude[a * n + b] * rel.amplitude[a * n + b] * dv;
      const double r1 = g.point(a), r2 = g.point(b), s = r1 + r2;
      rel_pa += w * ((r1 - d * s) * (r1 - d * s) + (r2 - d * s) * (r2 - d * s));
      s2 += w * s * s;
      v_ai += w * (vai[a] + vai[b]);
    }

  const double l4 = std::pow(p.l_a, 4);
  EnergyBreakdown e;
  e.V_AI = v_ai;
  e.V_AA = effective_contact_strength(p.g, g.spacing(), p.contact) * contact_expectation(rel);
  if (p.beta > 0.0) {
    const CMSolution cm = cm_solution(p);
    const double nat = p.n_atoms;
    e.K_A = t1 + t2 + nat * d * d * cm.mean_d2r;
    e.K_I = p.beta * tp + p.beta * (1.0 - nat * d) * (1.0 - nat * d) * cm.mean_d2r;
    e.P_A = (nat * cm.mean_r2 + rel_pa) / l4;
    e.P_I = (cm.mean_r2 + d * d * s2) / (l4 * p.beta * p.eta * p.eta);
    e.total = energy + cm.energy;
  } else {
    e.K_A = t1 + t2;
    e.P_A = rel_pa / l4;
    e.total = energy;
  }
  return e;
}

EnergyBreakdown lab_energy_components_if(const WaveFn& psi, const ModelParams& p, double energy) {
  if (psi.frame != Frame::ion_frame || psi.grid.dims() != 3)
    throw std::invalid_argument("lab_energy_components_if: needs an ion-frame state");
  require_pair_grid(psi.grid, "lab_energy_components_if");
  const Grid1D& gi = psi.grid.axes[0];
  const Grid1D& gr = psi.grid.axes[1];
  const auto ki = wave_numbers(gi), kid = first_derivative_symbol(gi);
  const auto kr = wave_numbers(gr), krd = first_derivative_symbol(gr);
  const auto shape = psi.grid.shape();

  const auto atoms = half_spectrum_table(shape, [&](std::span<const std::size_t> i) {
    return kr[i[1]] * kr[i[1]] + kr[i[2]] * kr[i[2]];
  });
  const auto ion = half_spectrum_table(shape, [&](std::span<const std::size_t> i) {
    const std::size_t pair = (i[1] + i[2]) % kr.size();
    return ki[i[0]] * ki[i[0]] + kr[pair] * kr[pair] - 2.0 * kid[i[0]] * krd[pair];
  });

  const std::size_t ni = gi.size(), nr = gr.size();
  const double dv = psi.grid.cell_volume();
  const auto vai = atom_ion_potential(gr, p);
  double pa = 0.0, pi = 0.0, v_ai = 0.0;
  for (std::size_t a = 0; a < ni; ++a) {
    const double zi = gi.point(a);
    for (std::size_t b = 0; b < nr; ++b)
      for (std::size_t c = 0; c < nr; ++c) {
        const double v = psi.amplitude[(a * nr + b) * nr + c];
        const double w = v * v * dv;
        const double z1 = zi + gr.point(b), z2 = zi + gr.point(c);
        pa += w * (z1 * z1 + z2 * z2);
        pi += w * zi * zi;
        v_ai += w * (vai[b] + vai[c]);
      }
  }
  const double l4 = std::pow(p.l_a, 4);
  EnergyBreakdown e;
  e.K_A = euclidean_form(psi.grid, atoms, psi.amplitude);
  e.K_I = p.beta * euclidean_form(psi.grid, ion, psi.amplitude);
  e.P_A = pa / l4;
  e.P_I = pi / (l4 * p.beta * p.eta * p.eta);
  e.V_AI = v_ai;
  e.V_AA = effective_contact_strength(p.g, gr.spacing(), p.contact) * contact_expectation(psi);
  e.total = energy;
  return e;
}

std::string NumberStateWeight::label() const {
  std::ostringstream os;
  os << '|' << n[0] << ',' << n[1] << ',' << n[2] << ',' << n[3] << '>';
  return os.str();
}

std::vector<NumberStateWeight> number_state_overlaps(const WaveFn& psi, const OneBodySpectrum& orbitals) {
  if (psi.grid.dims() != 2) throw std::invalid_argument("number_state_overlaps: needs a two-atom state");
  const Grid1D& g = psi.grid.axes[0];
  if (!(orbitals.grid == g) || !(psi.grid.axes[1] == g))
    throw std::invalid_argument("number_state_overlaps: orbital grid differs from the state grid");
  if (orbitals.orbitals.size() < 4) throw std::invalid_argument("number_state_overlaps: need four orbitals");

  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd phi(n, 4);
  for (int j = 0; j < 4; ++j)
    for (Eigen::Index i = 0; i < n; ++i) phi(i, j) = orbitals.orbitals[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  const double dz = g.spacing();
  const Eigen::MatrixXd gram = phi.transpose() * phi * dz;
  if ((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("number_state_overlaps: orbitals are not orthonormal");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amp(
      psi.amplitude.data(), n, n);
  const Eigen::MatrixXd m = phi.transpose() * amp * phi * (dz * dz);

  std::vector<NumberStateWeight> out;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      NumberStateWeight w;
      w.n[static_cast<std::size_t>(i)] += 1;
      w.n[static_cast<std::size_t>(j)] += 1;
      const double c = i == j ? m(i, i) : (m(i, j) + m(j, i)) / std::numbers::sqrt2;
      w.weight = c * c;
      out.push_back(w);
    }
  return out;
}

double fidelity(const WaveFn& psi, const WaveFn& chi) {
  if (psi.frame != chi.frame) throw std::invalid_argument("fidelity: frame mismatch");
  const double o = psi.grid == chi.grid ? inner_product(psi, chi) : inner_product(psi, resample(chi, psi.grid));
  return o * o;
}

LabDensities lab_densities_from_if(const WaveFn& psi) {
  if (psi.frame != Frame::ion_frame || psi.grid.dims() != 3)
    throw std::invalid_argument("lab_densities_from_if: needs an ion-frame state");
  require_pair_grid(psi.grid, "lab_densities_from_if");
  const Grid1D& gi = psi.grid.axes[0];
  const Grid1D& gr = psi.grid.axes[1];
  const std::size_t ni = gi.size(), nr = gr.size(), half = nr / 2 + 1;
  const double di = gi.spacing(), dr = gr.spacing(), lr = gr.extent();
  const auto k = wave_numbers(gr);

  LabDensities out{gr, gi, std::vector<double>(nr, 0.0), std::vector<double>(ni, 0.0), 0.0};
  RealFft fft({static_cast<int>(nr)});
  std::vector<double> line(nr), shifted(nr);
  std::vector<std::complex<double>> spec(half);
  for (std::size_t a = 0; a < ni; ++a) {
    const double zi = gi.point(a);
    std::vector<std::complex<double>> phase(half);
    for (std::size_t q = 0; q < half; ++q) {
      const double arg = k[q] * zi;
      // The Nyquist mode of a real signal only carries a cosine.
      phase[q] = (nr % 2 == 0 && q == nr / 2) ? std::complex<double>(std::cos(arg), 0.0)
                                                : std::polar(1.0, -arg);
    }
    std::vector<bool> inside(nr);
    for (std::size_t m = 0; m < nr; ++m) {
      const double r = gr.point(m) - zi;
      inside[m] = r >= -lr && r < lr;
    }
    for (std::size_t j = 0; j < nr; ++j) {
      for (std::size_t i = 0; i < nr; ++i) {
        const double v = psi.amplitude[(a * nr + i) * nr + j];
        line[i] = v;
        out.ion[a] += v * v * dr * dr;
        if (!(gr.point(i) + zi >= -lr && gr.point(i) + zi < lr)) out.wrapped_mass += v * v * dr * dr * di;
      }
      fft.forward(line, spec);
      for (std::size_t q = 0; q < half; ++q) spec[q] *= phase[q] / static_cast<double>(nr);
      fft.inverse(spec, shifted);
      for (std::size_t m = 0; m < nr; ++m)
        if (inside[m]) out.atom[m] += shifted[m] * shifted[m] * dr * di;
    }
  }
  if (out.wrapped_mass > 1e-8) {
    std::ostringstream os;
    os << "lab_densities_from_if: " << out.wrapped_mass
       << " of the atom density falls outside the relative grid; enlarge its extent";
    throw std::runtime_error(os.str());
  }
  const double na = integrate(gr, out.atom), nion = integrate(gi, out.ion);
  for (double& v : out.atom) v /= na;
  for (double& v : out.ion) v /= nion;
  return out;
}

}  // namespace atomion
