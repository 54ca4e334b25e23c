#include "atomion/meanfield.hpp"

#include <cmath>
#include <stdexcept>

#include "atomion/fft.hpp"

namespace atomion {

namespace {

OperatorSpec one_dim_operator(const Grid1D& grid, const ModelParams& p, double mass_coeff,
                              std::vector<double> potential) {
  const auto k = wave_numbers(grid);
  ProductGrid pg{{grid}};
  auto symbol = half_spectrum_table(pg.shape(), [&](std::span<const std::size_t> i) {
    return mass_coeff * k[i[0]] * k[i[0]];
  });
  return OperatorSpec(Frame::lf_one_body, pg, p, TermFlags{}, std::move(symbol), std::move(potential));
}

double ion_trap_coeff(const ModelParams& p) {
  return (p.n_atoms + 1.0 / (p.beta * p.eta * p.eta)) / std::pow(p.l_a, 4);
}

std::vector<double> ion_potential(const Grid1D& grid, const ModelParams& p, double linear) {
  std::vector<double> v(grid.size());
  const double c = ion_trap_coeff(p);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double z = grid.point(k);
    v[k] = c * z * z + linear * z;
  }
  return v;
}

// c(z_m) = sum_j V_AI(z_m - x_j) f(x_j) dx over the source lattice.
std::vector<double> convolve_with_vai(const Grid1D& source, std::span<const double> f, const Grid1D& target,
                                      const ModelParams& p) {
  std::vector<double> out(target.size(), 0.0);
  const double dx = source.spacing();
  for (std::size_t m = 0; m < target.size(); ++m) {
    const double z = target.point(m);
    double acc = 0.0;
    for (std::size_t j = 0; j < source.size(); ++j)
      if (f[j] != 0.0) acc += atom_ion_potential(z - source.point(j), p) * f[j];
    out[m] = acc * dx;
  }
  return out;
}

void require_density(const Grid1D& source, std::span<const double> rho, const char* who) {
  if (rho.size() != source.size()) throw std::invalid_argument(std::string(who) + ": density size mismatch");
  const double norm = integrate(source, rho);
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::invalid_argument(std::string(who) + ": density is not normalised (integral " +
                                std::to_string(norm) + ")");
}

}  // namespace

double smf_ion_energy_analytic(const ModelParams& p) {
  if (!(p.beta > 0.0)) throw std::invalid_argument("smf_ion_energy_analytic: beta must be positive");
  return std::sqrt(p.beta * ion_trap_coeff(p));
}

SmfSolution smf_solve_if(const Grid1D& ion_grid, const Grid1D& rel_grid, const ModelParams& p,
                         const SmfOptions& options) {
  p.validate();
  if (!(p.beta > 0.0)) throw std::invalid_argument("smf_solve_if: beta must be positive");
  if (p.n_atoms != 2) throw std::invalid_argument("smf_solve_if: only N = 2 is supported");

  const double l4 = std::pow(p.l_a, 4);
  const OperatorSpec atom_op = build_if_atom_pair(rel_grid, p);

  SmfSolution s{ion_grid, {}, 0.0, {}, 0.0, 0.0, 0};
  double mean_zi = 0.0, mean_s = 0.0, last = 0.0;
  const std::size_t rounds = options.self_consistent ? options.max_iterations : 1;
  for (std::size_t it = 0; it < rounds; ++it) {
    // Ion factor in the mean field 2 z_I <r_1 + r_2> / l^4.
    const auto ion = solve_1d(one_dim_operator(ion_grid, p, p.beta, ion_potential(ion_grid, p, 2.0 * mean_s / l4)));
    s.ion_orbital = ion.orbitals[0];
    s.ion_energy = ion.energies[0];
    mean_zi = 0.0;
    for (std::size_t k = 0; k < ion_grid.size(); ++k)
      mean_zi += ion_grid.point(k) * s.ion_orbital[k] * s.ion_orbital[k] * ion_grid.spacing();

    // Atom-pair factor in the mean field 2 <z_I> (r_1 + r_2) / l^4.
    std::vector<double> v = atom_op.potential();
    const std::size_t n = rel_grid.size();
    if (mean_zi != 0.0)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) v[a * n + b] += 2.0 * mean_zi * (rel_grid.point(a) + rel_grid.point(b)) / l4;
    const OperatorSpec op(Frame::if_atoms, atom_op.grid(), p, atom_op.terms(), atom_op.kinetic_symbol(), std::move(v));
    auto res = lowest_eigenstates(op, 1, options.eigen);
    s.atoms = std::move(res.states[0]);
    s.atom_energy = res.record.energies[0];
    mean_s = 0.0;
    const double dv = s.atoms.grid.cell_volume();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        const double w = s.atoms.amplitude[a * n + b];
        mean_s += (rel_grid.point(a) + rel_grid.point(b)) * w * w * dv;
      }

    // Each factor's eigenvalue contains the shared coupling once; remove the double count.
    s.energy = s.ion_energy + s.atom_energy - 2.0 * mean_zi * mean_s / l4;
    s.iterations = it + 1;
    if (it > 0 && std::abs(s.energy - last) < options.tolerance) break;
    last = s.energy;
  }
  return s;
}

EffectivePotential effective_atom_potential(const Grid1D& source, std::span<const double> rho_ion,
                                            const Grid1D& target, const ModelParams& p, DensitySource tag) {
  require_density(source, rho_ion, "effective_atom_potential");
  auto conv = convolve_with_vai(source, rho_ion, target, p);
  const double l4 = std::pow(p.l_a, 4);
  for (std::size_t k = 0; k < conv.size(); ++k) conv[k] += target.point(k) * target.point(k) / l4;
  return {target, std::move(conv), Species::atom, tag};
}

EffectivePotential effective_ion_potential(const Grid1D& source, std::span<const double> rho_atom,
                                           const Grid1D& target, const ModelParams& p, DensitySource tag) {
  if (!(p.beta > 0.0)) throw std::invalid_argument("effective_ion_potential: beta must be positive");
  require_density(source, rho_atom, "effective_ion_potential");
  // V_AI is even, so int V(z_A - z) rho(z_A) is the same convolution.
  auto conv = convolve_with_vai(source, rho_atom, target, p);
  const double c = 1.0 / (std::pow(p.l_a, 4) * p.beta * p.eta * p.eta);
  for (std::size_t k = 0; k < conv.size(); ++k)
    conv[k] = c * target.point(k) * target.point(k) + p.n_atoms * conv[k];
  return {target, std::move(conv), Species::ion, tag};
}

Orbital effective_ground_orbital(const EffectivePotential& pot, const ModelParams& p) {
  const double c = pot.species == Species::atom ? 1.0 : p.beta;
  if (!(c > 0.0)) throw std::invalid_argument("effective_ground_orbital: ion orbital needs beta > 0");
  const auto sp = solve_1d(one_dim_operator(pot.grid, p, c, pot.values));
  return {sp.orbitals[0], sp.energies[0]};
}

LfSmfDiagnostic lf_smf_diagnostic(const Grid1D& grid, const ModelParams& p, const EigenOptions& options) {
  ModelParams pinned = p;
  pinned.beta = 0.0;
  auto res = lowest_eigenstates(build_relative_cmf(grid, pinned), 1, options);
  LfSmfDiagnostic out;
  out.atoms = std::move(res.states[0]);
  out.atom_energy = res.record.energies[0];
  // Bare ion oscillator -beta d^2 + z^2 / (l^4 beta eta^2).
  out.ion_energy = p.beta > 0.0 ? 1.0 / (p.eta * p.l_a * p.l_a) : 0.0;
  return out;
}

}  // namespace atomion
