#pragma once

#include <array>
#include <string>
#include <vector>

#include "atomion/eigensolve.hpp"

namespace atomion {

enum class SeparationKind { atom_atom, atom_ion };

struct SeparationDist {
  SeparationKind kind = SeparationKind::atom_atom;
  std::vector<double> x;    ///< separation axis, ascending, uniform spacing
  std::vector<double> rho;  ///< density on x, integrates to 1
  double spacing() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
};

/// |psi(r1, r2)|^2 of a two-atom state on a square grid (CMF or IF atom pair).
std::vector<double> two_body_density(const WaveFn& psi);

/// rho_AA(X), X = r1 - r2, from rho2 on a square grid. Exact on the lattice:
/// rho_AA(X_m) = Delta * sum_{i - j = m} rho2(i, j), X_m = m * Delta.
SeparationDist interatomic_separation_dist(const Grid1D& grid, std::span<const double> rho2);

/// rho_1(r) of the relative atom-ion coordinate, from rho2 (marginal over r2).
SeparationDist atom_ion_separation_dist(const Grid1D& grid, std::span<const double> rho2);

/// Marginal |psi|^2 over every axis but the two atom axes (identity for 2D states).
std::vector<double> atom_pair_density(const WaveFn& psi);

struct MeanSeparations {
  double d_aa = 0.0;
  double d_ai = 0.0;
};

/// <|r1 - r2|> and <|r|> with rho_1(r) the one-atom relative marginal.
MeanSeparations mean_separations(const WaveFn& psi);

/// Probability that both atoms sit on the same side of the ion. Grid points on
/// r = 0 count half to each side.
double bunching_probability(const Grid1D& grid, std::span<const double> rho2);

/// Lattice <delta(r1 - r2)> = Delta * sum_i |psi(i, i)|^2 (summed over leading axes).
double contact_expectation(const WaveFn& psi);

/// Contact density with the coupling renormalisation folded in, so that
/// dE/dg = this value for the discretised operator.
double contact_density(const WaveFn& psi, const ModelParams& p);

struct EnergyBreakdown {
  double K_A = 0.0, P_A = 0.0, V_AA = 0.0, V_AI = 0.0, K_I = 0.0, P_I = 0.0;
  double total = 0.0;  ///< eigenvalue (plus E_R in the centre-of-mass frame)
  double sum() const { return K_A + P_A + V_AA + V_AI + K_I + P_I; }
};

/// Laboratory-frame energy components of a relative-frame eigenstate, with
/// the centre of mass in its analytic ground state when beta > 0. `energy` is
/// the relative eigenvalue. At beta = 0 the ion is pinned: K_I = P_I = 0.
EnergyBreakdown lab_energy_components(const WaveFn& rel, const ModelParams& p, double energy);

/// The same components evaluated directly on an ion-frame state.
EnergyBreakdown lab_energy_components_if(const WaveFn& psi, const ModelParams& p, double energy);

struct NumberStateWeight {
  std::array<int, 4> n{};
  double weight = 0.0;
  std::string label() const;  ///< "|n1,n2,n3,n4>"
};

/// Weights of the ten symmetrised two-boson number states built from the four
/// lowest orbitals of `orbitals`, in the order |2000>, |1100>, |1010>, |1001>,
/// |0200>, |0110>, |0101>, |0020>, |0011>, |0002>.
std::vector<NumberStateWeight> number_state_overlaps(const WaveFn& psi,
                                                     const OneBodySpectrum& orbitals);

/// |<chi|psi>|^2. Different grids of the same frame are bridged by resampling
/// chi onto psi's grid.
double fidelity(const WaveFn& psi, const WaveFn& chi);

struct LabDensities {
  Grid1D atom_grid;
  Grid1D ion_grid;
  std::vector<double> atom;  ///< rho_1(z_A)
  std::vector<double> ion;   ///< rho_1(z_I)
  double wrapped_mass = 0.0;  ///< atom mass whose z_A left the relative grid
};

/// One-body laboratory densities from an ion-frame state. z_A is sampled on
/// the relative grid. Throws if more than 1e-8 of the atom mass would leave it.
LabDensities lab_densities_from_if(const WaveFn& psi);

}  // namespace atomion
