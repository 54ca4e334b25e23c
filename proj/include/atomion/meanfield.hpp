#pragma once

#include <vector>

#include "atomion/eigensolve.hpp"

namespace atomion {

enum class Species { atom, ion };
enum class DensitySource { smf, exact_if, other };

struct EffectivePotential {
  Grid1D grid;
  std::vector<double> values;
  Species species = Species::atom;
  DensitySource source = DensitySource::other;
};

struct SmfOptions {
  EigenOptions eigen{};
  /// Fixed-point iteration over the mean coupling fields. The fields vanish
  /// by parity at eta = 1, so this is off by default.
  bool self_consistent = false;
  std::size_t max_iterations = 50;
  double tolerance = 1e-10;
};

/// Product-ansatz solution psi_I(z_I) psi_A(r_1, r_2) in the ion frame.
struct SmfSolution {
  Grid1D ion_grid;
  std::vector<double> ion_orbital;  ///< integrate(|psi_I|^2) = 1
  double ion_energy = 0.0;
  WaveFn atoms;                      ///< frame if-atoms
  double atom_energy = 0.0;
  double energy = 0.0;               ///< <H> in the product state
  std::size_t iterations = 0;
};

/// Ground energy of -beta d^2 + (N + 1/(beta eta^2)) z^2 / l_A^4.
double smf_ion_energy_analytic(const ModelParams& p);

SmfSolution smf_solve_if(const Grid1D& ion_grid, const Grid1D& rel_grid, const ModelParams& p,
                         const SmfOptions& options = {});

/// z^2/l_A^4 + int V_AI(z - z_I) rho_I(z_I) dz_I on `target`.
EffectivePotential effective_atom_potential(const Grid1D& source, std::span<const double> rho_ion,
                                            const Grid1D& target, const ModelParams& p,
                                            DensitySource tag = DensitySource::other);

/// z^2/(l_A^4 beta eta^2) + N int V_AI(z_A - z) rho_A(z_A) dz_A on `target`.
EffectivePotential effective_ion_potential(const Grid1D& source, std::span<const double> rho_atom,
                                           const Grid1D& target, const ModelParams& p,
                                           DensitySource tag = DensitySource::other);

struct Orbital {
  std::vector<double> phi;
  double energy = 0.0;
};

/// Ground state of -c d^2 + pot, c = 1 for atoms and beta for the ion.
Orbital effective_ground_orbital(const EffectivePotential& pot, const ModelParams& p);

/// Laboratory-frame comparison curve: the atom pair against a pinned ion,
/// times the bare ion oscillator. Diagnostic only.
struct LfSmfDiagnostic {
  WaveFn atoms;  ///< cmf-relative at beta = 0
  double atom_energy = 0.0;
  double ion_energy = 0.0;
};
LfSmfDiagnostic lf_smf_diagnostic(const Grid1D& grid, const ModelParams& p,
                                  const EigenOptions& options = {});

}  // namespace atomion
