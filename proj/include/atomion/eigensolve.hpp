#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "atomion/hamiltonians.hpp"

namespace atomion {

/// Real stationary amplitude on a product grid, normalised so that
/// sum |psi|^2 * cell_volume = 1. Layout is row-major (last axis fastest).
struct WaveFn {
  Frame frame = Frame::cmf_relative;
  ProductGrid grid;
  std::vector<double> amplitude;
  int exchange = 0;  ///< +1 symmetric, -1 antisymmetric, 0 not applicable
  int parity = 0;    ///< +1 / -1 under total reflection, 0 unknown

  double norm() const;
  void normalize();
  /// Make the largest-magnitude amplitude positive.
  void fix_phase();
};

/// <a|b> under rectangle-rule quadrature. Grids must be identical.
double inner_product(const WaveFn& a, const WaveFn& b);

/// Eigenvalues and grid-normalised orbitals of a 1D operator.
struct OneBodySpectrum {
  Grid1D grid;
  std::vector<double> energies;
  std::vector<std::vector<double>> orbitals;  ///< phase-fixed, integrate(|phi|^2) = 1
};

/// Dense diagonalisation of a 1D operator.
OneBodySpectrum solve_1d(const OperatorSpec& op);

/// Symmetry sector of a two-atom state.
struct Sector {
  int exchange = +1;  ///< +1 bosonic, -1 antisymmetric, 0 unrestricted
  int parity = 0;     ///< +1, -1, or 0 unrestricted
};

/// Project in place onto `sector`. The atom axes are the last two axes.
void project_sector(const ProductGrid& grid, const Sector& sector, std::span<double> amp);

/// psi -> (psi + P12 psi) / ||psi + P12 psi||. Throws if the result vanishes.
WaveFn exchange_project(const WaveFn& psi);

/// Thrown when an iterative solve misses its residual target.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), history_(std::move(residual_history)) {}
  const std::vector<double>& history() const { return history_; }

private:
  std::vector<double> history_;
};

struct SpectrumRecord {
  ModelParams params;
  Frame frame = Frame::cmf_relative;
  ProductGrid grid;
  std::vector<double> energies;           ///< ascending
  std::vector<int> parity;
  std::vector<int> exchange;
  std::vector<int> cluster;               ///< equal ids mark a degenerate cluster
  std::vector<double> residuals;
  std::vector<std::size_t> iterations;
};

struct EigenOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 2000;
  std::size_t guard_vectors = 3;
  /// Shift s of the kinetic preconditioner (T + s)^-1.
  double preconditioner_shift = 100.0;
  bool project_inside_loop = true;
  std::uint64_t seed = 20210531;
  double degeneracy_tolerance = 1e-9;
};

struct EigenResult {
  SpectrumRecord record;
  std::vector<WaveFn> states;
};

/// The k lowest exchange-symmetric eigenpairs of a two-atom operator, searched
/// in both parity sectors and merged. `initial` (optional) seeds the search,
/// e.g. with states from a nearby parameter point.
EigenResult lowest_eigenstates(const OperatorSpec& op, std::size_t k,
                               const EigenOptions& options = {},
                               const std::vector<WaveFn>* initial = nullptr);

/// Lowest eigenpairs of a single symmetry sector.
EigenResult sector_eigenstates(const OperatorSpec& op, std::size_t k, const Sector& sector,
                               const EigenOptions& options = {},
                               const std::vector<WaveFn>* initial = nullptr);

struct ImaginaryTimeOptions {
  double time_step = 1e-4;
  std::size_t max_steps = 5000;
  std::size_t check_every = 25;
  /// Stop once |E_k - E_{k-1}| between checks falls below this.
  double energy_change = 1e-5;
};

struct GroundState3D {
  WaveFn state;
  double energy = 0.0;
  double residual = 0.0;
  std::size_t imaginary_steps = 0;
  std::size_t polish_iterations = 0;
  std::vector<double> energy_history;  ///< energy at each imaginary-time check
};

/// Ion-frame ground state: split-operator imaginary-time relaxation in the
/// bosonic even-parity sector, then an eigensolver polish to
/// ||H psi - E psi|| < options.tolerance.
GroundState3D ground_state_3d(const OperatorSpec& op, const EigenOptions& options = {},
                              const ImaginaryTimeOptions& imag = {});

/// Spectral upsampling/downsampling of a state onto another product grid of the
/// same frame (used to warm-start refined solves).
WaveFn resample(const WaveFn& psi, const ProductGrid& target);

}  // namespace atomion
