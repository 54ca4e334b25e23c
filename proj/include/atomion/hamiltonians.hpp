#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "atomion/fft.hpp"
#include "atomion/grid.hpp"
#include "atomion/potentials.hpp"

namespace atomion {

enum class Frame {
  lf_one_body,   ///< single atom, static ion at the origin: axis z_A
  cmf_relative,  ///< relative coordinates in the centre-of-mass frame: axes r_1, r_2
  ion_frame,     ///< axes z_I, r_1, r_2
  cm_analytic,   ///< centre-of-mass oscillator: axis R
  cmf_full,      ///< axes R, r_1, r_2 (eta != 1); not validated
  if_atoms,      ///< relative rows of the ion-frame operator: axes r_1, r_2
};

std::string to_string(Frame f);
Frame frame_from_string(const std::string& s);
/// Number of degrees of freedom of `f` for N = 2.
std::size_t frame_dofs(Frame f);

/// Term groups; every builder honours the ones that exist in its frame.
struct TermFlags {
  bool kinetic = true;
  bool trap = true;
  bool atom_ion = true;
  bool contact = true;
  bool derivative_coupling = true;
  bool positional_coupling = true;
  /// Ion-frame only: the z_I r_i and d_I d_i couplings. With this off the
  /// ion-frame operator separates into an ion part and an atom-pair part.
  bool ion_coupling = true;
};

/// Matrix-free operator H = F^-1 T(k) F + V(x) on a product grid.
///
/// Every Hamiltonian of the model has this form: all derivative terms
/// (including the mixed derivatives) are constant-coefficient and therefore
/// diagonal in Fourier space, and every potential term is diagonal on the grid.
/// Objects are immutable and may be shared between threads.
class OperatorSpec {
public:
  OperatorSpec(Frame frame, ProductGrid grid, ModelParams params, TermFlags terms,
               std::vector<double> kinetic_symbol, std::vector<double> potential);

  Frame frame() const { return frame_; }
  const ProductGrid& grid() const { return grid_; }
  const ModelParams& params() const { return params_; }
  const TermFlags& terms() const { return terms_; }
  std::size_t size() const { return grid_.size(); }

  /// Half-spectrum table of T(k).
  const std::vector<double>& kinetic_symbol() const { return symbol_; }
  /// Diagonal V(x) on the full grid.
  const std::vector<double>& potential() const { return potential_; }
  const RealFft& fft() const { return *fft_; }

  double kinetic_max() const;

  void apply(std::span<const double> in, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> in) const;

  /// Apply (T + shift)^-1; used as a preconditioner. Requires shift > 0.
  void apply_inverse_kinetic(double shift, std::span<const double> in,
                             std::span<double> out) const;

  /// Dense matrix of a 1D operator (row-major n x n).
  std::vector<double> dense_matrix() const;

private:
  Frame frame_;
  ProductGrid grid_;
  ModelParams params_;
  TermFlags terms_;
  std::vector<double> symbol_;
  std::vector<double> potential_;
  std::shared_ptr<const RealFft> fft_;
};

/// -d^2/dz^2 + z^2 / l_A^4 + V_AI(z).
OperatorSpec build_h1b(const Grid1D& grid, const ModelParams& p, TermFlags terms = {});

/// Relative two-atom Hamiltonian of the centre-of-mass frame at eta = 1:
///   sum_i [-(1+beta) d_i^2 + (1-d) r_i^2/l^4 + V_AI(r_i)]
///   + g delta(r_1 - r_2) - 2 beta d_1 d_2 - (2d/l^4) r_1 r_2.
/// Throws for eta != 1 (the centre of mass would not decouple) or N != 2.
OperatorSpec build_relative_cmf(const Grid1D& grid, const ModelParams& p, TermFlags terms = {});

/// Ion-frame Hamiltonian on (z_I, r_1, r_2). Requires beta > 0 and N = 2.
OperatorSpec build_if_hamiltonian(const Grid1D& grid_ion, const Grid1D& grid_rel,
                                  const ModelParams& p, TermFlags terms = {});

/// Atom-pair part of the ion-frame operator:
///   sum_i [-(1+beta) d_i^2 + r_i^2/l^4 + V_AI(r_i)] + g delta(r_1 - r_2) - 2 beta d_1 d_2.
OperatorSpec build_if_atom_pair(const Grid1D& grid, const ModelParams& p, TermFlags terms = {});

/// -d d^2/dR^2 + R^2 / (l^4 d), the decoupled centre-of-mass oscillator.
OperatorSpec build_cm_oscillator(const Grid1D& grid, const ModelParams& p);

/// Full centre-of-mass-frame Hamiltonian on (R, r_1, r_2) for arbitrary eta,
/// including the R r_i coupling. Kept for completeness; not validated.
OperatorSpec build_full_cmf(const Grid1D& grid_cm, const Grid1D& grid_rel, const ModelParams& p,
                            TermFlags terms = {});

/// Analytic ground state of the centre-of-mass oscillator at eta = 1.
struct CMSolution {
  double omega = 0.0;      ///< 2 / l_A^2
  double energy = 0.0;     ///< 1 / l_A^2
  double mean_r2 = 0.0;    ///< <R^2> = d l_A^2 / 2
  double mean_d2r = 0.0;   ///< <-d^2/dR^2> = 1 / (2 d l_A^2)
};

CMSolution cm_solution(const ModelParams& p);

}  // namespace atomion
