#pragma once

#include <string>
#include <vector>

#include "atomion/grid.hpp"

namespace atomion {

/// How the contact interaction g*delta(r - r') is put on the product grid.
///
/// Both schemes place a coupling c/dz on the diagonal points r_i = r_j.
/// `bare` uses c = g. `renormalized` uses c = g / (1 + g dz / (2 pi^2)),
/// which removes the leading O(dz) error caused by the finite momentum cutoff
/// pi/dz of the grid.
enum class ContactScheme { bare, renormalized };

std::string to_string(ContactScheme s);
ContactScheme contact_scheme_from_string(const std::string& s);

/// Model constants in units of E* and R*.
struct ModelParams {
  double kappa = 80.0;   ///< cutoff of the -1/r^4 tail [R*^-4]
  double v0 = 240.0;     ///< barrier height [E*]
  double gamma = 113.13708498984761;  ///< barrier width [R*^-2], 4 sqrt(10 kappa)
  double g = 0.0;        ///< atom-atom contact strength [E* R*]
  double beta = 0.0;     ///< mass ratio m_A / m_I
  double eta = 1.0;      ///< trap frequency ratio omega_A / omega_I
  double l_a = 0.5;      ///< atom oscillator length [R*]
  int n_atoms = 2;
  ContactScheme contact = ContactScheme::renormalized;

  /// beta / (1 + N beta); never stored.
  double d() const { return beta / (1.0 + n_atoms * beta); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// kappa = 80, v0 = 3 kappa, gamma = 4 sqrt(10 kappa), l_A = 0.5, eta = 1, N = 2.
ModelParams default_params();

/// v0 exp(-gamma r^2) - 1 / (r^4 + 1/kappa).
double atom_ion_potential(double r, const ModelParams& p);

std::vector<double> atom_ion_potential(const Grid1D& grid, const ModelParams& p);

/// Raw grid coupling g / dz for the points r_i = r_j.
double contact_diagonal(const Grid1D& grid, double g);

/// Coupling strength actually placed on the grid for scheme `s`.
double effective_contact_strength(double g, double spacing, ContactScheme s);

/// Derivative of the effective strength with respect to g.
double effective_contact_slope(double g, double spacing, ContactScheme s);

}  // namespace atomion
