#include "atomion/potentials.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace atomion {

std::string to_string(ContactScheme s) {
  return s == ContactScheme::bare ? "bare" : "renormalized";
}

ContactScheme contact_scheme_from_string(const std::string& s) {
  if (s == "bare") return ContactScheme::bare;
  if (s == "renormalized") return ContactScheme::renormalized;
  throw std::invalid_argument("unknown contact scheme '" + s + "'");
}

void ModelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(kappa > 0.0, "kappa must be positive");
  require(v0 > 0.0, "v0 must be positive");
  require(gamma > 0.0, "gamma must be positive");
  require(l_a > 0.0, "l_A must be positive");
  require(n_atoms >= 1, "N must be at least 1");
  require(g >= 0.0, "g must be non-negative");
  require(beta >= 0.0, "beta must be non-negative");
  require(beta == 0.0 || eta > 0.0, "eta must be positive when beta > 0");
}

ModelParams default_params() {
  ModelParams p;
  p.kappa = 80.0;
  p.v0 = 3.0 * p.kappa;
  p.gamma = 4.0 * std::sqrt(10.0 * p.kappa);
  p.l_a = 0.5;
  p.eta = 1.0;
  p.n_atoms = 2;
  p.g = 0.0;
  p.beta = 0.0;
  return p;
}

double atom_ion_potential(double r, const ModelParams& p) {
  const double r2 = r * r;
  return p.v0 * std::exp(-p.gamma * r2) - 1.0 / (r2 * r2 + 1.0 / p.kappa);
}

std::vector<double> atom_ion_potential(const Grid1D& grid, const ModelParams& p) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = atom_ion_potential(grid.point(k), p);
  return v;
}

double contact_diagonal(const Grid1D& grid, double g) {
  if (g < 0.0) throw std::invalid_argument("contact_diagonal: attractive contact not supported");
  return g / grid.spacing();
}

double effective_contact_strength(double g, double spacing, ContactScheme s) {
  if (g < 0.0) throw std::invalid_argument("contact strength must be non-negative");
  if (s == ContactScheme::bare) return g;
  const double c = spacing / (2.0 * std::numbers::pi * std::numbers::pi);
  return g / (1.0 + g * c);
}

double effective_contact_slope(double g, double spacing, ContactScheme s) {
  if (s == ContactScheme::bare) return 1.0;
  const double c = spacing / (2.0 * std::numbers::pi * std::numbers::pi);
  const double den = 1.0 + g * c;
  return 1.0 / (den * den);
}

}  // namespace atomion
