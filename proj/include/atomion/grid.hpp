#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace atomion {

/// Uniform periodic grid on [-L, L) with n points, z_k = -L + k*dz.
///
/// The grid is closed under reflection: index k maps to (n - k) mod n.
class Grid1D {
public:
  double extent() const { return extent_; }
  std::size_t size() const { return n_; }
  double spacing() const { return 2.0 * extent_ / static_cast<double>(n_); }
  double point(std::size_t k) const { return -extent_ + static_cast<double>(k) * spacing(); }
  std::vector<double> points() const;

  /// z_k for factors that must be odd under reflection. The edge point -L is
  /// its own mirror, so it is mapped to 0 there.
  double odd_point(std::size_t k) const { return k == 0 ? 0.0 : point(k); }
  /// Index of the mirror point -z_k.
  std::size_t mirror(std::size_t k) const { return (n_ - k) % n_; }
  /// Index of z = 0 (always on the grid for even n).
  std::size_t origin() const { return n_ / 2; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

private:
  friend Grid1D make_grid(double extent, std::size_t n);
  Grid1D(double extent, std::size_t n) : extent_(extent), n_(n) {}

  double extent_;
  std::size_t n_;
};

Grid1D make_grid(double extent, std::size_t n);

/// Angular wave numbers in FFT order: 0, dk, ..., -dk.
std::vector<double> wave_numbers(const Grid1D& grid);

/// Symbol of the spectral first derivative (divided by i); the Nyquist mode is
/// dropped so the operator stays real and anti-symmetric.
std::vector<double> first_derivative_symbol(const Grid1D& grid);

std::vector<double> second_derivative(const Grid1D& grid, std::span<const double> f);
std::vector<double> first_derivative(const Grid1D& grid, std::span<const double> f);

/// Rectangle rule dz * sum f_k.
double integrate(const Grid1D& grid, std::span<const double> f);

/// Tensor product of 1D grids, row-major with the last axis fastest.
struct ProductGrid {
  std::vector<Grid1D> axes;

  std::size_t dims() const { return axes.size(); }
  std::size_t size() const;
  double cell_volume() const;
  std::vector<int> shape() const;

  friend bool operator==(const ProductGrid&, const ProductGrid&) = default;
};

/// Bandlimited (trigonometric) interpolation of periodic samples onto another
/// grid. Target points outside the source period evaluate to zero.
std::vector<double> resample_bandlimited(const Grid1D& source, std::span<const double> f,
                                         const Grid1D& target);

}  // namespace atomion
