#include "atomion/grid.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "atomion/fft.hpp"

namespace atomion {

Grid1D make_grid(double extent, std::size_t n) {
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw std::invalid_argument("make_grid: non-positive extent");
  if (n % 2 != 0) throw std::invalid_argument("make_grid: odd point count");
  if (n < 8) throw std::invalid_argument("make_grid: fewer than 8 points");
  return Grid1D(extent, n);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> z(n_);
  for (std::size_t k = 0; k < n_; ++k) z[k] = point(k);
  return z;
}

std::vector<double> wave_numbers(const Grid1D& grid) {
  const std::size_t n = grid.size();
  const double dk = std::numbers::pi / grid.extent();
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const long m = j < n / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n);
    k[j] = dk * static_cast<double>(m);
  }
  return k;
}

std::vector<double> first_derivative_symbol(const Grid1D& grid) {
  auto k = wave_numbers(grid);
  k[grid.size() / 2] = 0.0;
  return k;
}

namespace {

std::vector<double> apply_1d(const Grid1D& grid, std::span<const double> f,
                             const std::vector<double>& full_symbol, bool odd) {
  if (f.size() != grid.size()) throw std::invalid_argument("length mismatch");
  const std::size_t n = grid.size();
  RealFft fft({static_cast<int>(n)});
  std::vector<std::complex<double>> spec(fft.complex_size());
  fft.forward(f, spec);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    // An odd symbol multiplies by i*k; an even one by the real value.
    spec[j] *= odd ? std::complex<double>(0.0, full_symbol[j] * scale) : full_symbol[j] * scale;
  }
  std::vector<double> out(n);
  fft.inverse(spec, out);
  return out;
}

}  // namespace

std::vector<double> second_derivative(const Grid1D& grid, std::span<const double> f) {
  auto k = wave_numbers(grid);
  for (auto& v : k) v = -v * v;
  return apply_1d(grid, f, k, false);
}

std::vector<double> first_derivative(const Grid1D& grid, std::span<const double> f) {
  return apply_1d(grid, f, first_derivative_symbol(grid), true);
}

double integrate(const Grid1D& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw std::invalid_argument("integrate: length mismatch");
  double s = 0.0;
  for (double v : f) s += v;
  return s * grid.spacing();
}

std::size_t ProductGrid::size() const {
  std::size_t s = 1;
  for (const auto& a : axes) s *= a.size();
  return s;
}

double ProductGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes) v *= a.spacing();
  return v;
}

std::vector<int> ProductGrid::shape() const {
  std::vector<int> s;
  for (const auto& a : axes) s.push_back(static_cast<int>(a.size()));
  return s;
}

std::vector<double> resample_bandlimited(const Grid1D& source, std::span<const double> f,
                                         const Grid1D& target) {
  if (f.size() != source.size()) throw std::invalid_argument("resample: length mismatch");
  if (source == target) return {f.begin(), f.end()};

  const std::size_t n = source.size();
  RealFft fft({static_cast<int>(n)});
  std::vector<std::complex<double>> spec(fft.complex_size());
  fft.forward(f, spec);
  const double dk = std::numbers::pi / source.extent();
  const double L = source.extent();

  std::vector<double> out(target.size(), 0.0);
  for (std::size_t t = 0; t < target.size(); ++t) {
    const double z = target.point(t);
    if (z < -L || z >= L) continue;
    const double x = z + L;  // phase origin of the FFT is z = -L
    double acc = spec[0].real();
    for (std::size_t j = 1; j < spec.size(); ++j) {
      const double phase = dk * static_cast<double>(j) * x;
      // The Nyquist mode is taken as a cosine so the interpolant stays real.
      if (j == n / 2)
        acc += spec[j].real() * std::cos(phase);
      else
        acc += 2.0 * (spec[j] * std::polar(1.0, phase)).real();
    }
    out[t] = acc / static_cast<double>(n);
  }
  return out;
}

}  // namespace atomion
