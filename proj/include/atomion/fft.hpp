#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace atomion {

/// Real-to-complex multi-dimensional FFT on a fixed row-major shape.
///
/// Plans are created once per shape (under a global lock) and shared; the
/// execute calls are thread-safe. Transforms are unnormalised.
class RealFft {
public:
  explicit RealFft(std::vector<int> shape);

  const std::vector<int>& shape() const { return shape_; }
  std::size_t real_size() const { return real_size_; }
  /// Row-major shape of the half spectrum: last axis has n/2 + 1 entries.
  std::size_t complex_size() const { return complex_size_; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Destroys `in`.
  void inverse(std::span<std::complex<double>> in, std::span<double> out) const;

  /// out = F^-1 [ symbol * F in ] with symbol given on the half spectrum.
  void apply_symbol(std::span<const double> symbol, std::span<const double> in,
                    std::span<double> out) const;

  /// sum_k symbol(k) |F in|^2(k) / N over the full spectrum, i.e. the
  /// Euclidean quadratic form <in| F^-1 symbol F |in>.
  double quadratic_form(std::span<const double> symbol, std::span<const double> in) const;

  struct Plans;

private:
  std::vector<int> shape_;
  std::size_t real_size_ = 0;
  std::size_t complex_size_ = 0;
  std::shared_ptr<const Plans> plans_;
};

/// Tabulate `fn(idx)` over the half spectrum of `shape`; `idx[a]` is the
/// FFT-order frequency index along axis a.
template <class Fn>
std::vector<double> half_spectrum_table(const std::vector<int>& shape, Fn&& fn);

}  // namespace atomion

#include "atomion/fft_inl.hpp"
