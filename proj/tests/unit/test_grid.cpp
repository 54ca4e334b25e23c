#include <doctest.h>

#include <cmath>
#include <numbers>

#include "atomion/grid.hpp"

using namespace atomion;

TEST_CASE("grid points, spacing and mirror") {
  const auto g = make_grid(2.0, 8);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.point(0) == doctest::Approx(-2.0));
  CHECK(g.point(g.origin()) == doctest::Approx(0.0));
  for (std::size_t k = 1; k < g.size(); ++k) CHECK(g.point(g.mirror(k)) == doctest::Approx(-g.point(k)));
  CHECK(g.mirror(0) == 0);
  CHECK(g.odd_point(0) == 0.0);
  CHECK(g.odd_point(3) == g.point(3));
}

TEST_CASE("make_grid rejects bad arguments") {
  CHECK_THROWS(make_grid(0.0, 16));
  CHECK_THROWS(make_grid(1.0, 15));
  CHECK_THROWS(make_grid(1.0, 0));
}

TEST_CASE("rectangle rule integrates a Gaussian to machine precision") {
  const auto g = make_grid(8.0, 128);
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::exp(-g.point(k) * g.point(k));
  CHECK(integrate(g, f) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("spectral derivatives are exact for resolved Fourier modes") {
  const auto g = make_grid(std::numbers::pi, 32);
  std::vector<double> f(g.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sin(3.0 * g.point(k));
  const auto d1 = first_derivative(g, f);
  const auto d2 = second_derivative(g, f);
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(d1[k] == doctest::Approx(3.0 * std::cos(3.0 * g.point(k))).epsilon(1e-12).scale(1.0));
    CHECK(d2[k] == doctest::Approx(-9.0 * f[k]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("first derivative symbol is odd with the Nyquist mode removed") {
  const auto g = make_grid(1.0, 16);
  const auto s = first_derivative_symbol(g);
  CHECK(s[8] == 0.0);
  for (std::size_t k = 1; k < 16; ++k) CHECK(s[k] == doctest::Approx(-s[16 - k]));
}

TEST_CASE("bandlimited resampling reproduces a smooth function") {
  const auto a = make_grid(6.0, 64), b = make_grid(6.0, 96), c = make_grid(4.0, 80);
  std::vector<double> f(a.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::exp(-a.point(k) * a.point(k));
  for (const auto& t : {b, c}) {
    const auto r = resample_bandlimited(a, f, t);
    for (std::size_t k = 0; k < t.size(); ++k)
      CHECK(r[k] == doctest::Approx(std::exp(-t.point(k) * t.point(k))).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("product grid geometry") {
  ProductGrid pg{{make_grid(2.0, 8), make_grid(4.0, 16)}};
  CHECK(pg.dims() == 2);
  CHECK(pg.size() == 128);
  CHECK(pg.cell_volume() == doctest::Approx(0.5 * 0.5));
  CHECK(pg.shape() == std::vector<int>{8, 16});
}
