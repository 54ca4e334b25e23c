#pragma once

#include <array>
#include <cstddef>

namespace atomion {

template <class Fn>
std::vector<double> half_spectrum_table(const std::vector<int>& shape, Fn&& fn) {
  const std::size_t dims = shape.size();
  std::vector<int> hshape = shape;
  hshape.back() = shape.back() / 2 + 1;
  std::size_t total = 1;
  for (int s : hshape) total *= static_cast<std::size_t>(s);

  std::vector<double> table(total);
  std::array<std::size_t, 8> idx{};
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t a = dims; a-- > 0;) {
      idx[a] = rem % static_cast<std::size_t>(hshape[a]);
      rem /= static_cast<std::size_t>(hshape[a]);
    }
    table[flat] = fn(std::span<const std::size_t>(idx.data(), dims));
  }
  return table;
}

}  // namespace atomion
