#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace sypa {

// Dense channels-first 4D tensor (c, z, y, x), C-order with x fastest.
template <class T>
struct Tensor {
  int c = 0, z = 0, y = 0, x = 0;
  std::vector<T> data;

  Tensor() = default;
  Tensor(int c_, int z_, int y_, int x_)
      : c(c_), z(z_), y(y_), x(x_),
        data(static_cast<std::size_t>(c_) * z_ * y_ * x_, T(0)) {}

  std::size_t size() const { return data.size(); }
  std::size_t spatial() const { return static_cast<std::size_t>(z) * y * x; }

  std::size_t index(int ci, int zi, int yi, int xi) const {
    return ((static_cast<std::size_t>(ci) * z + zi) * y + yi) * x + xi;
  }
  T& at(int ci, int zi, int yi, int xi) { return data[index(ci, zi, yi, xi)]; }
  const T& at(int ci, int zi, int yi, int xi) const { return data[index(ci, zi, yi, xi)]; }

  bool same_shape(const Tensor& o) const {
    return c == o.c && z == o.z && y == o.y && x == o.x;
  }

  // Resize without zeroing existing elements; callers overwrite fully.
  void ensure(int c_, int z_, int y_, int x_) {
    c = c_;
    z = z_;
    y = y_;
    x = x_;
    data.resize(static_cast<std::size_t>(c_) * z_ * y_ * x_);
  }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }
};

}  // namespace sypa
