#pragma once

#include <cstdint>
#include <random>

#include "viscontact/types.hpp"

namespace viscontact {

/// Seeded generator with its own scaling so that streams are identical
/// across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  VectorX vector(Eigen::Index n, double lo, double hi) {
    VectorX v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  /// Symmetric 2x2 tensor with entries in [lo, hi], packed.
  Vec3 packed_tensor(double lo, double hi) {
    Mat2 t;
    t(0, 0) = uniform(lo, hi);
    t(1, 1) = uniform(lo, hi);
    t(0, 1) = t(1, 0) = uniform(lo, hi);
    return to_packed(t);
  }

  TensorField tensor_field(Eigen::Index columns, double lo, double hi) {
    TensorField f(3, columns);
    for (Eigen::Index c = 0; c < columns; ++c) f.col(c) = packed_tensor(lo, hi);
    return f;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace viscontact
