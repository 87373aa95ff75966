#pragma once

#include <cstdint>
#include <random>

#include "jacobi_spectral/expansion.hpp"

namespace jacobi_spectral {

// Portable uniform draws: std::uniform_real_distribution is not specified
// bit-for-bit across standard libraries, so the mapping is done by hand.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Coefficients uniform in [-1, 1] over every |kappa| <= degree; the level-0
// coefficient is zeroed when mean_zero is set.
inline Expansion random_expansion(TablePtr table, int degree, SeededUniform& rng, bool mean_zero = false) {
  if (degree < 0 || degree > table->max_degree()) {
    throw ArgumentError("random_expansion: degree " + std::to_string(degree) + " outside [0, " +
                        std::to_string(table->max_degree()) + "]");
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(table->basis_size()));
  for (std::size_t b = 0; b < table->basis_size(); ++b) {
    if (table->basis(b).total_degree() <= degree) c[static_cast<Eigen::Index>(b)] = rng.uniform(-1.0, 1.0);
  }
  if (mean_zero) c[static_cast<Eigen::Index>(table->basis_index(MultiIndex::zero(table->dim())))] = 0.0;
  return Expansion(std::move(table), std::move(c));
}

inline Expansion random_expansion(TablePtr table, int degree, std::uint64_t seed, bool mean_zero = false) {
  SeededUniform rng(seed);
  return random_expansion(std::move(table), degree, rng, mean_zero);
}

}  // namespace jacobi_spectral
