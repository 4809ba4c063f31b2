#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "projwass/core.hpp"

namespace projwass::testing {

// Test fixtures draw from their own engine so oracles never share the
// library's random streams.
inline RowMatrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  RowMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(gen);
  }
  return m;
}

inline SampleSet random_samples(std::mt19937_64& gen, std::size_t n, std::size_t d, double scale = 1.0) {
  return SampleSet(random_matrix(gen, n, d, scale));
}

inline std::vector<double> random_values(std::mt19937_64& gen, std::size_t n, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  std::vector<double> out(n);
  for (auto& v : out) v = unif(gen);
  return out;
}

inline SampleSet rows(std::initializer_list<std::initializer_list<double>> values) {
  const auto n = static_cast<Eigen::Index>(values.size());
  const auto d = static_cast<Eigen::Index>(values.begin()->size());
  RowMatrix m(n, d);
  Eigen::Index i = 0;
  for (const auto& row : values) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return SampleSet(std::move(m));
}

inline ProjectionMatrix random_orthonormal(std::mt19937_64& gen, std::size_t d, std::size_t k) {
  Matrix m = random_matrix(gen, d, k);
  return orthonormalize(m);
}

}  // namespace projwass::testing
