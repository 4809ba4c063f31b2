#include "projwass/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace projwass {

namespace {

constexpr std::size_t kMedianExactLimit = 4096;

double median_of(std::vector<double>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Sum of k(a_i, b_j) over all pairs, accumulated in row order.
double kernel_sum(const RowMatrix& a, const RowMatrix& b, double inv_two_sigma2) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double row_total = 0.0;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      row_total += std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv_two_sigma2);
    }
    total += row_total;
  }
  return total;
}

}  // namespace

double median_heuristic(const SampleSet& x, const SampleSet& y, RngSeed seed) {
  if (x.dim() != y.dim()) throw DimensionError("sample sets differ in dimension");
  const std::size_t total = x.size() + y.size();
  std::vector<std::size_t> rows(total);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (total > kMedianExactLimit) {
    // Partial Fisher-Yates: the first kMedianExactLimit slots form the subsample.
    Rng rng(seed);
    for (std::size_t i = 0; i < kMedianExactLimit; ++i) {
      std::swap(rows[i], rows[i + rng.index(total - i)]);
    }
    rows.resize(kMedianExactLimit);
    std::sort(rows.begin(), rows.end());
  }
  auto point = [&](std::size_t r) { return r < x.size() ? x.row(r) : y.row(r - x.size()); };

  std::vector<double> distances;
  distances.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      const double dist = (point(rows[a]) - point(rows[b])).norm();
      if (dist > 0.0) distances.push_back(dist);
    }
  }
  if (distances.empty()) throw DegenerateDataError("all pooled points coincide; bandwidth would be zero");
  return median_of(distances);
}

double resolve_bandwidth(const SampleSet& x, const SampleSet& y, const MmdConfig& cfg) {
  if (!cfg.uses_median_heuristic()) {
    if (!std::isfinite(cfg.bandwidth)) throw ConfigError("bandwidth must be finite");
    return cfg.bandwidth;
  }
  return median_heuristic(x, y, cfg.subsample_seed);
}

double mmd_biased(const SampleSet& x, const SampleSet& y, const MmdConfig& cfg) {
  if (x.dim() != y.dim()) throw DimensionError("sample sets differ in dimension");
  const double sigma = resolve_bandwidth(x, y, cfg);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  const double kxx = kernel_sum(x.data(), x.data(), inv) / (n * n);
  const double kyy = kernel_sum(y.data(), y.data(), inv) / (m * m);
  // k is symmetric, so summing (x, y) and (y, x) orders gives the same cross term;
  // averaging both keeps mmd_biased(X, Y) == mmd_biased(Y, X) bit for bit.
  const double kxy = 0.5 * (kernel_sum(x.data(), y.data(), inv) + kernel_sum(y.data(), x.data(), inv)) / (n * m);
  const double squared = (kxx + kyy) - 2.0 * kxy;
  return std::sqrt(std::max(0.0, squared));
}

}  // namespace projwass
