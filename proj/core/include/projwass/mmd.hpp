#pragma once

#include <cstddef>

#include "projwass/core.hpp"

namespace projwass {

enum class KernelKind { kGaussian };

/// Gaussian kernel k(x, y) = exp(-||x - y||^2 / (2 sigma^2)). A bandwidth of
/// zero (or less) selects the median heuristic on the pooled sample.
struct MmdConfig {
  double bandwidth = 0.0;
  KernelKind kernel = KernelKind::kGaussian;
  RngSeed subsample_seed{};

  bool uses_median_heuristic() const noexcept { return !(bandwidth > 0.0); }
  static MmdConfig median_heuristic() { return MmdConfig{}; }
  static MmdConfig fixed(double sigma) { return MmdConfig{sigma, KernelKind::kGaussian, {}}; }
};

/// Median of the non-zero pairwise distances of the pooled sample; pools
/// larger than 4096 points are subsampled (seeded). Throws
/// DegenerateDataError when every distance is zero.
double median_heuristic(const SampleSet& x, const SampleSet& y, RngSeed seed = {});

/// Bandwidth the configuration resolves to for this pair of samples.
double resolve_bandwidth(const SampleSet& x, const SampleSet& y, const MmdConfig& cfg);

/// Biased (V-statistic) MMD, sqrt(max(0, MMD_b^2)).
double mmd_biased(const SampleSet& x, const SampleSet& y, const MmdConfig& cfg);

}  // namespace projwass
