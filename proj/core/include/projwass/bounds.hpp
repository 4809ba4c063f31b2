#pragma once

#include <cstddef>

#include "projwass/core.hpp"

namespace projwass {

/// Inputs to the finite-sample acceptance thresholds. Logarithms are natural.
struct ThresholdParams {
  double alpha = 0.05;
  std::size_t n = 0;
  std::size_t m = 0;
  double diameter_mu = 0.0;  ///< B_mu
  double diameter_nu = 0.0;  ///< B_nu
  double lipschitz = 1.0;    ///< L; 1 for the projected Wasserstein class
  double second_moment_mu = 0.0;
  double second_moment_nu = 0.0;
  std::size_t k = 1;

  /// Throws ConfigError unless 0 < alpha < 1, n, m >= 1 and constants are
  /// finite (diameters and moments >= 0, L > 0, k >= 1).
  void validate() const;
};

/// A threshold split into its concentration term and its complexity terms.
struct ThresholdReport {
  double concentration_term = 0.0;  ///< sqrt(L^2 B^2 ... log(2/alpha))
  double complexity_term_n = 0.0;   ///< 2 R_n (or 2 sqrt(2k/n E||X||^2))
  double complexity_term_m = 0.0;   ///< 2 R_m; zero for the equal-size form
  bool equal_size_form = false;
  double threshold = 0.0;
};

struct RademacherTerms {
  double n_term = 0.0;
  double m_term = 0.0;
};

/// Upper bound sqrt(2 k E||X||^2 / n) on the Rademacher complexity of
/// 1-Lipschitz functions composed with orthonormal k-dimensional projections.
double rademacher_bound_projected(std::size_t k, std::size_t n, double second_moment);

/// Generic IPM acceptance threshold. For n == m uses
/// sqrt(L^2 B^2 / n log(2/alpha)) + 2 R_n, otherwise
/// sqrt(L^2 B^2 (m+n)/(2mn) log(2/alpha)) + 2 (R_n + R_m). B is diameter_mu.
ThresholdReport ipm_threshold_report(const ThresholdParams& params, const RademacherTerms& rademacher);
double ipm_threshold(const ThresholdParams& params, const RademacherTerms& rademacher);

/// Projected Wasserstein acceptance threshold with plug-in second moments.
/// n == m: B sqrt(log(2/alpha)) / sqrt(n) + 2 sqrt(2k/n E_mu||X||^2).
/// n != m: sqrt(B^2 (m+n)/(2mn) log(2/alpha))
///         + 2 [sqrt(2k/n E_mu||X||^2) + sqrt(2k/m E_nu||Y||^2)].
ThresholdReport pw_threshold_report(const ThresholdParams& params);
double pw_threshold(const ThresholdParams& params);

/// Distribution-free MMD threshold sqrt(2K/n) (sqrt(2) + B sqrt(log(2/alpha))).
ThresholdReport mmd_threshold_report(double kernel_bound, double diameter, std::size_t n, double alpha);
double mmd_threshold(double kernel_bound, double diameter, std::size_t n, double alpha);

/// Entrywise logistic map into (0, 1)^d.
SampleSet sigmoid_preprocess(const SampleSet& x);

struct EstimatedConstants {
  double diameter_mu = 0.0;
  double diameter_nu = 0.0;
  double second_moment_mu = 0.0;
  double second_moment_nu = 0.0;
};

/// Largest pairwise distance: exact scan for n <= 4096, else the bounding-box
/// diagonal (an upper bound).
double estimate_diameter(const SampleSet& x);
/// Sample mean of ||x_i||^2.
double estimate_second_moment(const SampleSet& x);
EstimatedConstants estimate_constants(const SampleSet& x, const SampleSet& y);

}  // namespace projwass
