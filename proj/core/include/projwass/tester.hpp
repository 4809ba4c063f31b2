#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "projwass/bounds.hpp"
#include "projwass/core.hpp"
#include "projwass/datasets.hpp"
#include "projwass/mmd.hpp"
#include "projwass/pw.hpp"

namespace projwass {

enum class TestMethod { kPw, kMmd };
enum class Decision { kAcceptH0, kRejectH0 };

std::string to_string(TestMethod method);
std::string to_string(Decision decision);
TestMethod method_from_string(const std::string& name);

struct TestVerdict {
  double statistic = 0.0;
  std::optional<double> threshold;
  std::optional<Decision> decision;
  std::optional<double> p_value;
  TestMethod method = TestMethod::kPw;
  std::size_t permutations_used = 0;
  std::optional<ThresholdReport> threshold_report;
};

/// Statistic settings shared by the threshold, permutation and ROC paths.
struct MethodConfig {
  PwConfig pw;
  MmdConfig mmd;
  /// Apply sigmoid_preprocess to both samples before computing anything.
  bool sigmoid = false;
};

/// PW: exact value of estimate_pw. MMD: mmd_biased. Applies the sigmoid map
/// when cfg.sigmoid is set.
double compute_statistic(const SampleSet& x, const SampleSet& y, TestMethod method, const MethodConfig& cfg);

/// Threshold test: statistic against the finite-sample acceptance threshold
/// with plug-in constants. Rejects H0 iff statistic >= threshold.
TestVerdict run_test(const SampleSet& x, const SampleSet& y, TestMethod method, double alpha,
                     const MethodConfig& cfg);

using StatisticFn = std::function<double(const SampleSet&, const SampleSet&)>;

/// Monte-Carlo permutation p-value (1 + #{T_p >= T_obs}) / (P + 1). The pooled
/// rows are sorted lexicographically before splitting, so the result does not
/// depend on the order rows were supplied in. Split p uses seed.derive(p).
double permutation_pvalue(const SampleSet& x, const SampleSet& y, const StatisticFn& statistic,
                          std::size_t permutations, RngSeed seed, std::size_t jobs = 1);

/// Permutation test; decision is REJECT_H0 iff p <= alpha. No threshold.
TestVerdict run_permutation_test(const SampleSet& x, const SampleSet& y, TestMethod method, double alpha,
                                 const MethodConfig& cfg, std::size_t permutations, RngSeed seed,
                                 std::size_t jobs = 1);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  std::size_t trials_h0 = 0;
  std::size_t trials_h1 = 0;
  std::vector<double> statistics_h0;
  std::vector<double> statistics_h1;
};

/// Empirical ROC swept over every observed statistic (reject when statistic
/// >= threshold), from (0, 0) to (1, 1), with trapezoidal AUC.
RocCurve roc_from_statistics(std::span<const double> h0, std::span<const double> h1);

/// A (first sample, second sample) pair of distributions.
using DatasetPair = std::pair<DatasetSpec, DatasetSpec>;

struct RocExperiment {
  DatasetPair h0;
  DatasetPair h1;
  std::size_t n = 0;
  std::size_t m = 0;  ///< 0 means m = n
  std::size_t trials = 100;
};

/// Draws `trials` sample pairs under each hypothesis, computes the statistic
/// with a fresh optimizer seed per trial, and traces the ROC. Trial t under
/// hypothesis h uses seed.derive(h).derive(t).
RocCurve evaluate_roc(const RocExperiment& experiment, TestMethod method, const MethodConfig& cfg, RngSeed seed,
                      std::size_t jobs = 1);

/// H0: (mu, mu); H1: (mu, nu) for the given family and dimension.
RocExperiment standard_roc_experiment(DatasetFamily family, std::size_t d, std::size_t n, std::size_t trials);

}  // namespace projwass
