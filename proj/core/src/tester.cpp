#include "projwass/tester.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "projwass/parallel.hpp"

namespace projwass {

std::string to_string(TestMethod method) { return method == TestMethod::kPw ? "pw" : "mmd"; }

std::string to_string(Decision decision) {
  return decision == Decision::kAcceptH0 ? "ACCEPT_H0" : "REJECT_H0";
}

TestMethod method_from_string(const std::string& name) {
  if (name == "pw") return TestMethod::kPw;
  if (name == "mmd") return TestMethod::kMmd;
  throw ConfigError("unknown method '" + name + "' (expected pw or mmd)");
}

double compute_statistic(const SampleSet& x, const SampleSet& y, TestMethod method, const MethodConfig& cfg) {
  if (x.dim() != y.dim()) throw DimensionError("sample sets differ in dimension");
  if (cfg.sigmoid) {
    MethodConfig plain = cfg;
    plain.sigmoid = false;
    return compute_statistic(sigmoid_preprocess(x), sigmoid_preprocess(y), method, plain);
  }
  if (method == TestMethod::kPw) return estimate_pw(x, y, cfg.pw).value;
  return mmd_biased(x, y, cfg.mmd);
}

TestVerdict run_test(const SampleSet& x_in, const SampleSet& y_in, TestMethod method, double alpha,
                     const MethodConfig& cfg) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (x_in.dim() != y_in.dim()) throw DimensionError("sample sets differ in dimension");
  const SampleSet x = cfg.sigmoid ? sigmoid_preprocess(x_in) : x_in;
  const SampleSet y = cfg.sigmoid ? sigmoid_preprocess(y_in) : y_in;
  MethodConfig plain = cfg;
  plain.sigmoid = false;

  TestVerdict verdict;
  verdict.method = method;
  verdict.statistic = compute_statistic(x, y, method, plain);

  const auto constants = estimate_constants(x, y);
  ThresholdReport report;
  if (method == TestMethod::kPw) {
    ThresholdParams params;
    params.alpha = alpha;
    params.n = x.size();
    params.m = y.size();
    params.diameter_mu = constants.diameter_mu;
    params.diameter_nu = constants.diameter_nu;
    params.second_moment_mu = constants.second_moment_mu;
    params.second_moment_nu = constants.second_moment_nu;
    params.k = cfg.pw.k;
    report = pw_threshold_report(params);
  } else if (x.size() == y.size()) {
    report = mmd_threshold_report(1.0, constants.diameter_mu, x.size(), alpha);
  } else {
    // Unequal sizes: the generic region with the Gaussian-kernel constants
    // L = sqrt(2K), R_n = sqrt(K/n), K = 1.
    ThresholdParams params;
    params.alpha = alpha;
    params.n = x.size();
    params.m = y.size();
    params.diameter_mu = constants.diameter_mu;
    params.diameter_nu = constants.diameter_nu;
    params.lipschitz = std::sqrt(2.0);
    report = ipm_threshold_report(params, {std::sqrt(1.0 / static_cast<double>(x.size())),
                                           std::sqrt(1.0 / static_cast<double>(y.size()))});
  }
  verdict.threshold = report.threshold;
  verdict.threshold_report = report;
  verdict.decision = verdict.statistic >= report.threshold ? Decision::kRejectH0 : Decision::kAcceptH0;
  return verdict;
}

double permutation_pvalue(const SampleSet& x, const SampleSet& y, const StatisticFn& statistic,
                          std::size_t permutations, RngSeed seed, std::size_t jobs) {
  if (x.dim() != y.dim()) throw DimensionError("sample sets differ in dimension");
  if (permutations < 19) throw ConfigError("permutation test needs at least 19 permutations");
  const std::size_t n = x.size();
  const std::size_t total = n + y.size();
  const auto d = static_cast<Eigen::Index>(x.dim());

  RowMatrix pooled(static_cast<Eigen::Index>(total), d);
  pooled.topRows(static_cast<Eigen::Index>(n)) = x.data();
  pooled.bottomRows(static_cast<Eigen::Index>(y.size())) = y.data();
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = pooled.row(static_cast<Eigen::Index>(a));
    const auto rb = pooled.row(static_cast<Eigen::Index>(b));
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  RowMatrix canonical(static_cast<Eigen::Index>(total), d);
  for (std::size_t i = 0; i < total; ++i) {
    canonical.row(static_cast<Eigen::Index>(i)) = pooled.row(static_cast<Eigen::Index>(order[i]));
  }

  const double observed = statistic(x, y);
  std::vector<char> exceeds(permutations, 0);
  parallel_for(permutations, jobs, [&](std::size_t p) {
    Rng rng(seed.derive(p));
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = total - 1; i > 0; --i) std::swap(idx[i], idx[rng.index(i + 1)]);
    RowMatrix px(static_cast<Eigen::Index>(n), d);
    RowMatrix py(static_cast<Eigen::Index>(total - n), d);
    for (std::size_t i = 0; i < n; ++i) {
      px.row(static_cast<Eigen::Index>(i)) = canonical.row(static_cast<Eigen::Index>(idx[i]));
    }
    for (std::size_t i = n; i < total; ++i) {
      py.row(static_cast<Eigen::Index>(i - n)) = canonical.row(static_cast<Eigen::Index>(idx[i]));
    }
    exceeds[p] = statistic(SampleSet(std::move(px)), SampleSet(std::move(py))) >= observed ? 1 : 0;
  });
  const auto count = static_cast<double>(std::count(exceeds.begin(), exceeds.end(), 1));
  return (1.0 + count) / (static_cast<double>(permutations) + 1.0);
}

TestVerdict run_permutation_test(const SampleSet& x, const SampleSet& y, TestMethod method, double alpha,
                                 const MethodConfig& cfg, std::size_t permutations, RngSeed seed,
                                 std::size_t jobs) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  StatisticFn fn = [method, cfg](const SampleSet& a, const SampleSet& b) {
    return compute_statistic(a, b, method, cfg);
  };
  TestVerdict verdict;
  verdict.method = method;
  verdict.statistic = fn(x, y);
  verdict.p_value = permutation_pvalue(x, y, fn, permutations, seed, jobs);
  verdict.permutations_used = permutations;
  verdict.decision = *verdict.p_value <= alpha ? Decision::kRejectH0 : Decision::kAcceptH0;
  return verdict;
}

RocCurve roc_from_statistics(std::span<const double> h0, std::span<const double> h1) {
  if (h0.empty() || h1.empty()) throw EmptyInputError("ROC needs statistics under both hypotheses");
  std::vector<double> sorted0(h0.begin(), h0.end());
  std::vector<double> sorted1(h1.begin(), h1.end());
  std::sort(sorted0.begin(), sorted0.end(), std::greater<>());
  std::sort(sorted1.begin(), sorted1.end(), std::greater<>());
  std::vector<double> thresholds(sorted0);
  thresholds.insert(thresholds.end(), sorted1.begin(), sorted1.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double n0 = static_cast<double>(h0.size());
  const double n1 = static_cast<double>(h1.size());
  RocCurve roc;
  roc.trials_h0 = h0.size();
  roc.trials_h1 = h1.size();
  roc.statistics_h0.assign(h0.begin(), h0.end());
  roc.statistics_h1.assign(h1.begin(), h1.end());
  roc.points.push_back({0.0, 0.0});
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  for (double tau : thresholds) {
    while (i0 < sorted0.size() && sorted0[i0] >= tau) ++i0;
    while (i1 < sorted1.size() && sorted1[i1] >= tau) ++i1;
    roc.points.push_back({static_cast<double>(i0) / n0, static_cast<double>(i1) / n1});
  }
  double auc = 0.0;
  for (std::size_t p = 1; p < roc.points.size(); ++p) {
    const auto& a = roc.points[p - 1];
    const auto& b = roc.points[p];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  roc.auc = auc;
  return roc;
}

RocCurve evaluate_roc(const RocExperiment& experiment, TestMethod method, const MethodConfig& cfg, RngSeed seed,
                      std::size_t jobs) {
  if (experiment.trials < 20) throw ConfigError("ROC evaluation needs at least 20 trials");
  if (experiment.n < 1) throw ConfigError("ROC evaluation needs n >= 1");
  const std::size_t n = experiment.n;
  const std::size_t m = experiment.m == 0 ? n : experiment.m;
  const std::size_t trials = experiment.trials;
  std::vector<double> stats(2 * trials);
  parallel_for(2 * trials, jobs, [&](std::size_t job) {
    const std::size_t hypothesis = job / trials;
    const std::size_t t = job % trials;
    const DatasetPair& pair = hypothesis == 0 ? experiment.h0 : experiment.h1;
    const RngSeed trial_seed = seed.derive(hypothesis).derive(t);
    const SampleSet x = generate(pair.first, n, trial_seed.derive(0));
    const SampleSet y = generate(pair.second, m, trial_seed.derive(1));
    MethodConfig trial_cfg = cfg;
    trial_cfg.pw.seed = trial_seed.derive(2);
    trial_cfg.mmd.subsample_seed = trial_seed.derive(3);
    stats[job] = compute_statistic(x, y, method, trial_cfg);
  });
  return roc_from_statistics(std::span<const double>(stats.data(), trials),
                             std::span<const double>(stats.data() + trials, trials));
}

RocExperiment standard_roc_experiment(DatasetFamily family, std::size_t d, std::size_t n, std::size_t trials) {
  DatasetSpec mu;
  mu.family = family;
  mu.d = d;
  mu.role = DatasetRole::kMu;
  const DatasetSpec nu = mu.with_role(DatasetRole::kNu);
  return RocExperiment{{mu, mu}, {mu, nu}, n, n, trials};
}

}  // namespace projwass
