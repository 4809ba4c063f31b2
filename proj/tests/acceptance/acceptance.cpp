// Acceptance checks for the toolkit. Prints one PASS/FAIL line per criterion
// and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "projwass/bounds.hpp"
#include "projwass/datasets.hpp"
#include "projwass/io.hpp"
#include "projwass/mmd.hpp"
#include "projwass/potential.hpp"
#include "projwass/pw.hpp"
#include "projwass/tester.hpp"
#include "projwass/transport1d.hpp"
#include "test_support.hpp"

#if PROJWASS_HAVE_CLI
#include "cli.hpp"
#endif

namespace {

using namespace projwass;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

SampleSet oracle_x() { return testing::rows({{0.0, 0.0}, {1.0, 0.0}}); }
SampleSet oracle_y() { return testing::rows({{0.0, 2.0}, {1.0, 2.0}}); }

DatasetSpec dataset(DatasetFamily family, DatasetRole role, std::size_t d) {
  DatasetSpec s;
  s.family = family;
  s.role = role;
  s.d = d;
  return s;
}

// ---------------------------------------------------------------------------

Outcome oracle_adequacy() {
  const SampleSet x = oracle_x();
  const SampleSet y = oracle_y();
  const GridOracleResult oracle = pw_grid_oracle_k1(x, y, 3600);
  const double cos_limit = std::cos(5.0 * std::numbers::pi / 180.0);
  int hits = 0;
  double slowest = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PwConfig cfg;
    cfg.seed = RngSeed{seed};
    const auto start = Clock::now();
    const PwEstimate est = estimate_pw(x, y, cfg);
    const double elapsed = seconds_since(start);
    slowest = std::max(slowest, elapsed);
    const double alignment = std::abs(est.projector.entries()(1, 0));
    const bool value_ok = std::abs(est.value - oracle.value) <= 0.02 * oracle.value;
    if (value_ok && alignment >= cos_limit && elapsed < 5.0) ++hits;
  }
  const bool oracle_ok = std::abs(oracle.value - 2.0) <= 1e-9;
  return {oracle_ok && hits >= 8, "grid oracle " + fmt(oracle.value, 10) + ", " + std::to_string(hits) +
                                      "/10 seeds within 2% and 5 deg, slowest run " + fmt(slowest, 3) + " s"};
}

Outcome exact_transport() {
  std::mt19937_64 gen(2024);
  double worst = 0.0;
  int unequal = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen() % 6;
    const SampleSet u = testing::random_samples(gen, n, 1);
    const SampleSet v = testing::random_samples(gen, n, 1);
    worst = std::max(worst, std::abs(w1_1d(u, v).cost - w1_exact_small(u, v).cost));
  }
  while (unequal < 100) {
    const std::size_t n = 1 + gen() % 16;
    const std::size_t m = 1 + gen() % 16;
    if (n == m || n * m > 64) continue;
    const SampleSet u = testing::random_samples(gen, n, 1);
    const SampleSet v = testing::random_samples(gen, m, 1);
    worst = std::max(worst, std::abs(w1_1d(u, v).cost - w1_exact_small(u, v).cost));
    ++unequal;
  }
  return {worst <= 1e-9, "max |w1_1d - exact| = " + fmt(worst, 3) + " over 500 equal + 100 unequal instances"};
}

// Batch objective with the c-transform argmins held fixed.
double frozen_objective(const PotentialNetwork& net, const Matrix& a, const std::vector<Vector>& xs,
                        const std::vector<Vector>& ys, const std::vector<std::size_t>& j_star,
                        const SampleSet& support) {
  double total = 0.0;
  for (std::size_t b = 0; b < xs.size(); ++b) {
    const Vector y_star = support.row(j_star[b]).transpose();
    total += (a.transpose() * (xs[b] - y_star)).norm() - net.forward(a.transpose() * y_star) +
             net.forward(a.transpose() * ys[b]);
  }
  return total / static_cast<double>(xs.size());
}

Outcome gradient_correctness() {
  std::mt19937_64 gen(3);
  const double h = 1e-6;
  double worst = 0.0;
  auto record = [&](double analytic, double numeric) {
    worst = std::max(worst, std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric)));
  };
  for (std::uint64_t instance = 0; instance < 100; ++instance) {
    const std::size_t d = 2 + gen() % 4;
    const std::size_t k = 1 + gen() % std::min<std::size_t>(d, 3);
    const PotentialNetwork net = init_network({k, 8, 8, 1}, Activation::kTanh, RngSeed{instance, 31});

    // backward against central differences of forward.
    const Vector z = testing::random_matrix(gen, k, 1).col(0);
    const GradientBundle g = net.backward(z);
    const Vector theta = net.parameters();
    PotentialNetwork probe = net;
    for (Eigen::Index p = 0; p < theta.size(); ++p) {
      Vector tp = theta, tm = theta;
      tp(p) += h;
      tm(p) -= h;
      probe.set_parameters(tp);
      const double fp = probe.forward(z);
      probe.set_parameters(tm);
      record(g.d_theta(p), (fp - probe.forward(z)) / (2 * h));
    }
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      Vector zp = z, zm = z;
      zp(i) += h;
      zm(i) -= h;
      record(g.d_input(i), (net.forward(zp) - net.forward(zm)) / (2 * h));
    }

    // danskin_gradients against central differences of the frozen objective.
    const ProjectionMatrix a = testing::random_orthonormal(gen, d, k);
    const SampleSet support = testing::random_samples(gen, 9, d);
    std::vector<Vector> xs, ys;
    std::vector<std::size_t> j_star;
    Matrix grad_a = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k));
    Vector grad_theta = Vector::Zero(theta.size());
    for (int b = 0; b < 4; ++b) {
      xs.push_back(testing::random_matrix(gen, d, 1).col(0));
      ys.push_back(support.row(gen() % 9).transpose());
      j_star.push_back(c_transform(net, a, xs.back(), support).argmin);
      const DanskinGradients dg = danskin_gradients(net, a, xs.back(), ys.back(), support);
      grad_a += dg.grad_a / 4.0;
      grad_theta += dg.grad_theta / 4.0;
    }
    for (Eigen::Index i = 0; i < grad_a.rows(); ++i) {
      for (Eigen::Index c = 0; c < grad_a.cols(); ++c) {
        Matrix ap = a.entries(), am = a.entries();
        ap(i, c) += h;
        am(i, c) -= h;
        record(grad_a(i, c), (frozen_objective(net, ap, xs, ys, j_star, support) -
                              frozen_objective(net, am, xs, ys, j_star, support)) /
                                 (2 * h));
      }
    }
    for (Eigen::Index p = 0; p < theta.size(); ++p) {
      Vector tp = theta, tm = theta;
      tp(p) += h;
      tm(p) -= h;
      probe.set_parameters(tp);
      const double fp = frozen_objective(probe, a.entries(), xs, ys, j_star, support);
      probe.set_parameters(tm);
      record(grad_theta(p), (fp - frozen_objective(probe, a.entries(), xs, ys, j_star, support)) / (2 * h));
    }
  }
  return {worst <= 1e-4, "max relative error " + fmt(worst, 3) + " over 100 tanh instances"};
}

Outcome h0_decay() {
  const DatasetSpec mu = dataset(DatasetFamily::kBlob, DatasetRole::kMu, 2);
  auto median_statistic = [&](std::size_t n) {
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RngSeed s{seed, n};
      PwConfig cfg;
      cfg.seed = s.derive(2);
      values.push_back(estimate_pw(generate(mu, n, s.derive(0)), generate(mu, n, s.derive(1)), cfg).value);
    }
    return median(values);
  };
  const double small = median_statistic(400);
  const double large = median_statistic(1600);
  const double ratio = large / small;
  return {ratio <= 0.7, "median n=400 " + fmt(small) + ", n=1600 " + fmt(large) + ", ratio " + fmt(ratio, 3)};
}

Outcome type_one_control() {
  const DatasetSpec gauss = dataset(DatasetFamily::kGaussVar, DatasetRole::kNu, 2);
  MethodConfig cfg;
  cfg.sigmoid = true;
  int rejections = 0;
  double largest_ratio = 0.0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const RngSeed s{trial, 5};
    cfg.pw.seed = s.derive(2);
    const TestVerdict v = run_test(generate(gauss, 100, s.derive(0)), generate(gauss, 100, s.derive(1)),
                                   TestMethod::kPw, 0.05, cfg);
    if (v.decision == Decision::kRejectH0) ++rejections;
    largest_ratio = std::max(largest_ratio, v.statistic / *v.threshold);
  }
  const double rate = rejections / 200.0;
  return {rate <= 0.05,
          "rejection rate " + fmt(rate, 3) + " (largest statistic/threshold " + fmt(largest_ratio, 3) + ")"};
}

Outcome power_laplace() {
  const RocExperiment e = standard_roc_experiment(DatasetFamily::kLaplaceShift, 400, 200, 100);
  MethodConfig cfg;
  cfg.pw = power_study_pw_config();
  const double pw_auc = evaluate_roc(e, TestMethod::kPw, cfg, RngSeed{6}).auc;
  const double mmd_auc = evaluate_roc(e, TestMethod::kMmd, cfg, RngSeed{6}).auc;
  const bool pass = pw_auc >= 0.95 && mmd_auc >= 0.75 && mmd_auc <= 0.92 && pw_auc > mmd_auc;
  return {pass, "PW AUC " + fmt(pw_auc) + ", MMD AUC " + fmt(mmd_auc)};
}

Outcome power_gauss_var() {
  const RocExperiment e = standard_roc_experiment(DatasetFamily::kGaussVar, 50, 40, 100);
  MethodConfig cfg;
  cfg.pw = power_study_pw_config();
  const double pw_auc = evaluate_roc(e, TestMethod::kPw, cfg, RngSeed{7}).auc;
  const double mmd_auc = evaluate_roc(e, TestMethod::kMmd, cfg, RngSeed{7}).auc;
  const bool pass = pw_auc >= 0.90 && mmd_auc >= 0.90 && std::abs(pw_auc - mmd_auc) <= 0.06;
  return {pass, "PW AUC " + fmt(pw_auc) + ", MMD AUC " + fmt(mmd_auc)};
}

Outcome penalty_trend() {
  const std::vector<double> lambdas{1.0, 10.0, 100.0};
  std::vector<std::vector<double>> defects(lambdas.size());
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PwConfig cfg;
    cfg.seed = RngSeed{seed, 8};
    const auto rows = penalty_gap_probe(oracle_x(), oracle_y(), cfg, lambdas);
    for (std::size_t i = 0; i < rows.size(); ++i) defects[i].push_back(rows[i].defect);
  }
  std::vector<double> medians;
  for (const auto& d : defects) medians.push_back(median(d));
  const bool monotone = medians[1] <= medians[0] && medians[2] <= medians[1];
  const bool halved = medians[2] <= 0.5 * medians[0];
  return {monotone && halved,
          "median defects " + fmt(medians[0]) + " / " + fmt(medians[1]) + " / " + fmt(medians[2])};
}

Outcome threshold_formulas() {
  double worst = 0.0;
  auto check = [&](double got, long double expected) {
    worst = std::max(worst, static_cast<double>(std::abs(static_cast<long double>(got) - expected)));
  };
  ThresholdParams p;
  p.alpha = 0.05;
  p.n = 100;
  p.m = 100;
  p.diameter_mu = 2.0;
  p.diameter_nu = 2.0;
  p.second_moment_mu = 1.0;
  p.second_moment_nu = 1.0;
  check(pw_threshold(p), 0.666972L);
  check(pw_threshold(p), 2.0L * std::sqrt(std::log(40.0L)) / 10.0L + 2.0L * std::sqrt(2.0L / 100.0L));
  check(ipm_threshold(p, {0.0, 0.0}), 0.384129L);
  check(ipm_threshold(p, {0.05, 0.07}), 2.0L * std::sqrt(std::log(40.0L)) / 10.0L + 0.1L);
  check(mmd_threshold(1.0, 1.0, 200, 0.05), 0.333486L);
  check(mmd_threshold(1.0, 1.0, 200, 0.05), std::sqrt(0.01L) * (std::sqrt(2.0L) + std::sqrt(std::log(40.0L))));
  p.m = 150;
  p.second_moment_nu = 3.0;
  check(pw_threshold(p), std::sqrt(4.0L * 250.0L / (2.0L * 100.0L * 150.0L) * std::log(40.0L)) +
                             2.0L * (std::sqrt(2.0L / 100.0L) + std::sqrt(6.0L / 150.0L)));
  check(rademacher_bound_projected(1, 200, 2.0), std::sqrt(0.02L));
  // The published constants carry six decimals.
  return {worst <= 1e-6, "max deviation " + fmt(worst, 3)};
}

Outcome permutation_calibration() {
  const DatasetSpec mu = dataset(DatasetFamily::kBlob, DatasetRole::kMu, 2);
  int small = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const RngSeed s{trial, 10};
    MmdConfig mmd;
    mmd.subsample_seed = s.derive(3);
    const StatisticFn statistic = [mmd](const SampleSet& a, const SampleSet& b) { return mmd_biased(a, b, mmd); };
    const double p = permutation_pvalue(generate(mu, 100, s.derive(0)), generate(mu, 100, s.derive(1)), statistic,
                                        199, s.derive(4));
    if (p <= 0.05) ++small;
  }
  const double fraction = small / 200.0;
  return {fraction <= 0.08, "fraction of p <= 0.05: " + fmt(fraction, 3) + " (MMD statistic)"};
}

#if PROJWASS_HAVE_CLI
Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "projwass_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };

  int failures = 0;
  for (const char* side : {"a", "b"}) {
    const fs::path dir = root / side;
    const std::string x = (dir / "x.csv").string();
    const std::string y = (dir / "y.csv").string();
    failures += run({"generate", "--family", "blob", "--role", "mu", "--n", "200", "--seed", "1", "--out", x}) != 0;
    failures += run({"generate", "--family", "blob", "--role", "nu", "--n", "200", "--seed", "2", "--out", y}) != 0;
    failures += run({"pw", "--x", x, "--y", y, "--seed", "3", "--kde-grid", "64", "--out-dir", (dir / "pw").string()}) != 0;
    const int code = run({"test", "--x", x, "--y", y, "--method", "mmd", "--mode", "permutation", "--seed", "4",
                          "--out", (dir / "verdict.json").string()});
    failures += code != 0 && code != 1;
    failures += run({"roc", "--family", "blob", "--n", "30", "--trials", "20", "--method", "both", "--iters", "100",
                     "--seed", "5", "--out-dir", (dir / "roc").string()}) != 0;
    failures += run({"sweep-lambda", "--repeats", "2", "--seed", "6", "--out", (dir / "sweep.csv").string()}) != 0;
  }

  std::size_t compared = 0;
  std::size_t differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.find("manifest") != std::string::npos) continue;
    const fs::path twin = root / "b" / fs::relative(entry.path(), root / "a");
    ++compared;
    if (!fs::exists(twin) || io::read_file(entry.path()) != io::read_file(twin)) ++differing;
  }
  fs::remove_all(root);
  return {failures == 0 && differing == 0 && compared >= 15,
          std::to_string(compared) + " data files compared, " + std::to_string(differing) + " differ, " +
              std::to_string(failures) + " command failures"};
}
#endif

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria{
      {1, "oracle adequacy", 50.0, oracle_adequacy},
      {2, "exact transport equivalence", 10.0, exact_transport},
      {3, "gradient correctness", 10.0, gradient_correctness},
      {4, "null statistic decay", 120.0, h0_decay},
      {5, "type-I control", 300.0, type_one_control},
      {6, "power on laplace-shift", 900.0, power_laplace},
      {7, "power on gauss-var", 600.0, power_gauss_var},
      {8, "penalty trend", 120.0, penalty_trend},
      {9, "threshold formulas", 1.0, threshold_formulas},
      {10, "permutation calibration", 600.0, permutation_calibration},
#if PROJWASS_HAVE_CLI
      {11, "CLI determinism", 60.0, cli_determinism},
#endif
  };

  // Optional arguments select criteria by number.
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    const bool in_budget = elapsed <= c.budget_seconds;
    const bool pass = outcome.pass && in_budget;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << outcome.detail
              << "; " << fmt(elapsed, 3) << " s of " << fmt(c.budget_seconds, 4) << " s budget"
              << (in_budget ? "" : " EXCEEDED") << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
