#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "projwass/datasets.hpp"
#include "test_support.hpp"

namespace projwass {
namespace {

Eigen::RowVectorXd column_means(const SampleSet& x) { return x.data().colwise().mean(); }

Matrix covariance(const SampleSet& x) {
  const RowMatrix centered = x.data().rowwise() - column_means(x);
  return centered.transpose() * centered / static_cast<double>(x.size() - 1);
}

DatasetSpec spec(DatasetFamily family, DatasetRole role, std::size_t d) {
  DatasetSpec s;
  s.family = family;
  s.role = role;
  s.d = d;
  return s;
}

TEST(Datasets, BlobCorrelation) {
  const Matrix mu = covariance(generate(spec(DatasetFamily::kBlob, DatasetRole::kMu, 2), 50000, RngSeed{1}));
  const Matrix nu = covariance(generate(spec(DatasetFamily::kBlob, DatasetRole::kNu, 2), 50000, RngSeed{1}));
  EXPECT_NEAR(mu(0, 1), 0.0, 0.02);
  const double corr = nu(0, 1) / std::sqrt(nu(0, 0) * nu(1, 1));
  EXPECT_GE(corr, 0.78);
  EXPECT_LE(corr, 0.84);
}

TEST(Datasets, HdgmMixtureMeanAndBlock) {
  const SampleSet mu = generate(spec(DatasetFamily::kHdgm, DatasetRole::kMu, 4), 50000, RngSeed{2});
  const auto mean = column_means(mu);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(mean(j), 2.5, 0.05);
  const SampleSet nu = generate(spec(DatasetFamily::kHdgm, DatasetRole::kNu, 4), 50000, RngSeed{2});
  // Within-component covariance: mixture covariance minus the 6.25 between-component part.
  const Matrix c = covariance(nu);
  EXPECT_NEAR(c(0, 1) - 6.25, 0.81, 0.06);
  EXPECT_NEAR(c(2, 3) - 6.25, 0.0, 0.06);
  EXPECT_NEAR(c(0, 0) - 6.25, 1.0, 0.06);
}

TEST(Datasets, LaplaceShift) {
  const SampleSet mu = generate(spec(DatasetFamily::kLaplaceShift, DatasetRole::kMu, 3), 50000, RngSeed{3});
  const SampleSet nu = generate(spec(DatasetFamily::kLaplaceShift, DatasetRole::kNu, 3), 50000, RngSeed{3});
  const auto mm = column_means(mu);
  const auto mn = column_means(nu);
  EXPECT_NEAR(mm(0), 0.0, 0.03);
  EXPECT_NEAR(mn(0), 1.0, 0.03);
  EXPECT_NEAR(mn(1), 0.0, 0.03);
  EXPECT_NEAR(covariance(mu)(1, 1), 2.0, 0.08);
  // Laplace(0, 1): mean absolute deviation 1.
  EXPECT_NEAR(mu.data().col(2).cwiseAbs().mean(), 1.0, 0.02);
}

TEST(Datasets, GaussVarLastCoordinate) {
  const Matrix c = covariance(generate(spec(DatasetFamily::kGaussVar, DatasetRole::kMu, 3), 50000, RngSeed{4}));
  EXPECT_GE(c(2, 2), 3.8);
  EXPECT_LE(c(2, 2), 4.2);
  for (int j = 0; j < 2; ++j) {
    EXPECT_GE(c(j, j), 0.93);
    EXPECT_LE(c(j, j), 1.07);
  }
  const Matrix nu = covariance(generate(spec(DatasetFamily::kGaussVar, DatasetRole::kNu, 3), 50000, RngSeed{4}));
  EXPECT_NEAR(nu(2, 2), 1.0, 0.05);
}

TEST(Datasets, DeterministicAndRoleSpecific) {
  const DatasetSpec s = spec(DatasetFamily::kLaplaceShift, DatasetRole::kMu, 5);
  EXPECT_EQ(generate(s, 30, RngSeed{7}).data(), generate(s, 30, RngSeed{7}).data());
  EXPECT_NE(generate(s, 30, RngSeed{7}).data(), generate(s, 30, RngSeed{8}).data());
  const SampleSet nu = generate(s.with_role(DatasetRole::kNu), 30, RngSeed{7});
  EXPECT_NE(generate(s, 30, RngSeed{7}).data().col(1), nu.data().col(1));
}

TEST(Datasets, Validation) {
  EXPECT_THROW(generate(spec(DatasetFamily::kBlob, DatasetRole::kMu, 3), 10, RngSeed{}), ConfigError);
  EXPECT_THROW(generate(spec(DatasetFamily::kHdgm, DatasetRole::kMu, 1), 10, RngSeed{}), ConfigError);
  EXPECT_THROW(generate(spec(DatasetFamily::kGaussVar, DatasetRole::kMu, 0), 10, RngSeed{}), ConfigError);
  EXPECT_THROW(generate(spec(DatasetFamily::kGaussVar, DatasetRole::kMu, 2), 0, RngSeed{}), ConfigError);
  DatasetSpec s;
  s.delta = 1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  EXPECT_NO_THROW(generate(spec(DatasetFamily::kLaplaceShift, DatasetRole::kNu, 1), 5, RngSeed{}));
}

TEST(Datasets, Names) {
  for (auto f : {DatasetFamily::kBlob, DatasetFamily::kHdgm, DatasetFamily::kLaplaceShift, DatasetFamily::kGaussVar}) {
    EXPECT_EQ(family_from_string(to_string(f)), f);
  }
  EXPECT_EQ(to_string(DatasetFamily::kLaplaceShift), "laplace-shift");
  EXPECT_EQ(role_from_string("nu"), DatasetRole::kNu);
  EXPECT_THROW(family_from_string("mnist"), ConfigError);
  EXPECT_THROW(role_from_string("xi"), ConfigError);
}

TEST(Kde, IntegratesToOneAndPeaksAtTheMode) {
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 10; ++trial) {
    const SampleSet u = testing::random_samples(gen, 50 + 10 * trial, 1);
    const auto curve = kde_export(u, 512);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
      EXPECT_GE(curve[i].density, 0.0);
      integral += 0.5 * (curve[i].density + curve[i + 1].density) * (curve[i + 1].t - curve[i].t);
    }
    EXPECT_GE(integral, 0.97);
    EXPECT_LE(integral, 1.03);
  }
  RowMatrix cluster(5, 1);
  cluster << -1e-3, 0.0, 1e-3, 2e-3, -2e-3;
  const auto curve = kde_export(SampleSet(cluster), 101);
  std::size_t peak = 0;
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].density > curve[peak].density) peak = i;
    if (std::abs(curve[i].t) < std::abs(curve[nearest].t)) nearest = i;
  }
  EXPECT_EQ(peak, nearest);
}

TEST(Kde, GridSpanAndErrors) {
  const SampleSet u = testing::rows({{0.0}, {1.0}, {3.0}});
  const auto curve = kde_export(u, 11, 0.5);
  EXPECT_DOUBLE_EQ(curve.front().t, -1.5);
  EXPECT_DOUBLE_EQ(curve.back().t, 4.5);
  double direct = 0.0;
  for (double v : {0.0, 1.0, 3.0}) {
    const double z = (curve.front().t - v) / 0.5;
    direct += std::exp(-0.5 * z * z);
  }
  direct /= 3.0 * 0.5 * std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(curve.front().density, direct, 1e-15);
  EXPECT_THROW(kde_export(testing::rows({{1.0}, {1.0}}), 10), DegenerateDataError);
  EXPECT_THROW(kde_export(testing::rows({{1.0}}), 10), ConfigError);
  EXPECT_THROW(kde_export(u, 1), ConfigError);
  EXPECT_THROW(kde_export(testing::rows({{1.0, 2.0}, {2.0, 1.0}}), 10), DimensionError);
}

TEST(Kde, SilvermanRule) {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  double mean = 4.5, ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / 7.0);
  EXPECT_GT(silverman_bandwidth(v), 0.0);
  EXPECT_LE(silverman_bandwidth(v), 0.9 * sd * std::pow(8.0, -0.2) + 1e-12);
}

}  // namespace
}  // namespace projwass
