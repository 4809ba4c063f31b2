#include "projwass/bounds.hpp"

#include <cmath>

namespace projwass {

namespace {

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void ThresholdParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (n < 1 || m < 1) throw ConfigError("sample sizes must be >= 1");
  if (k < 1) throw ConfigError("projection dimension must be >= 1");
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw ConfigError("Lipschitz constant must be positive");
  if (!finite_nonnegative(diameter_mu) || !finite_nonnegative(diameter_nu) ||
      !finite_nonnegative(second_moment_mu) || !finite_nonnegative(second_moment_nu)) {
    throw ConfigError("threshold constants must be finite and non-negative");
  }
}

double rademacher_bound_projected(std::size_t k, std::size_t n, double second_moment) {
  if (n < 1) throw ConfigError("sample size must be >= 1");
  return std::sqrt(2.0 * static_cast<double>(k) * second_moment / static_cast<double>(n));
}

ThresholdReport ipm_threshold_report(const ThresholdParams& params, const RademacherTerms& rademacher) {
  params.validate();
  const double n = static_cast<double>(params.n);
  const double m = static_cast<double>(params.m);
  const double log_term = std::log(2.0 / params.alpha);
  const double lb2 = params.lipschitz * params.lipschitz * params.diameter_mu * params.diameter_mu;
  ThresholdReport report;
  if (params.n == params.m) {
    report.equal_size_form = true;
    report.concentration_term = std::sqrt(lb2 / n * log_term);
    report.complexity_term_n = 2.0 * rademacher.n_term;
  } else {
    report.concentration_term = std::sqrt(lb2 * (m + n) / (2.0 * m * n) * log_term);
    report.complexity_term_n = 2.0 * rademacher.n_term;
    report.complexity_term_m = 2.0 * rademacher.m_term;
  }
  report.threshold = report.concentration_term + report.complexity_term_n + report.complexity_term_m;
  return report;
}

double ipm_threshold(const ThresholdParams& params, const RademacherTerms& rademacher) {
  return ipm_threshold_report(params, rademacher).threshold;
}

ThresholdReport pw_threshold_report(const ThresholdParams& params) {
  params.validate();
  const double n = static_cast<double>(params.n);
  const double m = static_cast<double>(params.m);
  const double log_term = std::log(2.0 / params.alpha);
  const double b = params.diameter_mu;
  ThresholdReport report;
  report.complexity_term_n = 2.0 * rademacher_bound_projected(params.k, params.n, params.second_moment_mu);
  if (params.n == params.m) {
    report.equal_size_form = true;
    report.concentration_term = b * std::sqrt(log_term) / std::sqrt(n);
  } else {
    report.concentration_term = std::sqrt(b * b * (m + n) / (2.0 * m * n) * log_term);
    report.complexity_term_m = 2.0 * rademacher_bound_projected(params.k, params.m, params.second_moment_nu);
  }
  report.threshold = report.concentration_term + report.complexity_term_n + report.complexity_term_m;
  return report;
}

double pw_threshold(const ThresholdParams& params) { return pw_threshold_report(params).threshold; }

ThresholdReport mmd_threshold_report(double kernel_bound, double diameter, std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (n < 1) throw ConfigError("sample size must be >= 1");
  if (!(kernel_bound > 0.0) || !finite_nonnegative(diameter)) {
    throw ConfigError("kernel bound must be positive and diameter non-negative");
  }
  const double scale = std::sqrt(2.0 * kernel_bound / static_cast<double>(n));
  ThresholdReport report;
  report.equal_size_form = true;
  report.concentration_term = scale * diameter * std::sqrt(std::log(2.0 / alpha));
  // sqrt(2K/n) * sqrt(2) = 2 sqrt(K/n), i.e. twice the RKHS Rademacher complexity.
  report.complexity_term_n = scale * std::sqrt(2.0);
  report.threshold = report.concentration_term + report.complexity_term_n;
  return report;
}

double mmd_threshold(double kernel_bound, double diameter, std::size_t n, double alpha) {
  return mmd_threshold_report(kernel_bound, diameter, n, alpha).threshold;
}

SampleSet sigmoid_preprocess(const SampleSet& x) {
  RowMatrix out = x.data().unaryExpr([](double t) {
    // Split on sign so neither branch overflows.
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
  });
  return SampleSet(std::move(out));
}

double estimate_diameter(const SampleSet& x) {
  const RowMatrix& data = x.data();
  if (x.size() <= 4096) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < data.rows(); ++j) {
        best = std::max(best, (data.row(i) - data.row(j)).squaredNorm());
      }
    }
    return std::sqrt(best);
  }
  return (data.colwise().maxCoeff() - data.colwise().minCoeff()).norm();
}

double estimate_second_moment(const SampleSet& x) { return x.data().rowwise().squaredNorm().mean(); }

EstimatedConstants estimate_constants(const SampleSet& x, const SampleSet& y) {
  if (x.size() < 2 || y.size() < 2) throw ConfigError("constant estimation needs n, m >= 2");
  return {estimate_diameter(x), estimate_diameter(y), estimate_second_moment(x), estimate_second_moment(y)};
}

}  // namespace projwass
