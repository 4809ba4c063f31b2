#include "projwass/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace projwass {

std::string to_string(DatasetFamily family) {
  switch (family) {
    case DatasetFamily::kBlob:
      return "blob";
    case DatasetFamily::kHdgm:
      return "hdgm";
    case DatasetFamily::kLaplaceShift:
      return "laplace-shift";
    case DatasetFamily::kGaussVar:
      return "gauss-var";
  }
  return "unknown";
}

std::string to_string(DatasetRole role) { return role == DatasetRole::kMu ? "mu" : "nu"; }

DatasetFamily family_from_string(const std::string& name) {
  if (name == "blob") return DatasetFamily::kBlob;
  if (name == "hdgm") return DatasetFamily::kHdgm;
  if (name == "laplace-shift") return DatasetFamily::kLaplaceShift;
  if (name == "gauss-var") return DatasetFamily::kGaussVar;
  throw ConfigError("unknown dataset family '" + name + "' (expected blob, hdgm, laplace-shift, gauss-var)");
}

DatasetRole role_from_string(const std::string& name) {
  if (name == "mu") return DatasetRole::kMu;
  if (name == "nu") return DatasetRole::kNu;
  throw ConfigError("unknown dataset role '" + name + "' (expected mu or nu)");
}

void DatasetSpec::validate() const {
  switch (family) {
    case DatasetFamily::kBlob:
      if (d != 2) throw ConfigError("blob requires d = 2 (got d = " + std::to_string(d) + ")");
      break;
    case DatasetFamily::kHdgm:
      if (d < 2) throw ConfigError("hdgm requires d >= 2");
      break;
    case DatasetFamily::kLaplaceShift:
    case DatasetFamily::kGaussVar:
      if (d < 1) throw ConfigError(to_string(family) + " requires d >= 1");
      break;
  }
  if (!(std::abs(delta) < 1.0)) throw ConfigError("delta must satisfy |delta| < 1");
  if (!(last_variance > 0.0)) throw ConfigError("variance must be positive");
  if (!std::isfinite(hdgm_offset) || !std::isfinite(laplace_shift)) {
    throw ConfigError("dataset parameters must be finite");
  }
}

SampleSet generate(const DatasetSpec& spec, std::size_t n, RngSeed seed) {
  spec.validate();
  if (n < 1) throw ConfigError("sample count must be >= 1");
  Rng rng(seed.derive(spec.role == DatasetRole::kMu ? 0x6d75 : 0x6e75));
  const auto d = static_cast<Eigen::Index>(spec.d);
  RowMatrix out(static_cast<Eigen::Index>(n), d);
  const bool nu = spec.role == DatasetRole::kNu;
  // Cholesky factor of [[1, delta], [delta, 1]].
  const double chol = std::sqrt(1.0 - spec.delta * spec.delta);

  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    switch (spec.family) {
      case DatasetFamily::kBlob:
      case DatasetFamily::kHdgm: {
        double offset = 0.0;
        if (spec.family == DatasetFamily::kHdgm && rng.uniform() >= 0.5) offset = spec.hdgm_offset;
        for (Eigen::Index c = 0; c < d; ++c) out(i, c) = rng.normal();
        if (nu) out(i, 1) = spec.delta * out(i, 0) + chol * out(i, 1);
        for (Eigen::Index c = 0; c < d; ++c) out(i, c) += offset;
        break;
      }
      case DatasetFamily::kLaplaceShift:
        for (Eigen::Index c = 0; c < d; ++c) {
          const double location = (nu && c == 0) ? spec.laplace_shift : 0.0;
          out(i, c) = rng.laplace(location, 1.0);
        }
        break;
      case DatasetFamily::kGaussVar:
        for (Eigen::Index c = 0; c < d; ++c) out(i, c) = rng.normal();
        if (!nu) out(i, d - 1) *= std::sqrt(spec.last_variance);
        break;
    }
  }
  return SampleSet(std::move(out));
}

double silverman_bandwidth(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

std::vector<KdePoint> kde_export(const SampleSet& u, std::size_t grid_points, std::optional<double> bandwidth) {
  if (u.dim() != 1) throw DimensionError("kde_export expects one-dimensional samples");
  if (u.size() < 2) throw ConfigError("kde_export needs at least two samples");
  if (grid_points < 2) throw ConfigError("kde_export needs at least two grid points");
  const auto values = u.column(0);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw DegenerateDataError("kde_export: sample has zero variance");

  double h = 0.0;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw ConfigError("KDE bandwidth must be positive");
    h = *bandwidth;
  } else {
    h = silverman_bandwidth(values);
  }
  const double start = lo - 3.0 * h;
  const double stop = hi + 3.0 * h;
  const double step = (stop - start) / static_cast<double>(grid_points - 1);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));

  std::vector<KdePoint> curve(grid_points);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double t = start + step * static_cast<double>(g);
    double sum = 0.0;
    for (double v : values) {
      const double z = (t - v) / h;
      sum += std::exp(-0.5 * z * z);
    }
    curve[g] = {t, sum * norm};
  }
  return curve;
}

}  // namespace projwass
