#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projwass/core.hpp"

namespace projwass {

enum class DatasetFamily { kBlob, kHdgm, kLaplaceShift, kGaussVar };
enum class DatasetRole { kMu, kNu };

std::string to_string(DatasetFamily family);
std::string to_string(DatasetRole role);
/// Accepts the CLI names blob, hdgm, laplace-shift, gauss-var.
DatasetFamily family_from_string(const std::string& name);
DatasetRole role_from_string(const std::string& name);

/// One of the four synthetic benchmark distributions.
///
///   blob           mu: N(0, I_2)               nu: N(0, [[1, delta], [delta, 1]])
///   hdgm           mu: 1/2 N(0, I_d) + 1/2 N(5 1_d, I_d)
///                  nu: same means, top-left 2x2 block [[1, delta], [delta, 1]]
///   laplace-shift  mu: iid Laplace(0, 1)       nu: first coordinate Laplace(shift, 1)
///   gauss-var      mu: N(0, 1)^(d-1) x N(0, last_variance)   nu: N(0, I_d)
///
/// Laplace draws use scale 1 (variance 2).
struct DatasetSpec {
  DatasetFamily family = DatasetFamily::kBlob;
  DatasetRole role = DatasetRole::kMu;
  std::size_t d = 2;
  double delta = 0.81;
  double hdgm_offset = 5.0;
  double laplace_shift = 1.0;
  double last_variance = 4.0;

  /// Throws ConfigError when the family's dimension rule is violated.
  void validate() const;
  DatasetSpec with_role(DatasetRole r) const {
    DatasetSpec copy = *this;
    copy.role = r;
    return copy;
  }
};

/// n i.i.d. draws. MU and NU roles use distinct substreams of `seed`.
SampleSet generate(const DatasetSpec& spec, std::size_t n, RngSeed seed);

struct KdePoint {
  double t = 0.0;
  double density = 0.0;
};

/// Gaussian KDE of a one-dimensional sample on a uniform grid spanning
/// [min - 3h, max + 3h]. A missing bandwidth selects Silverman's rule
/// 0.9 min(sd, IQR / 1.34) n^(-1/5). Throws DegenerateDataError on zero
/// variance and ConfigError for n < 2 or grid_points < 2.
std::vector<KdePoint> kde_export(const SampleSet& u, std::size_t grid_points,
                                 std::optional<double> bandwidth = std::nullopt);

double silverman_bandwidth(std::span<const double> values);

}  // namespace projwass
