#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "projwass/core.hpp"

namespace projwass {

struct TransportEdge {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

/// W1 value plus, on request, an optimal plan with uniform marginals.
struct TransportResult {
  double cost = 0.0;
  std::optional<std::vector<TransportEdge>> pairing;
};

/// Exact 1-Wasserstein distance between two uniform empirical measures on the
/// line. Equal sizes use the sorted-difference formula; unequal sizes integrate
/// |F_u - F_v| exactly over the merged breakpoints. Ties are ordered by index.
TransportResult w1_1d(std::span<const double> u, std::span<const double> v, bool with_plan = false);

/// Same as above for n x 1 sample sets. Throws DimensionError otherwise.
TransportResult w1_1d(const SampleSet& u, const SampleSet& v, bool with_plan = false);

/// Brute-force exact transport for tiny instances in any dimension.
///
/// n = m <= 8 enumerates all permutations. For n != m with n * m <= 64 every
/// atom of X is split into m copies and every atom of Y into n copies, which
/// turns the transport problem into an n*m assignment solved exactly by
/// `solve_assignment`. Throws SizeLimitError outside those limits.
TransportResult w1_exact_small(const SampleSet& x, const SampleSet& y,
                               GroundMetric metric = GroundMetric::kEuclidean);

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(N^3)). Returns assignment[row] = column.
std::vector<std::size_t> solve_assignment(const Matrix& cost);

}  // namespace projwass
