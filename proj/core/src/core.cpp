#include "projwass/core.hpp"

#include <cmath>
#include <numbers>

namespace projwass {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SampleSet::SampleSet(RowMatrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw EmptyInputError("SampleSet needs at least one row and one column");
  }
  if (!data_.allFinite()) {
    throw ConfigError("SampleSet entries must be finite");
  }
}

SampleSet SampleSet::from_values(std::span<const double> values) {
  RowMatrix m(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
  return SampleSet(std::move(m));
}

std::vector<double> SampleSet::column(std::size_t j) const {
  if (j >= dim()) throw DimensionError("column index out of range");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return out;
}

ProjectionMatrix::ProjectionMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.cols() < 1 || entries_.rows() < entries_.cols()) {
    throw DimensionError("projection matrix must be d x k with 1 <= k <= d");
  }
}

ProjectionMatrix ProjectionMatrix::basis_vector(std::size_t d, std::size_t i) {
  Matrix e = Matrix::Zero(static_cast<Eigen::Index>(d), 1);
  e(static_cast<Eigen::Index>(i), 0) = 1.0;
  return ProjectionMatrix(std::move(e));
}

ProjectionMatrix ProjectionMatrix::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return ProjectionMatrix(Matrix::Identity(n, n));
}

double distance(GroundMetric metric, const Eigen::Ref<const Vector>& x,
                const Eigen::Ref<const Vector>& y) {
  switch (metric) {
    case GroundMetric::kEuclidean:
      return (x - y).norm();
  }
  return 0.0;
}

SampleSet project(const ProjectionMatrix& a, const SampleSet& x) {
  if (a.ambient_dim() != x.dim()) {
    throw DimensionError("projection has " + std::to_string(a.ambient_dim()) +
                         " rows but samples have " + std::to_string(x.dim()) + " columns");
  }
  RowMatrix projected = x.data() * a.entries();
  return SampleSet(std::move(projected));
}

ProjectionMatrix orthonormalize(const Matrix& m) {
  const Eigen::Index d = m.rows();
  const Eigen::Index k = m.cols();
  if (k < 1 || d < k) throw RankError("matrix must be d x k with 1 <= k <= d");
  if (!m.allFinite()) throw RankError("matrix has non-finite entries");

  Eigen::HouseholderQR<Matrix> qr(m);
  const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const double scale = m.cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(scale, 1.0) * static_cast<double>(std::max(d, k));
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(std::abs(r(i, i)) > tol)) throw RankError("matrix is rank deficient");
  }

  Matrix q = qr.householderQ() * Matrix::Identity(d, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    q.col(j).cwiseAbs().maxCoeff(&arg);
    if (q(arg, j) < 0.0) q.col(j) *= -1.0;
  }
  return ProjectionMatrix(std::move(q));
}

double orthogonality_defect(const Matrix& a) {
  const Eigen::Index k = a.cols();
  return (a.transpose() * a - Matrix::Identity(k, k)).norm();
}

double orthogonality_defect(const ProjectionMatrix& a) { return orthogonality_defect(a.entries()); }

RngSeed RngSeed::derive(std::uint64_t child) const noexcept {
  return RngSeed{seed, splitmix64(stream_id ^ splitmix64(child + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(RngSeed seed) : engine_(splitmix64(seed.seed) ^ splitmix64(~seed.stream_id)) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

std::size_t Rng::index(std::size_t n) {
  // Reject the low residues so the accepted range is a multiple of n.
  const std::uint64_t bound = n;
  const std::uint64_t threshold = (std::uint64_t{0} - bound) % bound;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x < threshold);
  return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Rng::laplace(double location, double scale) {
  // Inverse CDF on u in (-1/2, 1/2).
  const double u = uniform_open() - 0.5;
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return location - scale * sign * std::log1p(-2.0 * std::abs(u));
}

}  // namespace projwass
