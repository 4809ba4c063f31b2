#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace projwass {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DegenerateDataError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

// ---------------------------------------------------------------------------
// Matrix aliases. Samples are stored row-major: one observation per row.
// ---------------------------------------------------------------------------

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Uniform empirical measure over the rows of an n x d matrix.
///
/// Construction validates n >= 1, d >= 1 and that every entry is finite.
/// Instances are immutable.
class SampleSet {
 public:
  explicit SampleSet(RowMatrix data);

  /// Builds a one-dimensional sample set (n x 1) from a list of values.
  static SampleSet from_values(std::span<const double> values);

  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(data_.cols()); }

  const RowMatrix& data() const noexcept { return data_; }
  auto row(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }

  /// Column j as a contiguous copy; convenient for k = 1 projections.
  std::vector<double> column(std::size_t j) const;

 private:
  RowMatrix data_;
};

/// A d x k matrix meant to satisfy A^T A = I_k. The defect is reported,
/// never silently corrected.
class ProjectionMatrix {
 public:
  explicit ProjectionMatrix(Matrix entries);

  /// Unit vector e_i in R^d (k = 1).
  static ProjectionMatrix basis_vector(std::size_t d, std::size_t i);
  static ProjectionMatrix identity(std::size_t d);

  std::size_t ambient_dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t k() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
  const Matrix& entries() const noexcept { return entries_; }

 private:
  Matrix entries_;
};

enum class GroundMetric { kEuclidean };

double distance(GroundMetric metric, const Eigen::Ref<const Vector>& x,
                const Eigen::Ref<const Vector>& y);

/// Returns the n x k sample set whose rows are A^T x_i.
SampleSet project(const ProjectionMatrix& a, const SampleSet& x);

/// QR-based orthonormalization. Each column's largest-magnitude entry is made
/// positive so that outputs are reproducible. Throws RankError when M does not
/// have full column rank.
ProjectionMatrix orthonormalize(const Matrix& m);

/// ||A^T A - I_k||_F.
double orthogonality_defect(const ProjectionMatrix& a);
double orthogonality_defect(const Matrix& a);

// ---------------------------------------------------------------------------
// Randomness
// ---------------------------------------------------------------------------

/// (seed, stream_id) identifies a reproducible pseudo-random stream.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  /// A child stream; distinct `child` values give independent streams.
  RngSeed derive(std::uint64_t child) const noexcept;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Seeded generator with portable uniform, normal and Laplace draws.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Normal variates use the Box-Muller transform rather than
/// std::normal_distribution (whose algorithm is implementation defined).
class Rng {
 public:
  explicit Rng(RngSeed seed);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer in [0, n). Requires n >= 1.
  std::size_t index(std::size_t n);
  double normal();
  double laplace(double location, double scale);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace projwass
