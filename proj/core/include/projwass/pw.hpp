#pragma once

#include <cstddef>
#include <vector>

#include "projwass/core.hpp"
#include "projwass/potential.hpp"

namespace projwass {

enum class LearningRateSchedule { kConstant, kInverseSqrt };

/// Optimizer settings for the projected Wasserstein estimator.
struct PwConfig {
  std::size_t k = 1;
  double lambda = 10.0;
  std::size_t batch_size = 64;
  std::size_t iterations = 1000;
  double learning_rate = 0.05;
  LearningRateSchedule schedule = LearningRateSchedule::kInverseSqrt;
  /// Clamp the step to 1 / (2 lambda) so the penalty update cannot overshoot.
  bool cap_step_by_penalty = true;
  RngSeed seed{};
  /// 0 = pure penalty method; otherwise orthonormalize A every this many steps.
  std::size_t reorthonormalize_every = 0;
  /// Empty selects default_network_dims(k).
  std::vector<std::size_t> network_dims;
  Activation activation = Activation::kRelu;
  /// The c-transform argmin scans all of Y while m <= this limit, else the batch.
  std::size_t full_scan_limit = 4096;
  /// Random orthonormal starting points screened before SGD; the one with the
  /// largest sum of per-column exact 1-D distances is kept. 1 = plain random start.
  std::size_t init_candidates = 16;

  /// Throws ConfigError on invalid settings for samples of dimension d.
  void validate(std::size_t d) const;
  std::vector<std::size_t> resolved_network_dims() const;
};

/// Settings used for the high-dimensional power studies: TANH potential,
/// orthonormalization after every step and a constant step size. The plain
/// defaults overfit noise directions when d is comparable to n + m.
PwConfig power_study_pw_config();

struct TracePoint {
  std::size_t iteration = 0;
  double objective = 0.0;  ///< batch dual objective before the update
  double defect = 0.0;     ///< ||A^T A - I||_F before the update
};

struct PwEstimate {
  /// For k = 1: exact W1 of the projections on the orthonormalized direction.
  /// For k > 1: full-sample dual objective at the orthonormalized projector.
  double value = 0.0;
  ProjectionMatrix projector;      ///< orthonormalized final A
  ProjectionMatrix raw_projector;  ///< A as left by the optimizer
  PotentialNetwork network;
  std::vector<TracePoint> trace;
  double defect = 0.0;  ///< orthogonality defect of raw_projector
};

struct CTransformValue {
  double value = 0.0;
  std::size_t argmin = 0;
};

/// psi^c(A^T x) = min_j [ c(A^T x, A^T y_j) - psi(A^T y_j) ], ties to the
/// smallest index.
CTransformValue c_transform(const PotentialNetwork& net, const ProjectionMatrix& a,
                            const Eigen::Ref<const Vector>& x, const SampleSet& y,
                            GroundMetric metric = GroundMetric::kEuclidean);

/// (1/n) sum_i psi^c(A^T x_i) + (1/m) sum_j psi(A^T y_j).
double dual_objective(const PotentialNetwork& net, const ProjectionMatrix& a, const SampleSet& x,
                      const SampleSet& y, GroundMetric metric = GroundMetric::kEuclidean);

struct DanskinGradients {
  Matrix grad_a;
  Vector grad_theta;
  /// Set when A^T x coincides with A^T y_{j*}; the cost term then contributes 0.
  bool degenerate = false;
};

/// Per-pair stochastic gradient of psi^c(A^T x) + psi(A^T y) at the frozen
/// argmin j* of the c-transform at x.
DanskinGradients danskin_gradients(const PotentialNetwork& net, const ProjectionMatrix& a,
                                   const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                                   const SampleSet& y_support,
                                   GroundMetric metric = GroundMetric::kEuclidean);

/// SGD ascent on the trace-penalized dual objective. Deterministic given
/// cfg.seed. Throws DivergenceError when the objective or parameters become
/// non-finite.
PwEstimate estimate_pw(const SampleSet& x, const SampleSet& y, const PwConfig& cfg);

struct GridOracleResult {
  double value = 0.0;
  Vector direction;
};

/// Maximum of w1_1d over grid_size unit directions (half circle for d = 2,
/// Fibonacci hemisphere for d = 3). Requires d <= 3 and grid_size >= 360.
GridOracleResult pw_grid_oracle_k1(const SampleSet& x, const SampleSet& y, std::size_t grid_size);

struct PenaltyProbeRow {
  double lambda = 0.0;
  double value = 0.0;
  double defect = 0.0;
};

/// Runs estimate_pw once per penalty value with a shared seed.
std::vector<PenaltyProbeRow> penalty_gap_probe(const SampleSet& x, const SampleSet& y, const PwConfig& cfg,
                                               const std::vector<double>& lambdas);

}  // namespace projwass
