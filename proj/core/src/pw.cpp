#include "projwass/pw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <unordered_map>

#include "projwass/transport1d.hpp"

namespace projwass {

namespace {

void check_conformable(const ProjectionMatrix& a, std::size_t d, const PotentialNetwork& net) {
  if (a.ambient_dim() != d) throw DimensionError("projection rows do not match sample dimension");
  if (net.input_dim() != a.k()) throw DimensionError("network input does not match projection dimension");
}

// Adds the Danskin contribution of one (x, y) pair to the accumulators.
// `grad_star` and `grad_y` are network gradients at A^T y* and A^T y.
bool accumulate_pair(const Matrix& a, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y_star,
                     const Eigen::Ref<const Vector>& y, const GradientBundle& grad_star,
                     const GradientBundle& grad_y, Matrix& grad_a, Vector& grad_theta) {
  const Vector w = x - y_star;
  const Vector diff = a.transpose() * w;
  const double r = diff.norm();
  bool degenerate = false;
  if (r > 0.0) {
    grad_a.noalias() += w * (diff / r).transpose();
  } else {
    degenerate = true;
  }
  grad_a.noalias() -= y_star * grad_star.d_input.transpose();
  grad_a.noalias() += y * grad_y.d_input.transpose();
  grad_theta += grad_y.d_theta - grad_star.d_theta;
  return degenerate;
}

double learning_rate(const PwConfig& cfg, std::size_t t) {
  double eta = cfg.learning_rate;
  if (cfg.schedule == LearningRateSchedule::kInverseSqrt) eta /= std::sqrt(static_cast<double>(t));
  // The explicit step on -lambda A (A^T A - I) is stable only while eta * lambda < 1.
  if (cfg.cap_step_by_penalty) eta = std::min(eta, 0.5 / cfg.lambda);
  return eta;
}

Matrix random_gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.normal();
  }
  return m;
}

}  // namespace

void PwConfig::validate(std::size_t d) const {
  if (k < 1 || k > d) {
    throw ConfigError("projection dimension k must satisfy 1 <= k <= d (k=" + std::to_string(k) +
                      ", d=" + std::to_string(d) + ")");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("penalty lambda must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (init_candidates < 1) throw ConfigError("init_candidates must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be finite and non-negative");
  }
  const auto dims = resolved_network_dims();
  if (dims.front() != k) throw ConfigError("network input dimension must equal k");
  PotentialNetwork probe(dims, activation);  // validates the remaining shape rules
}

std::vector<std::size_t> PwConfig::resolved_network_dims() const {
  return network_dims.empty() ? default_network_dims(k) : network_dims;
}

CTransformValue c_transform(const PotentialNetwork& net, const ProjectionMatrix& a,
                            const Eigen::Ref<const Vector>& x, const SampleSet& y, GroundMetric metric) {
  check_conformable(a, y.dim(), net);
  if (static_cast<std::size_t>(x.size()) != y.dim()) throw DimensionError("x has wrong dimension");
  const Vector ux = a.entries().transpose() * x;
  CTransformValue best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t j = 0; j < y.size(); ++j) {
    const Vector uy = a.entries().transpose() * y.row(j).transpose();
    const double score = distance(metric, ux, uy) - net.forward(uy);
    if (score < best.value) best = {score, j};
  }
  return best;
}

double dual_objective(const PotentialNetwork& net, const ProjectionMatrix& a, const SampleSet& x,
                      const SampleSet& y, GroundMetric metric) {
  check_conformable(a, y.dim(), net);
  if (x.dim() != y.dim()) throw DimensionError("sample sets differ in dimension");
  const RowMatrix px = x.data() * a.entries();
  const RowMatrix py = y.data() * a.entries();
  const Vector psi_y = net.forward_batch(py);
  double c_sum = 0.0;
  for (Eigen::Index i = 0; i < px.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < py.rows(); ++j) {
      const double score = distance(metric, px.row(i).transpose(), py.row(j).transpose()) - psi_y(j);
      best = std::min(best, score);
    }
    c_sum += best;
  }
  return c_sum / static_cast<double>(x.size()) + psi_y.mean();
}

DanskinGradients danskin_gradients(const PotentialNetwork& net, const ProjectionMatrix& a,
                                   const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                                   const SampleSet& y_support, GroundMetric metric) {
  if (static_cast<std::size_t>(y.size()) != y_support.dim()) throw DimensionError("y has wrong dimension");
  const auto ct = c_transform(net, a, x, y_support, metric);
  const Matrix& am = a.entries();
  const Vector y_star = y_support.row(ct.argmin).transpose();
  const GradientBundle grad_star = net.backward(am.transpose() * y_star);
  const GradientBundle grad_y = net.backward(am.transpose() * y);
  DanskinGradients out;
  out.grad_a = Matrix::Zero(am.rows(), am.cols());
  out.grad_theta = Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  out.degenerate = accumulate_pair(am, x, y_star, y, grad_star, grad_y, out.grad_a, out.grad_theta);
  return out;
}

namespace {

double sliced_score(const SampleSet& x, const SampleSet& y, const Matrix& a) {
  const RowMatrix px = x.data() * a;
  const RowMatrix py = y.data() * a;
  double score = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const Vector u = px.col(c);
    const Vector v = py.col(c);
    score += w1_1d(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                   std::span<const double>(v.data(), static_cast<std::size_t>(v.size())))
                 .cost;
  }
  return score;
}

Matrix screened_start(const SampleSet& x, const SampleSet& y, const PwConfig& cfg, Rng& rng) {
  Matrix best = orthonormalize(random_gaussian(x.dim(), cfg.k, rng)).entries();
  if (cfg.init_candidates == 1) return best;
  double best_score = sliced_score(x, y, best);
  for (std::size_t c = 1; c < cfg.init_candidates; ++c) {
    Matrix candidate = orthonormalize(random_gaussian(x.dim(), cfg.k, rng)).entries();
    const double score = sliced_score(x, y, candidate);
    if (score > best_score) {
      best_score = score;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace

PwConfig power_study_pw_config() {
  PwConfig cfg;
  cfg.activation = Activation::kTanh;
  cfg.reorthonormalize_every = 1;
  cfg.schedule = LearningRateSchedule::kConstant;
  return cfg;
}

PwEstimate estimate_pw(const SampleSet& x, const SampleSet& y, const PwConfig& cfg) {
  if (x.dim() != y.dim()) {
    throw DimensionError("sample sets differ in dimension (" + std::to_string(x.dim()) + " vs " +
                         std::to_string(y.dim()) + ")");
  }
  const std::size_t d = x.dim();
  cfg.validate(d);
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const std::size_t batch = std::min({cfg.batch_size, n, m});
  const bool full_scan = m <= cfg.full_scan_limit;

  Rng init_rng(cfg.seed.derive(0));
  Matrix a = screened_start(x, y, cfg, init_rng);
  PotentialNetwork net = init_network(cfg.resolved_network_dims(), cfg.activation, cfg.seed.derive(1));
  Rng rng(cfg.seed.derive(2));

  const auto k = static_cast<Eigen::Index>(cfg.k);
  const Matrix identity = Matrix::Identity(k, k);
  std::vector<std::size_t> xi(batch), yi(batch);
  std::vector<std::size_t> candidates;
  std::vector<TracePoint> trace;
  trace.reserve(cfg.iterations);
  std::unordered_map<std::size_t, GradientBundle> grad_cache;

  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    for (auto& i : xi) i = rng.index(n);
    for (auto& j : yi) j = rng.index(m);

    if (full_scan) {
      candidates.resize(m);
      for (std::size_t j = 0; j < m; ++j) candidates[j] = j;
    } else {
      candidates = yi;
    }
    RowMatrix py(static_cast<Eigen::Index>(candidates.size()), k);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      py.row(static_cast<Eigen::Index>(c)) = y.row(candidates[c]) * a;
    }
    const Vector psi = net.forward_batch(py);

    grad_cache.clear();
    auto gradient_at = [&](std::size_t j) -> const GradientBundle& {
      auto it = grad_cache.find(j);
      if (it == grad_cache.end()) {
        const Vector u = a.transpose() * y.row(j).transpose();
        it = grad_cache.emplace(j, net.backward(u)).first;
      }
      return it->second;
    };

    Matrix grad_a = Matrix::Zero(a.rows(), a.cols());
    Vector grad_theta = Vector::Zero(static_cast<Eigen::Index>(net.parameter_count()));
    double objective = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const Vector xv = x.row(xi[b]).transpose();
      const Vector ux = a.transpose() * xv;
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double score = (ux - py.row(static_cast<Eigen::Index>(c)).transpose()).norm() -
                             psi(static_cast<Eigen::Index>(c));
        if (score < best) {
          best = score;
          best_c = c;
        }
      }
      const std::size_t j_star = candidates[best_c];
      const Vector yv = y.row(yi[b]).transpose();
      const GradientBundle& g_y = gradient_at(yi[b]);
      // psi(A^T y_b): the batch slot itself when scanning the batch only.
      const double psi_y = full_scan ? psi(static_cast<Eigen::Index>(yi[b])) : psi(static_cast<Eigen::Index>(b));
      objective += best + psi_y;
      accumulate_pair(a, xv, y.row(j_star).transpose(), yv, gradient_at(j_star), g_y, grad_a, grad_theta);
    }
    const double inv_batch = 1.0 / static_cast<double>(batch);
    objective *= inv_batch;
    grad_a *= inv_batch;
    grad_theta *= inv_batch;

    const Matrix gram_gap = a.transpose() * a - identity;
    trace.push_back({t, objective, gram_gap.norm()});
    if (!std::isfinite(objective)) {
      throw DivergenceError("objective became non-finite at iteration " + std::to_string(t), t);
    }

    const double eta = learning_rate(cfg, t);
    net.add_to_parameters(eta * grad_theta);
    a += eta * (grad_a - cfg.lambda * a * gram_gap);
    if (!a.allFinite() || !grad_theta.allFinite()) {
      throw DivergenceError("parameters became non-finite at iteration " + std::to_string(t), t);
    }
    if (cfg.reorthonormalize_every > 0 && t % cfg.reorthonormalize_every == 0) {
      try {
        a = orthonormalize(a).entries();
      } catch (const RankError&) {
        throw DivergenceError("projection collapsed at iteration " + std::to_string(t), t);
      }
    }
  }

  ProjectionMatrix raw(a);
  ProjectionMatrix final_a = [&] {
    try {
      return orthonormalize(a);
    } catch (const RankError&) {
      throw DivergenceError("projection collapsed at the final iteration", cfg.iterations);
    }
  }();

  double value = 0.0;
  if (cfg.k == 1) {
    value = w1_1d(project(final_a, x), project(final_a, y)).cost;
  } else {
    value = dual_objective(net, final_a, x, y);
  }
  const double defect = orthogonality_defect(raw);
  return PwEstimate{value, std::move(final_a), std::move(raw), std::move(net), std::move(trace), defect};
}

GridOracleResult pw_grid_oracle_k1(const SampleSet& x, const SampleSet& y, std::size_t grid_size) {
  if (x.dim() != y.dim()) throw DimensionError("sample sets differ in dimension");
  const std::size_t d = x.dim();
  if (d > 3) throw SizeLimitError("grid oracle supports d <= 3");
  if (grid_size < 360) throw ConfigError("grid oracle needs grid_size >= 360");

  std::vector<Vector> directions;
  if (d == 1) {
    directions.push_back(Vector::Ones(1));
  } else if (d == 2) {
    // Directions are sign-equivalent, so the half circle [0, pi) suffices.
    for (std::size_t i = 0; i < grid_size; ++i) {
      const double angle = std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid_size);
      Vector v(2);
      v << std::cos(angle), std::sin(angle);
      directions.push_back(std::move(v));
    }
  } else {
    // Fibonacci lattice on the upper hemisphere z in (0, 1].
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < grid_size; ++i) {
      const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(grid_size);
      const double radius = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      Vector v(3);
      v << radius * std::cos(phi), radius * std::sin(phi), z;
      directions.push_back(std::move(v));
    }
  }

  GridOracleResult best{-1.0, directions.front()};
  std::vector<double> px(x.size()), py(y.size());
  for (const auto& dir : directions) {
    for (std::size_t i = 0; i < x.size(); ++i) px[i] = x.row(i).dot(dir.transpose());
    for (std::size_t j = 0; j < y.size(); ++j) py[j] = y.row(j).dot(dir.transpose());
    const double value = w1_1d(std::span<const double>(px), std::span<const double>(py)).cost;
    if (value > best.value) best = {value, dir};
  }
  return best;
}

std::vector<PenaltyProbeRow> penalty_gap_probe(const SampleSet& x, const SampleSet& y, const PwConfig& cfg,
                                               const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw ConfigError("penalty probe needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw ConfigError("penalty values must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw ConfigError("penalty values must be increasing");
  }
  std::vector<PenaltyProbeRow> rows;
  for (double lambda : lambdas) {
    PwConfig run = cfg;
    run.lambda = lambda;
    const auto est = estimate_pw(x, y, run);
    rows.push_back({lambda, est.value, est.defect});
  }
  return rows;
}

}  // namespace projwass
