#include "projwass/transport1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace projwass {

namespace {

std::vector<std::size_t> stable_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  return order;
}

double cdf_integral(const std::vector<double>& us, const std::vector<double>& vs) {
  const std::size_t n = us.size();
  const std::size_t m = vs.size();
  const double nm = static_cast<double>(n) * static_cast<double>(m);
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(us.front(), vs.front());
  double area = 0.0;
  while (i < n || j < m) {
    const double t = (j == m || (i < n && us[i] <= vs[j])) ? us[i] : vs[j];
    // Counts of points strictly below t define F on [prev, t).
    const auto gap = static_cast<long long>(i * m) - static_cast<long long>(j * n);
    area += static_cast<double>(std::llabs(gap)) / nm * (t - prev);
    while (i < n && us[i] == t) ++i;
    while (j < m && vs[j] == t) ++j;
    prev = t;
  }
  return area;
}

std::vector<TransportEdge> quantile_plan(std::span<const double> u, std::span<const double> v) {
  const auto ou = stable_order(u);
  const auto ov = stable_order(v);
  const std::size_t n = u.size();
  const std::size_t m = v.size();
  const double total = static_cast<double>(n) * static_cast<double>(m);
  // Each source holds m units and each target n units of mass 1/(n m).
  std::vector<TransportEdge> plan;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t left_i = m;
  std::size_t left_j = n;
  while (i < n && j < m) {
    const std::size_t units = std::min(left_i, left_j);
    plan.push_back({ou[i], ov[j], static_cast<double>(units) / total});
    left_i -= units;
    left_j -= units;
    if (left_i == 0) {
      ++i;
      left_i = m;
    }
    if (left_j == 0) {
      ++j;
      left_j = n;
    }
  }
  return plan;
}

Matrix cost_matrix(const SampleSet& x, const SampleSet& y, GroundMetric metric) {
  Matrix c(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          distance(metric, x.row(i).transpose(), y.row(j).transpose());
    }
  }
  return c;
}

}  // namespace

TransportResult w1_1d(std::span<const double> u, std::span<const double> v, bool with_plan) {
  if (u.empty() || v.empty()) throw EmptyInputError("w1_1d needs non-empty inputs");
  TransportResult result;
  std::vector<double> us(u.begin(), u.end());
  std::vector<double> vs(v.begin(), v.end());
  std::sort(us.begin(), us.end());
  std::sort(vs.begin(), vs.end());
  if (us.size() == vs.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) sum += std::abs(us[i] - vs[i]);
    result.cost = sum / static_cast<double>(us.size());
  } else {
    result.cost = cdf_integral(us, vs);
  }
  if (with_plan) result.pairing = quantile_plan(u, v);
  return result;
}

TransportResult w1_1d(const SampleSet& u, const SampleSet& v, bool with_plan) {
  if (u.dim() != 1 || v.dim() != 1) throw DimensionError("w1_1d expects one-dimensional samples");
  const auto uc = u.column(0);
  const auto vc = v.column(0);
  return w1_1d(std::span<const double>(uc), std::span<const double>(vc), with_plan);
}

std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw DimensionError("assignment cost matrix must be square");
  if (n == 0) return {};
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; row 0 / column 0 are sentinels.
  std::vector<double> row_pot(n + 1, 0.0), col_pot(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           row_pot[i0] - col_pot[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[match[j]] += delta;
          col_pot[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[match[j] - 1] = j - 1;
  return assignment;
}

TransportResult w1_exact_small(const SampleSet& x, const SampleSet& y, GroundMetric metric) {
  if (x.dim() != y.dim()) throw DimensionError("sample sets differ in dimension");
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const Matrix c = cost_matrix(x, y, metric);
  TransportResult result;

  if (n == m) {
    if (n > 8) throw SizeLimitError("permutation brute force limited to n = m <= 8");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_perm = perm;
    do {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        total += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
      }
      if (total < best) {
        best = total;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.cost = best / static_cast<double>(n);
    std::vector<TransportEdge> plan;
    for (std::size_t i = 0; i < n; ++i) plan.push_back({i, best_perm[i], 1.0 / static_cast<double>(n)});
    result.pairing = std::move(plan);
    return result;
  }

  if (n * m > 64) throw SizeLimitError("transport brute force limited to n * m <= 64");
  const std::size_t total = n * m;
  // Copy r of source i is row i*m + r; copy s of target j is column j*n + s.
  Matrix expanded(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
  for (std::size_t r = 0; r < total; ++r) {
    for (std::size_t s = 0; s < total; ++s) {
      expanded(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
          c(static_cast<Eigen::Index>(r / m), static_cast<Eigen::Index>(s / n));
    }
  }
  const auto assignment = solve_assignment(expanded);
  std::map<std::pair<std::size_t, std::size_t>, double> mass;
  double cost = 0.0;
  const double unit = 1.0 / static_cast<double>(total);
  for (std::size_t r = 0; r < total; ++r) {
    const std::size_t i = r / m;
    const std::size_t j = assignment[r] / n;
    mass[{i, j}] += unit;
    cost += c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * unit;
  }
  result.cost = cost;
  std::vector<TransportEdge> plan;
  for (const auto& [key, w] : mass) plan.push_back({key.first, key.second, w});
  result.pairing = std::move(plan);
  return result;
}

}  // namespace projwass
