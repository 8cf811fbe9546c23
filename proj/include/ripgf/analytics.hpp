#pragma once

// Moments of the degree pair, the factorization (independence) diagnostic,
// Monte Carlo goodness-of-fit statistics, and the edge-count correlation
// between the two projections.

#include <ripgf/model.hpp>
#include <ripgf/numeric.hpp>
#include <ripgf/pgf.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ripgf {

template <ScalarField T>
struct MomentSummary {
  T mean_x;
  T mean_y;
  T var_x;
  T var_y;
  T cov;
  /// Empty when either variance is zero.
  std::optional<double> corr;

  friend bool operator==(const MomentSummary&, const MomentSummary&) = default;
};

namespace detail {

template <ScalarField T>
std::optional<double> correlation(const T& var_x, const T& var_y, const T& cov) {
  if (sign_of(var_x) <= 0 || sign_of(var_y) <= 0) return std::nullopt;
  return to_double(cov) / std::sqrt(to_double(var_x) * to_double(var_y));
}

template <ScalarField T>
T moment_or_zero(const ModelParams& params, std::size_t k, std::size_t l) {
  if (k >= params.n || l >= params.m) return from_int<T>(0);
  return moment_entry<T>(params, k, l);
}

template <ScalarField T>
T abs_value(const T& v) {
  return sign_of(v) < 0 ? from_int<T>(0) - v : v;
}

}  // namespace detail

/// Moments from the binomial moments of the non-neighbour counts Y1, Y2:
/// X = n-1-Y1 shares Var(Y1) = 2 N(2,0) + N(1,0) - N(1,0)^2, and
/// Cov(X, Y) = Cov(Y1, Y2) = N(1,1) - N(1,0) N(0,1). Only five entries are
/// evaluated, so this scales to large n, m in float mode.
template <ScalarField T>
MomentSummary<T> moments(const ModelParams& params) {
  const T n1 = from_int<T>(static_cast<long>(params.n - 1));
  const T m1 = from_int<T>(static_cast<long>(params.m - 1));
  const T two = from_int<T>(2);
  const T n10 = detail::moment_or_zero<T>(params, 1, 0);
  const T n01 = detail::moment_or_zero<T>(params, 0, 1);
  const T n20 = detail::moment_or_zero<T>(params, 2, 0);
  const T n02 = detail::moment_or_zero<T>(params, 0, 2);
  const T n11 = detail::moment_or_zero<T>(params, 1, 1);

  MomentSummary<T> s{n1 - n10, m1 - n01, two * n20 + n10 - n10 * n10, two * n02 + n01 - n01 * n01,
                     n11 - n10 * n01, std::nullopt};
  s.corr = detail::correlation(s.var_x, s.var_y, s.cov);
  return s;
}

/// The same summary computed by summing over a pmf table.
template <ScalarField T>
MomentSummary<T> moments_from_pmf(const JointDegreeDistribution<T>& dist) {
  T ex = from_int<T>(0), ey = from_int<T>(0), exx = from_int<T>(0), eyy = from_int<T>(0), exy = from_int<T>(0);
  for (std::size_t a = 0; a < dist.pmf.rows(); ++a) {
    const T fa = from_int<T>(static_cast<long>(a));
    for (std::size_t b = 0; b < dist.pmf.cols(); ++b) {
      const T fb = from_int<T>(static_cast<long>(b));
      const T& w = dist(a, b);
      ex = ex + fa * w;
      ey = ey + fb * w;
      exx = exx + fa * fa * w;
      eyy = eyy + fb * fb * w;
      exy = exy + fa * fb * w;
    }
  }
  MomentSummary<T> s{ex, ey, exx - ex * ex, eyy - ey * ey, exy - ex * ey, std::nullopt};
  s.corr = detail::correlation(s.var_x, s.var_y, s.cov);
  return s;
}

template <ScalarField T>
struct GridPoint {
  T x;
  T y;
};

/// {0, 0.1, ..., 1.0}^2.
template <ScalarField T>
std::vector<GridPoint<T>> default_independence_grid() {
  std::vector<GridPoint<T>> grid;
  grid.reserve(121);
  for (long i = 0; i <= 10; ++i)
    for (long j = 0; j <= 10; ++j)
      grid.push_back({scalar_traits<T>::from_rational(Rational(BigInt(i), BigInt(10))),
                      scalar_traits<T>::from_rational(Rational(BigInt(j), BigInt(10)))});
  return grid;
}

/// max over the grid of |F(x, y) - F_X(x) F_Y(y)|. X and Y are independent
/// exactly when this vanishes for all (x, y).
template <ScalarField T>
T independence_gap(const ModelParams& params, std::span<const GridPoint<T>> grid) {
  if (grid.empty()) throw std::invalid_argument("independence grid is empty");
  T worst = from_int<T>(0);
  for (const auto& pt : grid) {
    const T joint = eval_joint_pgf(params, pt.x, pt.y);
    const T product = eval_marginal_pgf(params, Side::Active, pt.x) * eval_marginal_pgf(params, Side::Passive, pt.y);
    const T gap = detail::abs_value(joint - product);
    if (gap > worst) worst = gap;
  }
  return worst;
}

template <ScalarField T>
T independence_gap(const ModelParams& params, const std::vector<GridPoint<T>>& grid) {
  return independence_gap(params, std::span<const GridPoint<T>>(grid));
}

namespace detail {

template <ScalarField T>
void check_shape(const JointDegreeDistribution<T>& exact, const EmpiricalJointDistribution& emp) {
  if (exact.pmf.rows() != emp.counts.rows() || exact.pmf.cols() != emp.counts.cols())
    throw std::invalid_argument("exact and empirical tables differ in shape");
}

}  // namespace detail

/// Half the L1 distance between the exact law and the empirical frequencies.
template <ScalarField T>
double tv_distance(const JointDegreeDistribution<T>& exact, const EmpiricalJointDistribution& emp) {
  detail::check_shape(exact, emp);
  if (emp.trials == 0) throw std::invalid_argument("empirical table has no trials");
  double sum = 0.0;
  const double trials = static_cast<double>(emp.trials);
  for (std::size_t a = 0; a < emp.counts.rows(); ++a)
    for (std::size_t b = 0; b < emp.counts.cols(); ++b)
      sum += std::abs(to_double(exact(a, b)) - static_cast<double>(emp.counts(a, b)) / trials);
  return 0.5 * sum;
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
};

/// Cells with expected count below this are merged into one remainder cell.
inline constexpr double kChiSquarePoolThreshold = 5.0;

/// Pearson goodness of fit of the empirical counts against the exact law.
template <ScalarField T>
ChiSquareResult chi_square(const JointDegreeDistribution<T>& exact, const EmpiricalJointDistribution& emp) {
  detail::check_shape(exact, emp);
  if (emp.trials == 0) throw std::invalid_argument("empirical table has no trials");
  const double trials = static_cast<double>(emp.trials);
  double statistic = 0.0, pooled_expected = 0.0, pooled_observed = 0.0;
  std::size_t cells = 0;
  for (std::size_t a = 0; a < emp.counts.rows(); ++a) {
    for (std::size_t b = 0; b < emp.counts.cols(); ++b) {
      const double expected = trials * to_double(exact(a, b));
      const double observed = static_cast<double>(emp.counts(a, b));
      if (expected >= kChiSquarePoolThreshold) {
        statistic += (observed - expected) * (observed - expected) / expected;
        ++cells;
      } else {
        pooled_expected += expected;
        pooled_observed += observed;
      }
    }
  }
  if (pooled_expected > 0.0) {
    statistic += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
    ++cells;
  } else if (pooled_observed > 0.0) {
    // Mass observed where the exact law has none.
    statistic = std::numeric_limits<double>::infinity();
    ++cells;
  }
  if (cells < 2) throw std::invalid_argument("chi-square needs at least 2 cells after pooling");
  return {statistic, cells - 1};
}

/// Upper critical value: P(chi2_dof <= value) = level.
inline double chi_square_quantile(std::size_t dof, double level) {
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
  return boost::math::quantile(dist, level);
}

/// Number of vertex pairs with a common object (edges of the active graph).
inline std::size_t active_edge_count(const BipartiteGraph& g) {
  std::size_t edges = 0;
  for (std::size_t a = 0; a < g.n(); ++a)
    for (std::size_t b = a + 1; b < g.n(); ++b)
      if (g.rows_intersect(a, b)) ++edges;
  return edges;
}

inline std::size_t passive_edge_count(const BipartiteGraph& g) { return active_edge_count(g.transposed()); }

/// Sample Pearson correlation of the active and passive edge counts; empty
/// when either count has zero sample variance.
inline std::optional<double> edge_count_correlation(const ModelParams& params, std::uint64_t trials,
                                                    std::uint64_t seed, unsigned workers = 1) {
  if (trials < 2) throw std::invalid_argument("edge-count correlation needs at least 2 trials");
  std::vector<double> active(trials), passive(trials);
  const EdgeThreshold threshold(params.p);
  detail::for_each_chunk(trials, workers, [&](std::uint64_t first, std::uint64_t last, unsigned) {
    for (std::uint64_t t = first; t < last; ++t) {
      const auto g = sample_bipartite(params.n, params.m, threshold, trial_seed(seed, t));
      active[t] = static_cast<double>(active_edge_count(g));
      passive[t] = static_cast<double>(passive_edge_count(g));
    }
  });
  const double count = static_cast<double>(trials);
  double ma = 0.0, mp = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    ma += active[t];
    mp += passive[t];
  }
  ma /= count;
  mp /= count;
  double saa = 0.0, spp = 0.0, sap = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double da = active[t] - ma, dp = passive[t] - mp;
    saa += da * da;
    spp += dp * dp;
    sap += da * dp;
  }
  if (saa == 0.0 || spp == 0.0) return std::nullopt;
  return sap / std::sqrt(saa * spp);
}

}  // namespace ripgf
