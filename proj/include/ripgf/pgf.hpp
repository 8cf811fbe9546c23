#pragma once

// Joint degree law of a vertex in the active graph and an object in the
// passive graph of G*(n, m, p).
//
// Notation used throughout: for the tracked vertex v, Y1 counts the other
// vertices NOT adjacent to v in the active graph; Y2 is the same for the
// tracked object w in the passive graph. The sieve quantities are the joint
// binomial moments N(k, l) = E[C(Y1, k) C(Y2, l)], and the degrees are
// X = n-1-Y1, Y = m-1-Y2. The generating function of (Y1, Y2) is
// N(x-1, y-1); that of (X, Y) is x^(n-1) y^(m-1) N(1/x - 1, 1/y - 1).

#include <ripgf/numeric.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ripgf {

/// Parameters (n, m, p) of the bipartite model: n vertices, m objects,
/// each vertex-object edge present independently with probability p.
struct ModelParams {
  std::size_t n = 1;
  std::size_t m = 1;
  Probability p;

  ModelParams() = default;
  ModelParams(std::size_t n_, std::size_t m_, Probability p_) : n(n_), m(m_), p(std::move(p_)) {
    if (n < 1 || m < 1) throw std::invalid_argument("model needs n >= 1 and m >= 1");
  }
  ModelParams(std::size_t n_, std::size_t m_, const Rational& p_) : ModelParams(n_, m_, Probability(p_)) {}

  /// Same p with the roles of vertices and objects exchanged.
  ModelParams swapped() const { return {m, n, p}; }
};

enum class Side { Active, Passive };

inline const char* to_string(Side s) { return s == Side::Active ? "active" : "passive"; }

/// Dense row-major table.
template <class T>
class Table2D {
 public:
  Table2D() = default;
  Table2D(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const T& at(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw std::out_of_range("table index out of range");
    return (*this)(r, c);
  }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Table2D&, const Table2D&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Binomial moments N(k, l), 0 <= k < n, 0 <= l < m.
template <ScalarField T>
struct MomentTable {
  ModelParams params;
  Table2D<T> entries;

  const T& operator()(std::size_t k, std::size_t l) const { return entries(k, l); }
};

template <ScalarField T>
struct MarginalDistribution {
  Side side = Side::Active;
  std::vector<T> pmf;

  friend bool operator==(const MarginalDistribution&, const MarginalDistribution&) = default;
};

/// P(X = a, Y = b) for 0 <= a < n, 0 <= b < m.
template <ScalarField T>
struct JointDegreeDistribution {
  ModelParams params;
  Table2D<T> pmf;

  const T& operator()(std::size_t a, std::size_t b) const { return pmf(a, b); }

  T total() const {
    T s = from_int<T>(0);
    for (const auto& v : pmf.data()) s = s + v;
    return s;
  }

  /// Row sums (Active, law of X) or column sums (Passive, law of Y).
  MarginalDistribution<T> marginal(Side side) const {
    MarginalDistribution<T> out{side, {}};
    if (side == Side::Active) {
      out.pmf.assign(pmf.rows(), from_int<T>(0));
      for (std::size_t a = 0; a < pmf.rows(); ++a)
        for (std::size_t b = 0; b < pmf.cols(); ++b) out.pmf[a] = out.pmf[a] + pmf(a, b);
    } else {
      out.pmf.assign(pmf.cols(), from_int<T>(0));
      for (std::size_t a = 0; a < pmf.rows(); ++a)
        for (std::size_t b = 0; b < pmf.cols(); ++b) out.pmf[b] = out.pmf[b] + pmf(a, b);
    }
    return out;
  }
};

class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coefficient came out negative beyond round-off.
class CancellationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactLimits {
  /// Largest n*m accepted for exact moment tables.
  std::size_t max_cells = 40 * 40;
};

/// Round-off band within which float-mode negative coefficients are zeroed.
inline constexpr double kFloatClampTolerance = 1e-9;

namespace detail {

inline void check_indices(const ModelParams& params, std::size_t k, std::size_t l) {
  if (k >= params.n || l >= params.m)
    throw std::out_of_range("moment index (" + std::to_string(k) + ", " + std::to_string(l) +
                            ") outside [0, " + std::to_string(params.n - 1) + "] x [0, " +
                            std::to_string(params.m - 1) + "]");
}

template <ScalarField T>
std::vector<T> power_table(const T& base, std::size_t max_exp) {
  std::vector<T> out;
  out.reserve(max_exp + 1);
  out.push_back(from_int<T>(1));
  for (std::size_t e = 1; e <= max_exp; ++e) out.push_back(out.back() * base);
  return out;
}

/// C(r, c) for 0 <= c <= r <= size - 1, row-major Pascal triangle.
template <ScalarField T>
std::vector<std::vector<T>> pascal(std::size_t size) {
  std::vector<std::vector<T>> rows(size);
  for (std::size_t r = 0; r < size; ++r) {
    rows[r].resize(r + 1, from_int<T>(1));
    for (std::size_t c = 1; c < r; ++c) rows[r][c] = rows[r - 1][c - 1] + rows[r - 1][c];
  }
  return rows;
}

/// Coefficients of sum_j moments[j] (t - 1)^j, i.e. the one-dimensional
/// signed binomial transform.
template <ScalarField T>
std::vector<T> binomial_transform(const std::vector<T>& moments, const std::vector<std::vector<T>>& choose) {
  const std::size_t len = moments.size();
  std::vector<T> out(len, from_int<T>(0));
  for (std::size_t j = 0; j < len; ++j) {
    T acc = from_int<T>(0);
    for (std::size_t jj = j; jj < len; ++jj) {
      T term = choose[jj][j] * moments[jj];
      acc = ((jj - j) % 2 == 0) ? acc + term : acc - term;
    }
    out[j] = acc;
  }
  return out;
}

template <ScalarField T>
T settle_coefficient(T v) {
  if (sign_of(v) >= 0) return v;
  if constexpr (!scalar_traits<T>::exact) {
    if (-v < kFloatClampTolerance) return T{};
  }
  throw CancellationError("negative probability " + std::to_string(to_double(v)) +
                          " after sieve inversion");
}

/// The bracket base 1 - p + p(1-p)^e.
template <ScalarField T>
T avoid_base(const T& p, const std::vector<T>& qpow, std::size_t e) {
  return qpow[1] + p * qpow[e];
}

template <ScalarField T>
void check_exact_size(const ModelParams& params, const ExactLimits& limits) {
  if constexpr (scalar_traits<T>::exact) {
    if (params.n * params.m > limits.max_cells)
      throw ResourceLimitError("exact table of " + std::to_string(params.n) + "x" +
                               std::to_string(params.m) + " exceeds the cap of " +
                               std::to_string(limits.max_cells) + " cells");
  }
}

}  // namespace detail

/// P(v and w are adjacent to none of S1, S2 | v ~ w) with |S1| = k,
/// |S2| = l, as the double sum over i (neighbours of w in V) and j
/// (neighbours of v in W).
template <ScalarField T>
T cond_nonadjacency_given_edge(const ModelParams& params, std::size_t k, std::size_t l) {
  detail::check_indices(params, k, l);
  const std::size_t n = params.n, m = params.m;
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());
  T sum = from_int<T>(0);
  for (std::size_t i = 1; i <= n - k; ++i) {
    for (std::size_t j = 1; j <= m - l; ++j) {
      T term = binom_as<T>(m - 1 - l, j - 1) * binom_as<T>(n - 1 - k, i - 1);
      term = term * ipow(p, j - 1) * ipow(q, m - j) * ipow(q, (j - 1) * k);
      term = term * ipow(p, i - 1) * ipow(q, n - i) * ipow(q, (i - 1) * l);
      sum = sum + term;
    }
  }
  return sum;
}

/// Same event conditioned on v !~ w: quadruple sum over how many of w's
/// neighbours fall inside (i_s) and outside (i_o) S1, and likewise j_s, j_o
/// for v's neighbours and S2. Edges between the i_s and j_s groups are
/// counted twice by the two avoidance factors, hence the -i_s*j_s term,
/// which is folded into a single non-negative exponent so p = 1 is safe.
template <ScalarField T>
T cond_nonadjacency_given_nonedge(const ModelParams& params, std::size_t k, std::size_t l) {
  detail::check_indices(params, k, l);
  const std::size_t n = params.n, m = params.m;
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());
  T sum = from_int<T>(0);
  for (std::size_t is = 0; is <= k; ++is) {
    for (std::size_t io = 0; io <= n - 1 - k; ++io) {
      for (std::size_t js = 0; js <= l; ++js) {
        for (std::size_t jo = 0; jo <= m - 1 - l; ++jo) {
          T term = binom_as<T>(m - 1 - l, jo) * binom_as<T>(l, js) * binom_as<T>(n - 1 - k, io) *
                   binom_as<T>(k, is);
          const std::size_t j = jo + js, i = io + is;
          const std::size_t q_exp = (m - 1 - j) + (n - 1 - i) + j * k + i * l - is * js;
          term = term * ipow(p, j + i) * ipow(q, q_exp);
          sum = sum + term;
        }
      }
    }
  }
  return sum;
}

/// N(k, l) through the fully simplified product form.
template <ScalarField T>
T moment_entry(const ModelParams& params, std::size_t k, std::size_t l) {
  detail::check_indices(params, k, l);
  const std::size_t n = params.n, m = params.m;
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());

  const T a_base = q + p * ipow(q, k);
  const T b_base = q + p * ipow(q, l);
  const T q_l = ipow(q, l);

  T inner = from_int<T>(0);
  for (std::size_t i = 0; i <= l; ++i) {
    T base = ipow(q, i + 1) + p * q_l;
    inner = inner + binom_as<T>(l, i) * ipow(p, i) * ipow(q, l - i) * ipow(base, k);
  }
  const T bracket = ipow(q, k + l) * p + q * inner;
  return binom_as<T>(n - 1, k) * binom_as<T>(m - 1, l) * ipow(a_base, m - 1 - l) *
         ipow(b_base, n - 1 - k) * bracket;
}

/// Every N(k, l). Powers of 1-p, the bracket bases and the inner sum over i
/// are shared across entries, giving O(n m^2) scalar operations.
template <ScalarField T>
MomentTable<T> moment_table(const ModelParams& params, const ExactLimits& limits = {}) {
  detail::check_exact_size<T>(params, limits);
  const std::size_t n = params.n, m = params.m;
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());
  const auto qpow = detail::power_table(q, n + m);
  const auto ppow = detail::power_table(p, m);
  const auto choose = detail::pascal<T>(std::max(n, m));

  // inner(k, l) = sum_i C(l,i) p^i q^(l-i) [q^(i+1) + p q^l]^k
  Table2D<T> inner(n, m, from_int<T>(0));
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t i = 0; i <= l; ++i) {
      const T weight = choose[l][i] * ppow[i] * qpow[l - i];
      const T base = qpow[i + 1] + p * qpow[l];
      T power = from_int<T>(1);
      for (std::size_t k = 0; k < n; ++k) {
        inner(k, l) = inner(k, l) + weight * power;
        power = power * base;
      }
    }
  }

  // a_pow[k][e] = [1-p+p(1-p)^k]^e, b_pow[l][e] = [1-p+p(1-p)^l]^e
  std::vector<std::vector<T>> a_pow(n), b_pow(m);
  for (std::size_t k = 0; k < n; ++k) a_pow[k] = detail::power_table(detail::avoid_base(p, qpow, k), m - 1);
  for (std::size_t l = 0; l < m; ++l) b_pow[l] = detail::power_table(detail::avoid_base(p, qpow, l), n - 1);

  MomentTable<T> out{params, Table2D<T>(n, m)};
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      const T bracket = qpow[k + l] * p + q * inner(k, l);
      out.entries(k, l) = choose[n - 1][k] * choose[m - 1][l] * a_pow[k][m - 1 - l] *
                          b_pow[l][n - 1 - k] * bracket;
    }
  }
  return out;
}

/// Expands N(x-1, y-1) into coefficients of (Y1, Y2) and flips them into the
/// degree pmf P(X = a, Y = b) = P(Y1 = n-1-a, Y2 = m-1-b).
template <ScalarField T>
JointDegreeDistribution<T> sieve_invert(const MomentTable<T>& table) {
  const std::size_t n = table.params.n, m = table.params.m;
  if (table.entries.rows() != n || table.entries.cols() != m)
    throw std::invalid_argument("moment table shape does not match its parameters");
  const auto choose = detail::pascal<T>(std::max(n, m));

  // The two-dimensional transform factors into a pass along l then along k.
  Table2D<T> partial(n, m);
  std::vector<T> line(m);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < m; ++l) line[l] = table(k, l);
    auto coeffs = detail::binomial_transform(line, choose);
    for (std::size_t l = 0; l < m; ++l) partial(k, l) = std::move(coeffs[l]);
  }

  JointDegreeDistribution<T> out{table.params, Table2D<T>(n, m)};
  std::vector<T> column(n);
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t k = 0; k < n; ++k) column[k] = partial(k, l);
    auto coeffs = detail::binomial_transform(column, choose);
    for (std::size_t k = 0; k < n; ++k)
      out.pmf(n - 1 - k, m - 1 - l) = detail::settle_coefficient(std::move(coeffs[k]));
  }
  return out;
}

template <ScalarField T>
JointDegreeDistribution<T> joint_pmf(const ModelParams& params, const ExactLimits& limits = {}) {
  return sieve_invert(moment_table<T>(params, limits));
}

/// F(x, y) = E[x^X y^Y] as the closed-form double sum over (k, l) with the
/// inner sum over i. Summation runs l, i, k so powers of the inner bases can
/// be accumulated instead of recomputed; the terms are the same.
template <ScalarField T>
T eval_joint_pgf(const ModelParams& params, const T& x, const T& y) {
  const std::size_t n = params.n, m = params.m;
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());
  const T one = from_int<T>(1);
  const auto qpow = detail::power_table(q, n + m);
  const auto xpow = detail::power_table(x, n - 1);
  const auto x1pow = detail::power_table(one - x, n - 1);
  const auto ypow = detail::power_table(y, m - 1);
  const auto y1pow = detail::power_table(one - y, m - 1);

  std::vector<T> wx(n);
  for (std::size_t k = 0; k < n; ++k) wx[k] = binom_as<T>(n - 1, k) * xpow[n - 1 - k] * x1pow[k];

  T total = from_int<T>(0);
  std::vector<T> inner(n);
  for (std::size_t l = 0; l < m; ++l) {
    std::fill(inner.begin(), inner.end(), from_int<T>(0));
    for (std::size_t i = 0; i <= l; ++i) {
      const T weight = binom_as<T>(l, i) * ipow(p, i) * qpow[l - i];
      const T base = qpow[i + 1] + p * qpow[l];
      T power = one;
      for (std::size_t k = 0; k < n; ++k) {
        inner[k] = inner[k] + weight * power;
        power = power * base;
      }
    }
    const T wy = binom_as<T>(m - 1, l) * ypow[m - 1 - l] * y1pow[l];
    const T b_base = detail::avoid_base(p, qpow, l);
    for (std::size_t k = 0; k < n; ++k) {
      const T a_base = detail::avoid_base(p, qpow, k);
      const T bracket = qpow[k + l] * p + q * inner[k];
      total = total + wx[k] * wy * ipow(a_base, m - 1 - l) * ipow(b_base, n - 1 - k) * bracket;
    }
  }
  return total;
}

/// Marginal generating function: F(t) = E[t^X] for Active, E[t^Y] for
/// Passive.
template <ScalarField T>
T eval_marginal_pgf(const ModelParams& params, Side side, const T& t) {
  const std::size_t own = side == Side::Active ? params.n : params.m;
  const std::size_t other = side == Side::Active ? params.m : params.n;
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());
  const T one = from_int<T>(1);
  const auto qpow = detail::power_table(q, own);
  T total = from_int<T>(0);
  for (std::size_t k = 0; k < own; ++k) {
    total = total + binom_as<T>(own - 1, k) * ipow(t, own - 1 - k) * ipow(one - t, k) *
                        ipow(detail::avoid_base(p, qpow, k), other);
  }
  return total;
}

/// Coefficients of the marginal generating function, by a one-dimensional
/// sieve inversion of its binomial moments C(own-1, k) [1-p+p(1-p)^k]^other.
template <ScalarField T>
MarginalDistribution<T> marginal_pmf(const ModelParams& params, Side side) {
  const std::size_t own = side == Side::Active ? params.n : params.m;
  const std::size_t other = side == Side::Active ? params.m : params.n;
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());
  const auto qpow = detail::power_table(q, own);
  const auto choose = detail::pascal<T>(own);

  std::vector<T> moments(own);
  for (std::size_t k = 0; k < own; ++k)
    moments[k] = choose[own - 1][k] * ipow(detail::avoid_base(p, qpow, k), other);
  auto coeffs = detail::binomial_transform(moments, choose);

  MarginalDistribution<T> out{side, std::vector<T>(own)};
  for (std::size_t k = 0; k < own; ++k) out.pmf[own - 1 - k] = detail::settle_coefficient(std::move(coeffs[k]));
  return out;
}

/// N(u, v) = sum N(k, l) u^k v^l.
template <ScalarField T>
T eval_moment_polynomial(const MomentTable<T>& table, const T& u, const T& v) {
  const std::size_t n = table.params.n, m = table.params.m;
  const auto upow = detail::power_table(u, n - 1);
  const auto vpow = detail::power_table(v, m - 1);
  T total = from_int<T>(0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < m; ++l) total = total + table(k, l) * upow[k] * vpow[l];
  return total;
}

/// x^(n-1) y^(m-1) N(1/x - 1, 1/y - 1); undefined at x = 0 or y = 0.
template <ScalarField T>
T eval_via_moments(const MomentTable<T>& table, const T& x, const T& y) {
  if (sign_of(x) == 0 || sign_of(y) == 0)
    throw std::domain_error("moment-polynomial form needs nonzero x and y");
  const T one = from_int<T>(1);
  return ipow(x, table.params.n - 1) * ipow(y, table.params.m - 1) *
         eval_moment_polynomial(table, one / x - one, one / y - one);
}

template <ScalarField T>
struct Recombination {
  T lhs;
  T rhs;
};

/// lhs = C(n-1,k) C(m-1,l) [p P(.|v~w) + (1-p) P(.|v!~w)], rhs = N(k, l).
template <ScalarField T>
Recombination<T> recombination_check(const ModelParams& params, std::size_t k, std::size_t l) {
  const T p = scalar_traits<T>::from_rational(params.p.value());
  const T q = scalar_traits<T>::from_rational(params.p.complement());
  T lhs = binom_as<T>(params.n - 1, k) * binom_as<T>(params.m - 1, l) *
          (p * cond_nonadjacency_given_edge<T>(params, k, l) +
           q * cond_nonadjacency_given_nonedge<T>(params, k, l));
  return {std::move(lhs), moment_entry<T>(params, k, l)};
}

}  // namespace ripgf
