#pragma once

// The generative side: sampling G*(n, m, p), the two one-mode projections,
// and the exhaustive enumeration oracle.

#include <ripgf/numeric.hpp>
#include <ripgf/pgf.hpp>

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ripgf {

/// n x m bit table; bit (i, j) is the edge between vertex i and object j.
class BipartiteGraph {
 public:
  BipartiteGraph(std::size_t n, std::size_t m)
      : n_(n), m_(m), words_((m + 63) / 64), bits_(n * ((m + 63) / 64), 0) {}

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

  bool edge(std::size_t vertex, std::size_t object) const {
    check(vertex, object);
    return (bits_[vertex * words_ + object / 64] >> (object % 64)) & 1U;
  }

  void set_edge(std::size_t vertex, std::size_t object, bool present = true) {
    check(vertex, object);
    auto& word = bits_[vertex * words_ + object / 64];
    const std::uint64_t mask = std::uint64_t{1} << (object % 64);
    word = present ? (word | mask) : (word & ~mask);
  }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (auto w : bits_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  BipartiteGraph transposed() const {
    BipartiteGraph t(m_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < m_; ++j)
        if (edge(i, j)) t.set_edge(j, i);
    return t;
  }

  /// True when vertices a and b have a common object.
  bool rows_intersect(std::size_t a, std::size_t b) const {
    for (std::size_t w = 0; w < words_; ++w)
      if (bits_[a * words_ + w] & bits_[b * words_ + w]) return true;
    return false;
  }

  const std::uint64_t* row(std::size_t vertex) const { return bits_.data() + vertex * words_; }
  std::size_t words_per_row() const { return words_; }

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  void check(std::size_t vertex, std::size_t object) const {
    if (vertex >= n_ || object >= m_) throw std::out_of_range("edge index out of range");
  }

  std::size_t n_;
  std::size_t m_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

/// Degree of `vertex` in the active graph: other vertices sharing an object.
inline std::size_t active_degree(const BipartiteGraph& g, std::size_t vertex) {
  if (vertex >= g.n()) throw std::out_of_range("vertex index out of range");
  std::size_t degree = 0;
  for (std::size_t u = 0; u < g.n(); ++u)
    if (u != vertex && g.rows_intersect(u, vertex)) ++degree;
  return degree;
}

/// Degree of `object` in the passive graph: other objects sharing a vertex.
inline std::size_t passive_degree(const BipartiteGraph& g, std::size_t object) {
  if (object >= g.m()) throw std::out_of_range("object index out of range");
  std::vector<std::uint64_t> reach(g.words_per_row(), 0);
  for (std::size_t i = 0; i < g.n(); ++i) {
    if (!g.edge(i, object)) continue;
    const std::uint64_t* r = g.row(i);
    for (std::size_t w = 0; w < reach.size(); ++w) reach[w] |= r[w];
  }
  reach[object / 64] &= ~(std::uint64_t{1} << (object % 64));
  std::size_t degree = 0;
  for (auto w : reach) degree += static_cast<std::size_t>(std::popcount(w));
  return degree;
}

struct DegreePair {
  std::size_t x = 0;  // active degree of vertex 0
  std::size_t y = 0;  // passive degree of object 0

  friend bool operator==(const DegreePair&, const DegreePair&) = default;
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for trial `index` under master seed `seed`. Depends only on the pair,
/// so any partition of the trials across workers reproduces the same draws.
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ index);
}

/// Edge test in fixed point: a uniform 64-bit draw u gives an edge iff
/// u < p * 2^64. The threshold is exact, so p = 0 and p = 1 never misfire.
class EdgeThreshold {
 public:
  explicit EdgeThreshold(const Probability& p) {
    BigInt scaled = p.value().numerator();
    scaled <<= 64;
    scaled /= p.value().denominator();  // floor(p * 2^64) <= 2^64
    static_assert(sizeof(unsigned long) == 8);
    if (scaled >> 64 != 0) {
      always_ = true;
    } else {
      cut_ = scaled.get_ui();
    }
  }

  bool operator()(std::uint64_t draw) const { return always_ || draw < cut_; }

 private:
  bool always_ = false;
  std::uint64_t cut_ = 0;
};

inline BipartiteGraph sample_bipartite(std::size_t n, std::size_t m, const EdgeThreshold& threshold,
                                       std::uint64_t seed) {
  BipartiteGraph g(n, m);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (threshold(rng())) g.set_edge(i, j);
  return g;
}

inline BipartiteGraph sample_bipartite(const ModelParams& params, std::uint64_t seed) {
  return sample_bipartite(params.n, params.m, EdgeThreshold(params.p), seed);
}

inline DegreePair degree_pair(const BipartiteGraph& g) { return {active_degree(g, 0), passive_degree(g, 0)}; }

inline DegreePair sample_degree_pair(const ModelParams& params, std::uint64_t seed) {
  return degree_pair(sample_bipartite(params, seed));
}

struct EmpiricalJointDistribution {
  std::size_t n = 1;
  std::size_t m = 1;
  Table2D<std::uint64_t> counts;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const EmpiricalJointDistribution&, const EmpiricalJointDistribution&) = default;
};

namespace detail {

/// Runs body(first, last, worker) over [0, total) split into contiguous
/// chunks, one per worker.
template <class Body>
void for_each_chunk(std::uint64_t total, unsigned workers, Body body) {
  workers = std::max(1U, workers);
  if (workers == 1 || total < workers) {
    body(0, total, 0U);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t step = total / workers, extra = total % workers;
  std::uint64_t first = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t last = first + step + (w < extra ? 1 : 0);
    pool.emplace_back(body, first, last, w);
    first = last;
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Tallies the degree pair over `trials` independent samples. The counts are
/// a function of (params, trials, seed) only; `workers` changes speed, not
/// the result.
inline EmpiricalJointDistribution empirical_joint(const ModelParams& params, std::uint64_t trials,
                                                  std::uint64_t seed, unsigned workers = 1) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  const EdgeThreshold threshold(params.p);
  const unsigned used = std::max(1U, workers);
  std::vector<Table2D<std::uint64_t>> partial(used, Table2D<std::uint64_t>(params.n, params.m, 0));
  detail::for_each_chunk(trials, used, [&](std::uint64_t first, std::uint64_t last, unsigned w) {
    auto& tally = partial[w];
    for (std::uint64_t t = first; t < last; ++t) {
      const auto g = sample_bipartite(params.n, params.m, threshold, trial_seed(seed, t));
      const auto d = degree_pair(g);
      ++tally(d.x, d.y);
    }
  });
  EmpiricalJointDistribution out{params.n, params.m, Table2D<std::uint64_t>(params.n, params.m, 0), trials, seed};
  for (const auto& tally : partial)
    for (std::size_t a = 0; a < params.n; ++a)
      for (std::size_t b = 0; b < params.m; ++b) out.counts(a, b) += tally(a, b);
  return out;
}

class InfeasibleSizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest n*m the enumeration oracle accepts (2^22 graphs).
inline constexpr std::size_t kMaxEnumerationCells = 22;

/// Exact law of (active degree of `vertex`, passive degree of `object`) by
/// visiting every one of the 2^(n m) bipartite graphs. Graphs are tallied
/// per (X, Y, edge count) in integers and weighted by p^e (1-p)^(nm-e) once
/// at the end.
inline JointDegreeDistribution<Rational> exhaustive_joint(const ModelParams& params, std::size_t vertex = 0,
                                                          std::size_t object = 0) {
  const std::size_t n = params.n, m = params.m, cells = n * m;
  if (cells > kMaxEnumerationCells)
    throw InfeasibleSizeError("enumeration over 2^" + std::to_string(cells) + " graphs exceeds the 2^" +
                              std::to_string(kMaxEnumerationCells) + " cap");
  if (vertex >= n || object >= m) throw std::out_of_range("tracked index out of range");

  const std::uint32_t row_mask = (std::uint32_t{1} << m) - 1;
  const std::uint32_t object_bit = std::uint32_t{1} << object;
  std::vector<std::uint64_t> tally(n * m * (cells + 1), 0);
  std::vector<std::uint32_t> rows(n);

  const std::uint64_t graphs = std::uint64_t{1} << cells;
  for (std::uint64_t code = 0; code < graphs; ++code) {
    for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(code >> (i * m)) & row_mask;
    std::size_t x = 0;
    std::uint32_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != vertex && (rows[i] & rows[vertex])) ++x;
      if (rows[i] & object_bit) reach |= rows[i];
    }
    const auto y = static_cast<std::size_t>(std::popcount(reach & ~object_bit));
    const auto e = static_cast<std::size_t>(std::popcount(code));
    ++tally[(x * m + y) * (cells + 1) + e];
  }

  const Rational p = params.p.value(), q = params.p.complement();
  std::vector<Rational> weight(cells + 1);
  for (std::size_t e = 0; e <= cells; ++e) weight[e] = ipow(p, e) * ipow(q, cells - e);

  JointDegreeDistribution<Rational> out{params, Table2D<Rational>(n, m)};
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) {
      Rational cell(0);
      for (std::size_t e = 0; e <= cells; ++e) {
        const auto c = tally[(x * m + y) * (cells + 1) + e];
        if (c) cell += Rational(BigInt(static_cast<unsigned long>(c))) * weight[e];
      }
      out.pmf(x, y) = cell;
    }
  return out;
}

}  // namespace ripgf
