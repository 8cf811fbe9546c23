// Prints the exact joint degree law for a small model, checks it against
// exhaustive enumeration, and compares with a Monte Carlo tally.

#include <ripgf/ripgf.hpp>

#include <iostream>

int main() {
  using namespace ripgf;
  const ModelParams params(3, 4, Rational::parse("2/5"));

  const auto law = joint_pmf<Rational>(params);
  std::cout << "P(X = a, Y = b) for n = 3, m = 4, p = 2/5\n";
  for (std::size_t a = 0; a < params.n; ++a) {
    for (std::size_t b = 0; b < params.m; ++b) std::cout << "  " << law(a, b);
    std::cout << '\n';
  }
  std::cout << "matches enumeration: " << std::boolalpha << (law.pmf == exhaustive_joint(params).pmf) << '\n';

  const auto s = moments<Rational>(params);
  std::cout << "cov(X, Y) = " << s.cov << " ~ " << s.cov.to_double() << ", corr = " << s.corr.value_or(0.0) << '\n';

  const auto emp = empirical_joint(params, 100000, 1);
  std::cout << "TV distance to 100000 samples: " << tv_distance(law, emp) << '\n';
}
