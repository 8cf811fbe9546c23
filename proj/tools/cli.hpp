#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include <ripgf/ripgf.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace ripgf::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidArgs = 2, kInfeasible = 3 };

/// Environment variable overriding the per-dimension cap for exact tables.
inline constexpr const char* kCapEnv = "RIPGF_EXACT_CAP";
inline constexpr std::size_t kDefaultCap = 40;

struct RunConfig {
  std::string command;
  std::size_t n = 2;
  std::size_t m = 2;
  std::string p = "1/2";
  std::string p_grid;
  std::string x = "1";
  std::string y = "1";
  std::uint64_t trials = 100000;
  std::uint64_t seed = 42;
  unsigned workers = 1;
  std::string mode = "exact";
  std::string format = "csv";
  std::string output;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using nlohmann::json;

namespace detail {

inline std::size_t exact_cap() {
  const char* env = std::getenv(kCapEnv);
  if (env == nullptr || *env == '\0') return kDefaultCap;
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(env, &used);
    if (used != std::string(env).size() || v == 0) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string(kCapEnv) + " must be a positive integer, got '" + env + "'");
  }
}

inline ModelParams params_of(const RunConfig& cfg, const std::string& p_text) {
  if (cfg.n < 1 || cfg.m < 1) throw UsageError("--n and --m must be at least 1");
  return ModelParams(cfg.n, cfg.m, Probability::parse(p_text));
}

inline void require_exact(const RunConfig& cfg) {
  if (cfg.mode != "exact") throw UsageError(cfg.command + " runs in exact mode only; --mode float is not accepted");
}

inline void require_within_cap(const ModelParams& params, std::size_t cap) {
  if (params.n > cap || params.m > cap)
    throw InfeasibleSizeError("n and m must not exceed the exact-mode cap of " + std::to_string(cap) +
                              " (set " + kCapEnv + " to change it)");
}

inline ExactLimits limits_for(std::size_t cap) { return ExactLimits{cap * cap}; }

inline json rational_json(const Rational& r) {
  return json{{"num", r.numerator().get_str()}, {"den", r.denominator().get_str()}};
}

inline json params_json(const ModelParams& params) {
  return json{{"n", params.n}, {"m", params.m}, {"p", rational_json(params.p.value())}};
}

template <ScalarField T>
json value_json(const T& v) {
  if constexpr (scalar_traits<T>::exact) {
    return rational_json(v);
  } else {
    return v;
  }
}

template <ScalarField T>
std::string rational_column(const T& v) {
  if constexpr (scalar_traits<T>::exact) {
    return v.str();
  } else {
    return "";
  }
}

inline std::string corr_text(const std::optional<double>& c) { return c ? format_decimal(*c) : "undefined"; }

inline json corr_json(const std::optional<double>& c) { return c ? json(*c) : json("undefined"); }

// ---------------------------------------------------------------------------

inline void cmd_pmf(const RunConfig& cfg, std::ostream& out) {
  require_exact(cfg);
  const auto params = params_of(cfg, cfg.p);
  const std::size_t cap = exact_cap();
  require_within_cap(params, cap);
  const auto joint = joint_pmf<Rational>(params, limits_for(cap));
  const auto active = marginal_pmf<Rational>(params, Side::Active);
  const auto passive = marginal_pmf<Rational>(params, Side::Passive);

  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t a = 0; a < params.n; ++a)
      for (std::size_t b = 0; b < params.m; ++b)
        rows.push_back({{"a", a}, {"b", b}, {"prob", rational_json(joint(a, b))}});
    auto marginal = [](const MarginalDistribution<Rational>& d) {
      json arr = json::array();
      for (std::size_t k = 0; k < d.pmf.size(); ++k) arr.push_back({{"degree", k}, {"prob", rational_json(d.pmf[k])}});
      return arr;
    };
    json doc{{"params", params_json(params)},
             {"mode", "exact"},
             {"result", {{"joint", rows}, {"active_marginal", marginal(active)}, {"passive_marginal", marginal(passive)}}}};
    out << doc.dump(2) << '\n';
    return;
  }

  out << "a,b,prob_rational,prob_decimal\n";
  for (std::size_t a = 0; a < params.n; ++a)
    for (std::size_t b = 0; b < params.m; ++b)
      out << a << ',' << b << ',' << joint(a, b).str() << ',' << format_decimal(joint(a, b).to_double()) << '\n';
  out << "\nside,degree,prob_rational,prob_decimal\n";
  for (const auto* d : {&active, &passive})
    for (std::size_t k = 0; k < d->pmf.size(); ++k)
      out << to_string(d->side) << ',' << k << ',' << d->pmf[k].str() << ',' << format_decimal(d->pmf[k].to_double())
          << '\n';
}

template <ScalarField T>
void emit_moments(const RunConfig& cfg, const ModelParams& params, std::ostream& out) {
  const auto s = moments<T>(params);
  const std::pair<const char*, const T*> fields[] = {
      {"mean_x", &s.mean_x}, {"mean_y", &s.mean_y}, {"var_x", &s.var_x}, {"var_y", &s.var_y}, {"cov", &s.cov}};
  if (cfg.format == "json") {
    json result;
    for (const auto& [name, v] : fields) result[name] = value_json(*v);
    result["corr"] = corr_json(s.corr);
    out << json{{"params", params_json(params)}, {"mode", cfg.mode}, {"result", result}}.dump(2) << '\n';
    return;
  }
  out << "field,value_rational,value_decimal\n";
  for (const auto& [name, v] : fields) out << name << ',' << rational_column(*v) << ',' << format_decimal(to_double(*v)) << '\n';
  out << "corr,," << corr_text(s.corr) << '\n';
}

inline void cmd_moments(const RunConfig& cfg, std::ostream& out) {
  const auto params = params_of(cfg, cfg.p);
  if (cfg.mode == "exact")
    emit_moments<Rational>(cfg, params, out);
  else
    emit_moments<double>(cfg, params, out);
}

template <ScalarField T>
void emit_pgf(const RunConfig& cfg, const ModelParams& params, std::ostream& out) {
  const T x = scalar_traits<T>::from_rational(Rational::parse(cfg.x));
  const T y = scalar_traits<T>::from_rational(Rational::parse(cfg.y));
  const T joint = eval_joint_pgf(params, x, y);
  const T fx = eval_marginal_pgf(params, Side::Active, x);
  const T fy = eval_marginal_pgf(params, Side::Passive, y);
  const T gap = ripgf::detail::abs_value(joint - fx * fy);
  const std::pair<const char*, const T*> fields[] = {
      {"joint", &joint}, {"marginal_active", &fx}, {"marginal_passive", &fy}, {"factorization_gap", &gap}};
  if (cfg.format == "json") {
    json result;
    for (const auto& [name, v] : fields) result[name] = value_json(*v);
    out << json{{"params", params_json(params)}, {"mode", cfg.mode}, {"x", cfg.x}, {"y", cfg.y}, {"result", result}}.dump(2)
        << '\n';
    return;
  }
  out << "quantity,value_rational,value_decimal\n";
  for (const auto& [name, v] : fields) out << name << ',' << rational_column(*v) << ',' << format_decimal(to_double(*v)) << '\n';
}

inline void cmd_pgf(const RunConfig& cfg, std::ostream& out) {
  const auto params = params_of(cfg, cfg.p);
  if (cfg.mode == "exact")
    emit_pgf<Rational>(cfg, params, out);
  else
    emit_pgf<double>(cfg, params, out);
}

inline void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  require_exact(cfg);
  const auto params = params_of(cfg, cfg.p);
  if (cfg.trials < 1) throw UsageError("--trials must be at least 1");
  const unsigned workers = cfg.workers == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.workers;
  const auto emp = empirical_joint(params, cfg.trials, cfg.seed, workers);

  const std::size_t cap = exact_cap();
  std::optional<double> tv;
  std::optional<ChiSquareResult> chi;
  if (params.n <= cap && params.m <= cap) {
    const auto exact = joint_pmf<Rational>(params, limits_for(cap));
    tv = tv_distance(exact, emp);
    try {
      chi = chi_square(exact, emp);
    } catch (const std::invalid_argument&) {
      // Degenerate law (single cell): no chi-square statistic.
    }
  }

  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t a = 0; a < params.n; ++a)
      for (std::size_t b = 0; b < params.m; ++b) rows.push_back({{"a", a}, {"b", b}, {"count", emp.counts(a, b)}});
    json result{{"counts", rows}, {"trials", emp.trials}, {"seed", emp.seed}};
    if (tv) result["tv_distance"] = *tv;
    if (chi)
      result["chi_square"] = {{"statistic", chi->statistic},
                              {"dof", chi->dof},
                              {"critical_999", chi_square_quantile(chi->dof, 0.999)}};
    out << json{{"params", params_json(params)}, {"mode", "exact"}, {"result", result}}.dump(2) << '\n';
    return;
  }
  out << "a,b,count\n";
  for (std::size_t a = 0; a < params.n; ++a)
    for (std::size_t b = 0; b < params.m; ++b) out << a << ',' << b << ',' << emp.counts(a, b) << '\n';
  out << "\nmetric,value\n";
  out << "trials," << emp.trials << '\n';
  out << "seed," << emp.seed << '\n';
  if (tv) out << "tv_distance," << format_decimal(*tv) << '\n';
  if (chi) {
    out << "chi_square," << format_decimal(chi->statistic) << '\n';
    out << "chi_square_dof," << chi->dof << '\n';
    out << "chi_square_critical_999," << format_decimal(chi_square_quantile(chi->dof, 0.999)) << '\n';
  }
}

struct Check {
  std::string name;
  bool passed;
};

/// Fixed nonzero evaluation points for the moment-polynomial identity.
inline std::vector<GridPoint<Rational>> identity_points() {
  const char* pts[][2] = {{"1/2", "1/3"}, {"2", "1"}, {"-1/3", "3/2"}, {"5/7", "-2"}, {"3", "1/4"}};
  std::vector<GridPoint<Rational>> out;
  for (const auto& pt : pts) out.push_back({Rational::parse(pt[0]), Rational::parse(pt[1])});
  return out;
}

inline std::vector<Check> verification_checks(const ModelParams& params) {
  std::vector<Check> checks;
  const auto table = moment_table<Rational>(params);
  const auto joint = sieve_invert(table);

  checks.push_back({"oracle_equivalence", exhaustive_joint(params).pmf == joint.pmf});
  checks.push_back({"normalization", joint.total() == Rational(1)});
  checks.push_back({"marginal_consistency", joint.marginal(Side::Active) == marginal_pmf<Rational>(params, Side::Active) &&
                                                joint.marginal(Side::Passive) == marginal_pmf<Rational>(params, Side::Passive)});

  bool recombined = true;
  for (std::size_t k = 0; k < params.n; ++k)
    for (std::size_t l = 0; l < params.m; ++l) {
      const auto r = recombination_check<Rational>(params, k, l);
      recombined = recombined && r.lhs == r.rhs && r.rhs == table(k, l);
    }
  checks.push_back({"recombination", recombined});

  bool identity = true;
  for (const auto& pt : identity_points())
    identity = identity && eval_joint_pgf(params, pt.x, pt.y) == eval_via_moments(table, pt.x, pt.y);
  checks.push_back({"sieve_identity", identity});
  return checks;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  require_exact(cfg);
  const auto params = params_of(cfg, cfg.p);
  if (params.n * params.m > kMaxEnumerationCells)
    throw InfeasibleSizeError("verify enumerates 2^(n*m) graphs; n*m = " + std::to_string(params.n * params.m) +
                              " exceeds " + std::to_string(kMaxEnumerationCells));
  const auto checks = verification_checks(params);
  bool all = true;
  for (const auto& c : checks) all = all && c.passed;

  if (cfg.format == "json") {
    json arr = json::array();
    for (const auto& c : checks) arr.push_back({{"name", c.name}, {"status", c.passed ? "PASS" : "FAIL"}});
    out << json{{"params", params_json(params)}, {"mode", "exact"}, {"result", {{"passed", all}}}, {"checks", arr}}.dump(2)
        << '\n';
  } else {
    out << "check,status\n";
    for (const auto& c : checks) out << c.name << ',' << (c.passed ? "PASS" : "FAIL") << '\n';
  }
  return all ? kOk : kCheckFailed;
}

/// "start:stop:step", inclusive of stop when it lies on the grid.
inline std::vector<Rational> parse_p_grid(const std::string& text) {
  const auto first = text.find(':');
  const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
    throw UsageError("--p-grid must look like start:stop:step, got '" + text + "'");
  const Rational start = Rational::parse(text.substr(0, first));
  const Rational stop = Rational::parse(text.substr(first + 1, second - first - 1));
  const Rational step = Rational::parse(text.substr(second + 1));
  if (step.sign() <= 0) throw UsageError("--p-grid step must be positive");
  if (start > stop) throw UsageError("--p-grid start exceeds stop");
  (void)Probability(start);
  (void)Probability(stop);
  std::vector<Rational> grid;
  for (Rational p = start; p <= stop; p += step) grid.push_back(p);
  return grid;
}

template <ScalarField T>
json scan_row(const ModelParams& params, std::ostream* csv) {
  const auto s = moments<T>(params);
  const double p = params.p.to_double();
  if (csv != nullptr)
    *csv << format_decimal(p) << ',' << format_decimal(to_double(s.mean_x)) << ',' << format_decimal(to_double(s.mean_y))
         << ',' << format_decimal(to_double(s.cov)) << ',' << corr_text(s.corr) << '\n';
  return {{"p", p},
          {"mean_x", to_double(s.mean_x)},
          {"mean_y", to_double(s.mean_y)},
          {"cov", to_double(s.cov)},
          {"corr", corr_json(s.corr)}};
}

inline void cmd_scan(const RunConfig& cfg, std::ostream& out) {
  if (cfg.p_grid.empty()) throw UsageError("scan requires --p-grid start:stop:step");
  const auto grid = parse_p_grid(cfg.p_grid);
  const bool json_out = cfg.format == "json";
  if (!json_out) out << "p,mean_x,mean_y,cov,corr\n";
  json rows = json::array();
  for (const auto& p : grid) {
    const auto params = params_of(cfg, p.str());
    rows.push_back(cfg.mode == "exact" ? scan_row<Rational>(params, json_out ? nullptr : &out)
                                       : scan_row<double>(params, json_out ? nullptr : &out));
  }
  if (json_out)
    out << json{{"params", {{"n", cfg.n}, {"m", cfg.m}, {"p_grid", cfg.p_grid}}}, {"mode", cfg.mode}, {"result", rows}}.dump(2)
        << '\n';
}

}  // namespace detail

/// Parses argv, runs one subcommand, and returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact joint degree law of active/passive random intersection graphs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool with_p) {
    sub->add_option("--n", cfg.n, "number of vertices (>= 1)");
    sub->add_option("--m", cfg.m, "number of objects (>= 1)");
    if (with_p) sub->add_option("--p", cfg.p, "edge probability as a/b or a finite decimal");
    sub->add_option("--mode", cfg.mode, "arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", cfg.output, "write to this file instead of standard output");
  };

  auto* pmf = app.add_subcommand("pmf", "exact joint pmf of (X, Y) and both marginals");
  common(pmf, true);
  auto* mom = app.add_subcommand("moments", "means, variances, covariance and correlation of (X, Y)");
  common(mom, true);
  auto* pgf = app.add_subcommand("pgf", "evaluate F(x, y) and the marginal generating functions");
  common(pgf, true);
  pgf->add_option("--x", cfg.x, "first argument");
  pgf->add_option("--y", cfg.y, "second argument");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo tally of (X, Y) with goodness of fit");
  common(sim, true);
  sim->add_option("--trials", cfg.trials, "number of sampled graphs");
  sim->add_option("--seed", cfg.seed, "master seed");
  sim->add_option("--workers", cfg.workers, "worker threads (0 = hardware concurrency); output does not depend on it");
  auto* ver = app.add_subcommand("verify", "check the closed forms against exhaustive enumeration");
  common(ver, true);
  auto* scan = app.add_subcommand("scan", "moments across a grid of p");
  common(scan, false);
  scan->add_option("--p-grid", cfg.p_grid, "start:stop:step")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArgs;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  std::ostringstream buffer;
  int code = kOk;
  try {
    if (cfg.command == "pmf") detail::cmd_pmf(cfg, buffer);
    else if (cfg.command == "moments") detail::cmd_moments(cfg, buffer);
    else if (cfg.command == "pgf") detail::cmd_pgf(cfg, buffer);
    else if (cfg.command == "simulate") detail::cmd_simulate(cfg, buffer);
    else if (cfg.command == "verify") code = detail::cmd_verify(cfg, buffer);
    else if (cfg.command == "scan") detail::cmd_scan(cfg, buffer);
  } catch (const InfeasibleSizeError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const ResourceLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArgs;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidArgs;
  }

  if (cfg.output.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      err << "error: cannot open '" << cfg.output << "' for writing\n";
      return kInvalidArgs;
    }
    file << buffer.str();
  }
  return code;
}

}  // namespace ripgf::cli
