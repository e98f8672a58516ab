#include "graphdep/detectors.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "graphdep/errors.hpp"

namespace graphdep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// llr table over (edge of A) x (edge of B) weight values.
std::vector<double> llr_table(const DistributionPair& pair, const GraphPair& g,
                              const std::vector<Edge>& edges) {
  const std::size_t m = edges.size();
  std::vector<double> table(m * m);
  for (std::size_t e = 0; e < m; ++e) {
    const double a = g.a(edges[e].first, edges[e].second);
    for (std::size_t f = 0; f < m; ++f) {
      const double b = g.b(edges[f].first, edges[f].second);
      table[e * m + f] = pair.llr(a, b);
    }
  }
  return table;
}

double perm_llr_sum(const std::vector<double>& table, std::size_t m,
                    const std::vector<Edge>& edges, const std::vector<int>& p,
                    int n) {
  double s = 0.0;
  for (std::size_t e = 0; e < m; ++e) {
    const int f = edge_index(n, p[edges[e].first], p[edges[e].second]);
    s += table[e * m + f];
  }
  return s;
}

void check_capacity(int n, int cap) {
  if (n > cap)
    throw capacity_error(
        "exhaustive permutation scan beyond the cap (n=" + std::to_string(n) +
        ", cap=" + std::to_string(cap) + "); use the GLRT local search or the "
        "comparison test");
}

}  // namespace

TestOutcome exact_lr_test(const DistributionPair& pair, const GraphPair& g,
                          double threshold, int cap) {
  check_capacity(g.n, cap);
  const int n = g.n;
  const auto edges = edge_list(n);
  const std::size_t m = edges.size();
  const auto table = llr_table(pair, g, edges);

  // Online max-shifted log-sum-exp over all n! conditional LLR sums.
  double max_term = -kInf;
  double scaled_sum = 0.0;
  long scanned = 0;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    const double s = perm_llr_sum(table, m, edges, p, n);
    ++scanned;
    if (s == -kInf) continue;
    if (s <= max_term) {
      scaled_sum += std::exp(s - max_term);
    } else {
      scaled_sum = scaled_sum * std::exp(max_term - s) + 1.0;
      max_term = s;
    }
  } while (std::next_permutation(p.begin(), p.end()));

  TestOutcome out;
  out.permutations_scanned = scanned;
  out.threshold_used = threshold;
  out.statistic = max_term == -kInf
                      ? -kInf
                      : max_term + std::log(scaled_sum) - log_factorial(n);
  out.decision = out.statistic >= threshold ? 1 : 0;
  return out;
}

TestOutcome glrt(const DistributionPair& pair, const GraphPair& g, double tau,
                 int cap) {
  check_capacity(g.n, cap);
  const int n = g.n;
  const auto edges = edge_list(n);
  const std::size_t m = edges.size();
  const auto table = llr_table(pair, g, edges);

  double best = -kInf;
  long scanned = 0;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    best = std::max(best, perm_llr_sum(table, m, edges, p, n));
    ++scanned;
  } while (std::next_permutation(p.begin(), p.end()));

  TestOutcome out;
  out.permutations_scanned = scanned;
  out.threshold_used = tau;
  out.statistic = best / static_cast<double>(m);
  out.decision = out.statistic >= tau ? 1 : 0;
  return out;
}

TestOutcome glrt_local_search(const DistributionPair& pair, const GraphPair& g,
                              double tau, int restarts, RngStream& rng) {
  if (restarts < 1) throw parameter_error("glrt_local_search: restarts >= 1");
  const int n = g.n;
  const auto edges = edge_list(n);
  const std::size_t m = edges.size();
  const auto table = llr_table(pair, g, edges);

  double best = -kInf;
  long scanned = 0;
  for (int r = 0; r < restarts; ++r) {
    std::vector<int> p = Permutation::uniform(n, rng).mapping();
    double cur = perm_llr_sum(table, m, edges, p, n);
    ++scanned;
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < n && !improved; ++i) {
        for (int j = i + 1; j < n; ++j) {
          std::swap(p[i], p[j]);
          const double cand = perm_llr_sum(table, m, edges, p, n);
          ++scanned;
          if (cand > cur) {
            cur = cand;
            improved = true;
            break;
          }
          std::swap(p[i], p[j]);
        }
      }
    }
    best = std::max(best, cur);
  }

  TestOutcome out;
  out.permutations_scanned = scanned;
  out.threshold_used = tau;
  out.statistic = best / static_cast<double>(m);
  out.decision = out.statistic >= tau ? 1 : 0;
  return out;
}

GlrtThresholdReport glrt_threshold(const ExponentProfile& profile, int n,
                                   GlrtThresholdRule rule, double d2_constant,
                                   double custom_tau) {
  if (n < 3) throw parameter_error("glrt_threshold: n must be >= 3");
  GlrtThresholdReport rep;
  switch (rule) {
    case GlrtThresholdRule::Zero:
      rep.tau = 0.0;
      break;
    case GlrtThresholdRule::D2Rule: {
      if (!(d2_constant > 1.0))
        throw parameter_error("glrt_threshold: D2 rule needs a constant C > 1");
      rep.tau = 2.0 * std::sqrt(d2_constant * profile.kl_pq() * profile.kl_qp()) -
                profile.kl_qp();
      break;
    }
    case GlrtThresholdRule::Custom:
      rep.tau = custom_tau;
      break;
  }
  rep.in_guarantee_range =
      rep.tau > -profile.kl_qp() && rep.tau < profile.kl_pq();

  const double nn = static_cast<double>(n);
  rep.type1_condition.lhs = profile.exponent(WhichExponent::Q, rep.tau).value;
  rep.type1_condition.rhs = 2.0 * std::log(nn / std::exp(1.0)) / (nn - 1.0) +
                            2.0 * (1.0 + std::log(nn)) / (nn * (nn - 1.0));
  rep.type1_condition.holds = rep.type1_condition.lhs >= rep.type1_condition.rhs;

  rep.type2_condition.lhs = profile.exponent(WhichExponent::P, rep.tau).value;
  rep.type2_condition.rhs = 1.0 / (nn * nn);
  rep.type2_condition.holds = rep.type2_condition.lhs >= rep.type2_condition.rhs;

  rep.premises_hold = rep.in_guarantee_range && rep.type1_condition.holds &&
                      rep.type2_condition.holds;

  rep.chernoff_information = profile.chernoff_information();
  const double h2 = divergence(profile.pair(), DivergenceKind::Hellinger2);
  rep.hellinger_lower_bound = -std::log1p(-0.5 * h2);
  return rep;
}

TestOutcome comparison_test(const DistributionPair& pair, const GraphPair& g,
                            double theta) {
  if (theta < 0.0) throw parameter_error("comparison_test: theta must be >= 0");
  const double rho = pair.corr();  // unsupported_moment_error propagates
  if (rho == 0.0)
    throw support_error("comparison_test: corr(P,Q) must be nonzero");
  double t = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j) t += g.a(i, j) - g.b(i, j);

  TestOutcome out;
  out.permutations_scanned = 0;
  out.threshold_used = theta;
  out.statistic = t;
  out.decision = rho > 0.0 ? (std::abs(t) <= theta ? 1 : 0)
                           : (std::abs(t) >= theta ? 1 : 0);
  return out;
}

double comparison_threshold(const DistributionPair& pair, int n, double level) {
  if (!(level > 0.0) || level > 1.0)
    throw parameter_error("comparison_threshold: level must lie in (0,1]");
  const double rho = std::abs(pair.corr());
  const double var = pair.null_marginal_variance();
  if (!std::isfinite(var) || !(var > 0.0))
    throw unsupported_moment_error("comparison_threshold: Var_Q(A) unavailable");
  boost::math::normal_distribution<double> nd(0.0, 1.0);
  const double z = boost::math::quantile(nd, 1.0 - level / 2.0);
  return z * std::sqrt(n * (n - 1.0) * var * (1.0 - rho));
}

}  // namespace graphdep
