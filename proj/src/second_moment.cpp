#include "graphdep/second_moment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "graphdep/errors.hpp"
#include "graphdep/perm_graphs.hpp"

namespace graphdep {

namespace {

void partitions_into(int remaining, int max_part, std::vector<int>& current,
                     std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    current.push_back(part);
    partitions_into(remaining - part, part, current, out);
    current.pop_back();
  }
}

std::vector<std::vector<int>> integer_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  partitions_into(n, n, current, out);
  return out;
}

double cycle_type_multiplicity(int n, const std::vector<int>& type) {
  // n! / prod_k k^{m_k} m_k!
  double mult = std::tgamma(n + 1.0);
  int run_value = 0, run_len = 0;
  auto flush = [&]() {
    if (run_len == 0) return;
    mult /= std::pow(static_cast<double>(run_value), run_len);
    mult /= std::tgamma(run_len + 1.0);
  };
  for (int part : type) {
    if (part == run_value) {
      ++run_len;
    } else {
      flush();
      run_value = part;
      run_len = 1;
    }
  }
  flush();
  return mult;
}

Permutation representative_of_type(int n, const std::vector<int>& type) {
  std::vector<int> m(n);
  int base = 0;
  for (int len : type) {
    for (int i = 0; i < len; ++i) m[base + i] = base + (i + 1) % len;
    base += len;
  }
  return Permutation(std::move(m));
}

double orbit_product(const KernelSpectrum& spectrum,
                     const OrbitDecomposition& dec) {
  double prod = 1.0;
  for (const auto& [len, count] : dec.edge_orbit_counts)
    prod *= std::pow(spectrum.orbit_moment(len), count);
  return prod;
}

}  // namespace

SecondMomentReport second_moment_exact(const KernelSpectrum& spectrum, int n) {
  if (n < 2 || n > 8)
    throw capacity_error("second_moment_exact: n must lie in [2, 8]");
  SecondMomentReport report;
  report.n = n;
  double total = 0.0;
  for (const auto& type : integer_partitions(n)) {
    const double mult = cycle_type_multiplicity(n, type);
    const auto dec = edge_orbit_decomposition(representative_of_type(n, type));
    const double prod = orbit_product(spectrum, dec);
    total += mult * prod;
    report.per_cycle_type.push_back({type, mult, prod});
  }
  report.value_formula = total / std::tgamma(n + 1.0);
  return report;
}

double second_moment_exact_exhaustive(const KernelSpectrum& spectrum, int n) {
  if (n < 2 || n > 6)
    throw capacity_error("second_moment_exact_exhaustive: n must lie in [2, 6]");
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  double total = 0.0;
  long count = 0;
  do {
    const auto dec = edge_orbit_decomposition(Permutation(p));
    total += orbit_product(spectrum, dec);
    ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  return total / static_cast<double>(count);
}

double second_moment_oracle(const DistributionPair& pair, int n) {
  if (n < 2 || n > 4)
    throw capacity_error("second_moment_oracle: n must lie in [2, 4]");
  const int m = pair.alphabet_size();  // throws unless finite alphabet
  const int edges_n = edge_count(n);
  const double states = std::pow(static_cast<double>(m), 2 * edges_n);
  if (states > 1e8)
    throw capacity_error("second_moment_oracle: state space exceeds 1e8 terms");

  const auto& joint = pair.joint_table();
  const auto& q = pair.marginal_masses();
  // ratio(x, y) = P(x,y) / (q_x q_y)
  Eigen::MatrixXd ratio(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      ratio(x, y) = q[x] * q[y] > 0.0 ? joint(x, y) / (q[x] * q[y]) : 0.0;

  const auto edges = edge_list(n);
  std::vector<std::vector<int>> perms;
  {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
  }
  // Per permutation, the B-edge index each A-edge maps to.
  std::vector<std::vector<int>> perm_edges(perms.size(),
                                           std::vector<int>(edges_n));
  for (std::size_t pi = 0; pi < perms.size(); ++pi)
    for (int e = 0; e < edges_n; ++e)
      perm_edges[pi][e] =
          edge_index(n, perms[pi][edges[e].first], perms[pi][edges[e].second]);

  const long total_states = static_cast<long>(std::llround(states));
  std::vector<int> digits(2 * edges_n, 0);  // first A edges, then B edges
  double acc = 0.0, comp = 0.0;  // Kahan accumulation
  for (long s = 0; s < total_states; ++s) {
    double prob = 1.0;
    for (int d = 0; d < 2 * edges_n; ++d) prob *= q[digits[d]];
    if (prob > 0.0) {
      double lr_sum = 0.0;
      for (const auto& pe : perm_edges) {
        double prod = 1.0;
        for (int e = 0; e < edges_n; ++e)
          prod *= ratio(digits[e], digits[edges_n + pe[e]]);
        lr_sum += prod;
      }
      const double lr = lr_sum / static_cast<double>(perms.size());
      const double term = prob * lr * lr - comp;
      const double next = acc + term;
      comp = (next - acc) - term;
      acc = next;
    }
    // odometer
    for (int d = 0; d < 2 * edges_n; ++d) {
      if (++digits[d] < m) break;
      digits[d] = 0;
    }
  }
  return acc;
}

TruncationReport truncation_level(const ExponentProfile& profile, int n, int k,
                                  double alpha) {
  if (n < 3) throw parameter_error("truncation_level: n must be >= 3");
  if (k < 2 || k > n)
    throw parameter_error("truncation_level: k must lie in [2, n]");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw parameter_error("truncation_level: alpha must lie in (0,1)");
  const double e = std::exp(1.0);
  TruncationReport rep;
  rep.level_k = 2.0 * std::log(2.0 * e * n / k) / (k - 1.0);
  rep.zeta_k = 0.5 * k * (k - 1.0) *
               profile.inverse_exponent(WhichExponent::P, rep.level_k);
  rep.level_bar = 2.0 * std::log(2.0 * alpha * e) / (alpha * n - 1.0);
  if (rep.level_bar < 0.0)
    throw parameter_error(
        "truncation_level: alpha below 1/(2e) makes the level negative");
  rep.zeta_bar = profile.inverse_exponent(WhichExponent::P, rep.level_bar);

  rep.condition5.lhs = rep.zeta_bar;
  rep.condition5.rhs = (2.0 * std::log(static_cast<double>(n)) - 4.0) / n;
  rep.condition5.holds = rep.condition5.lhs <= rep.condition5.rhs;

  const double lambda_star = 1.0 / std::sqrt(std::log(static_cast<double>(n)));
  rep.first_order = profile.kl_pq() +
                    2.0 * std::log(2.0 * alpha * e) /
                        (lambda_star * (alpha * n - 1.0));
  rep.second_order_correction = lambda_star * profile.var_llr_p();
  return rep;
}

}  // namespace graphdep
