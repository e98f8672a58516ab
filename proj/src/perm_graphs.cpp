#include "graphdep/perm_graphs.hpp"

#include <algorithm>
#include <numeric>

#include "graphdep/errors.hpp"

namespace graphdep {

namespace {
constexpr int kMaxNodes = 1 << 14;  // dense n^2 storage cap
}

Permutation::Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
  const int n = static_cast<int>(map_.size());
  std::vector<bool> seen(n, false);
  for (int v : map_) {
    if (v < 0 || v >= n || seen[v])
      throw parameter_error("permutation: mapping is not a bijection on [n]");
    seen[v] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(n);
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Permutation Permutation::uniform(int n, RngStream& rng) {
  std::vector<int> m(n);
  std::iota(m.begin(), m.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(m[i], m[j]);
  }
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (int i = 0; i < size(); ++i) inv[map_[i]] = i;
  return Permutation(std::move(inv));
}

Permutation compose_inverse(const Permutation& pi, const Permutation& pi_prime) {
  if (pi.size() != pi_prime.size())
    throw parameter_error("compose_inverse: size mismatch");
  const Permutation inv = pi.inverse();
  std::vector<int> m(pi.size());
  for (int i = 0; i < pi.size(); ++i) m[i] = inv(pi_prime(i));
  return Permutation(std::move(m));
}

std::vector<Edge> edge_list(int n) {
  std::vector<Edge> edges;
  edges.reserve(edge_count(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return edges;
}

int edge_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

OrbitDecomposition edge_orbit_decomposition(const Permutation& p) {
  const int n = p.size();
  OrbitDecomposition dec;

  std::vector<bool> node_seen(n, false);
  for (int start = 0; start < n; ++start) {
    if (node_seen[start]) continue;
    std::vector<int> orbit;
    int cur = start;
    do {
      node_seen[cur] = true;
      orbit.push_back(cur);
      cur = p(cur);
    } while (cur != start);
    if (orbit.size() == 1) dec.fixed_points.push_back(orbit[0]);
    dec.node_orbit_counts[static_cast<int>(orbit.size())] += 1;
    dec.node_orbits.push_back(std::move(orbit));
  }

  const auto edges = edge_list(n);
  std::vector<bool> edge_seen(edges.size(), false);
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (edge_seen[start]) continue;
    std::vector<Edge> orbit;
    Edge cur = edges[start];
    do {
      edge_seen[edge_index(n, cur.first, cur.second)] = true;
      orbit.push_back(cur);
      int u = p(cur.first), v = p(cur.second);
      if (u > v) std::swap(u, v);
      cur = {u, v};
    } while (cur != edges[start]);
    dec.edge_orbit_counts[static_cast<int>(orbit.size())] += 1;
    dec.edge_orbits.push_back(std::move(orbit));
  }
  return dec;
}

namespace {

GraphPair planted_with(const DistributionPair& pair, int n, Permutation pi,
                       RngStream& rng) {
  GraphPair g;
  g.n = n;
  g.a = Eigen::MatrixXd::Zero(n, n);
  g.b = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto [a, b] = pair.sample(Hypothesis::Planted, rng);
      g.a(i, j) = g.a(j, i) = a;
      const int u = pi(i), v = pi(j);
      g.b(u, v) = g.b(v, u) = b;
    }
  }
  g.latent_pi = std::move(pi);
  return g;
}

}  // namespace

GraphPair sample_graph_pair(const DistributionPair& pair, int n, Hypothesis h,
                            RngStream& rng) {
  if (n < 2) throw parameter_error("sample_graph_pair: n must be >= 2");
  if (n > kMaxNodes) throw capacity_error("sample_graph_pair: n exceeds dense cap");
  if (h == Hypothesis::Planted)
    return planted_with(pair, n, Permutation::uniform(n, rng), rng);
  GraphPair g;
  g.n = n;
  g.a = Eigen::MatrixXd::Zero(n, n);
  g.b = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      g.a(i, j) = g.a(j, i) = pair.sample_marginal(rng);
      g.b(i, j) = g.b(j, i) = pair.sample_marginal(rng);
    }
  }
  return g;
}

GraphPair sample_graph_pair_pinned(const DistributionPair& pair, int n,
                                   const Permutation& pi, RngStream& rng) {
  if (n < 2) throw parameter_error("sample_graph_pair_pinned: n must be >= 2");
  if (pi.size() != n)
    throw parameter_error("sample_graph_pair_pinned: permutation size mismatch");
  return planted_with(pair, n, pi, rng);
}

}  // namespace graphdep
