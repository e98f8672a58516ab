#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "graphdep/dist_pairs.hpp"
#include "graphdep/rng.hpp"

namespace graphdep {

/// A permutation of {0, ..., n-1}.
class Permutation {
 public:
  explicit Permutation(std::vector<int> mapping);
  static Permutation identity(int n);
  /// Fisher-Yates with rejection-sampled indices (no modulo bias).
  static Permutation uniform(int n, RngStream& rng);

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int i) const { return map_[i]; }
  const std::vector<int>& mapping() const { return map_; }
  Permutation inverse() const;
  bool operator==(const Permutation& other) const { return map_ == other.map_; }

 private:
  std::vector<int> map_;
};

/// sigma = pi^{-1} o pi'.
Permutation compose_inverse(const Permutation& pi, const Permutation& pi_prime);

using Edge = std::pair<int, int>;  // i < j

/// Cycle structure of a node permutation and of the edge permutation it
/// induces on unordered pairs.
struct OrbitDecomposition {
  std::vector<std::vector<int>> node_orbits;
  std::vector<std::vector<Edge>> edge_orbits;
  std::map<int, int> node_orbit_counts;  // n_k: k-node orbits
  std::map<int, int> edge_orbit_counts;  // N_k: k-edge orbits
  std::vector<int> fixed_points;
};

OrbitDecomposition edge_orbit_decomposition(const Permutation& p);

/// Upper-triangle edge enumeration shared by detectors and generators.
std::vector<Edge> edge_list(int n);
int edge_index(int n, int i, int j);
inline int edge_count(int n) { return n * (n - 1) / 2; }

/// Two symmetric weighted adjacency matrices; latent_pi recorded iff planted.
struct GraphPair {
  int n = 0;
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  std::optional<Permutation> latent_pi;
};

/// Null: all entries i.i.d. marginal draws. Planted: pi ~ Unif(S_n), then
/// (A_ij, B_{pi_i pi_j}) i.i.d. joint draws over i < j.
GraphPair sample_graph_pair(const DistributionPair& pair, int n, Hypothesis h,
                            RngStream& rng);

/// Test hook: planted sampling with a pinned (non-uniform) permutation.
/// Not part of the model; excluded from risk-estimation paths.
GraphPair sample_graph_pair_pinned(const DistributionPair& pair, int n,
                                   const Permutation& pi, RngStream& rng);

}  // namespace graphdep
