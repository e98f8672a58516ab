#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphdep/detectors.hpp"
#include "graphdep/dist_pairs.hpp"
#include "graphdep/perm_graphs.hpp"

namespace graphdep {

enum class TestKind { ExactLr, Glrt, Comparison };

std::string to_string(TestKind t);
TestKind test_kind_from_string(std::string_view s);

/// One experiment: a pair spec, node counts, a test with its threshold
/// rule, a trial budget, and an optional one-parameter sweep.
struct ExperimentConfig {
  std::string pair_text = "gaussian rho=0.5";
  std::vector<int> n_values = {6};
  TestKind test = TestKind::ExactLr;
  std::string threshold_rule = "0";  // a number, or "auto"
  int trials = 200;
  std::uint64_t seed = 1;
  std::string sweep_param;  // empty: no sweep axis
  std::vector<double> sweep_values;
  std::string output_path;  // empty: stdout
  std::string format = "csv";
  int workers = 1;
  int lr_cap = kDefaultExhaustiveCap;
  double comparison_level = 0.05;

  void validate() const;
};

/// Plain "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config_stream(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

/// The fully-resolved config as "# key = value" comment lines.
std::string resolved_config_header(const ExperimentConfig& cfg);

struct RiskEstimate {
  double type1_hat = 0.0;
  double type2_hat = 0.0;
  double risk_hat = 0.0;
  int trials = 0;
  double half_width_95 = 0.0;  // Wilson intervals per error type, summed
};

/// 95% Wilson score half-width for `successes` out of `trials`.
double wilson_half_width(long successes, long trials);

/// Runs `trials` null and `trials` planted generations with substreams
/// keyed by (seed, cell_index, trial, role); applies the test and returns
/// the error frequencies. Trials may run on several workers; the result is
/// invariant to the worker count.
RiskEstimate estimate_risk(const DistributionPair& pair, int n, TestKind test,
                           double threshold, int trials, std::uint64_t seed,
                           std::uint64_t cell_index, int workers = 1,
                           int lr_cap = kDefaultExhaustiveCap);

/// Exact LR is Bayes-optimal; flags a statistically significant reversal of
/// risk(exact LR) <= risk(GLRT).
bool risk_ordering_flagged(const RiskEstimate& exact_lr, const RiskEstimate& glrt);

struct SweepRow {
  double axis_value = 0.0;
  int n = 0;
  std::string test;
  double threshold = 0.0;
  RiskEstimate risk;
  double chi2 = 0.0;
  double kl_pq = 0.0;
  double corr = 0.0;
  std::string thm1_verdict;
  std::string thm2_verdict;
  std::string error;  // nonempty when the cell failed; other fields are nan
};

/// Grid of (axis value x n) cells in deterministic order with info-metric
/// annotations; per-cell failures are recorded in the row and the sweep
/// continues.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg);

/// Fixed column order: axis,n,test,threshold,trials,type1,type2,risk,hw95,
/// chi2,kl_pq,corr,thm1_verdict,thm2_verdict. The resolved config is
/// emitted first as comment lines.
void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const std::vector<SweepRow>& rows);
void write_sweep_json(std::ostream& out, const ExperimentConfig& cfg,
                      const std::vector<SweepRow>& rows);

/// Resolves the configured threshold rule for one cell.
double resolve_threshold(const DistributionPair& pair, int n, TestKind test,
                         const std::string& rule, double comparison_level);

// GraphPair file format: header "n=<n> hypothesis=<h> seed=<s>", then the
// upper-triangular weights of A and of B, then optionally "pi= ..." with the
// planted node map.
struct GraphPairFile {
  GraphPair graph;
  Hypothesis hypothesis = Hypothesis::Null;
  std::uint64_t seed = 0;
};

void write_graph_pair(std::ostream& out, const GraphPair& g, Hypothesis h,
                      std::uint64_t seed, bool emit_pi);
GraphPairFile read_graph_pair(std::istream& in);

}  // namespace graphdep
