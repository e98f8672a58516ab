#include "graphdep/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "graphdep/detectors.hpp"
#include "graphdep/dist_pairs.hpp"
#include "graphdep/errors.hpp"
#include "graphdep/harness.hpp"
#include "graphdep/info_metrics.hpp"
#include "graphdep/kernel_spectrum.hpp"
#include "graphdep/low_degree.hpp"
#include "graphdep/second_moment.hpp"

namespace graphdep {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void cmd_info(const std::string& pair_text, std::ostream& out) {
  const DistributionPair pair = DistributionPair::parse(pair_text);
  const ExponentProfile profile(pair);
  out << "kl_pq=" << fmt(profile.kl_pq()) << "\n";
  out << "kl_qp=" << fmt(profile.kl_qp()) << "\n";
  out << "chi2=" << fmt(divergence(pair, DivergenceKind::Chi2)) << "\n";
  out << "hellinger2=" << fmt(divergence(pair, DivergenceKind::Hellinger2))
      << "\n";
  out << "var_llr_p=" << fmt(profile.var_llr_p()) << "\n";
  out << "chernoff_info=" << fmt(profile.chernoff_information()) << "\n";
  double corr = std::numeric_limits<double>::quiet_NaN();
  try {
    corr = pair.corr();
  } catch (const unsupported_moment_error&) {
  }
  out << "corr=" << fmt(corr) << "\n";
}

void cmd_spectrum(const std::string& pair_text, int grid, std::ostream& out) {
  const DistributionPair pair = DistributionPair::parse(pair_text);
  const KernelSpectrum spec = pair.support() == Support::FiniteAlphabet
                                  ? build_spectrum(pair)
                                  : build_spectrum_discretized(pair, grid);
  for (int i = 0; i < spec.alphabet_size; ++i)
    out << (i ? " " : "") << fmt(spec.eigenvalues[i]);
  out << "\n";
  out << "chi2_from_spectrum=" << fmt(spec.chi2_from_spectrum()) << "\n";
}

void cmd_generate(const std::string& pair_text, int n,
                  const std::string& hypothesis, std::uint64_t seed,
                  const std::string& out_path, bool emit_pi, std::ostream& out) {
  const DistributionPair pair = DistributionPair::parse(pair_text);
  const Hypothesis h = hypothesis_from_string(hypothesis);
  RngStream rng = RngStream::substream(seed, 0, 0, h == Hypothesis::Null ? 0 : 1);
  const GraphPair g = sample_graph_pair(pair, n, h, rng);
  if (emit_pi && h == Hypothesis::Null)
    throw parameter_error("generate: --emit-pi requires the planted hypothesis");
  if (out_path.empty()) {
    write_graph_pair(out, g, h, seed, emit_pi);
  } else {
    std::ofstream file(out_path);
    if (!file) throw parameter_error("generate: cannot open " + out_path);
    write_graph_pair(file, g, h, seed, emit_pi);
    out << "wrote " << out_path << "\n";
  }
}

void cmd_detect(const std::string& pair_text, const std::string& test,
                const std::string& threshold, const std::string& in_path,
                int cap, double level, std::ostream& out) {
  const DistributionPair pair = DistributionPair::parse(pair_text);
  std::ifstream in(in_path);
  if (!in) throw parameter_error("detect: cannot open " + in_path);
  const GraphPairFile file = read_graph_pair(in);
  const TestKind kind = test_kind_from_string(test);
  const double thr =
      resolve_threshold(pair, file.graph.n, kind, threshold, level);
  TestOutcome outcome;
  switch (kind) {
    case TestKind::ExactLr:
      outcome = exact_lr_test(pair, file.graph, thr, cap);
      break;
    case TestKind::Glrt:
      outcome = glrt(pair, file.graph, thr, cap);
      break;
    case TestKind::Comparison:
      outcome = comparison_test(pair, file.graph, thr);
      break;
  }
  out << "decision=" << outcome.decision << " statistic="
      << fmt(outcome.statistic) << " threshold=" << fmt(outcome.threshold_used)
      << "\n";
}

void cmd_risk(const ExperimentConfig& cfg, std::ostream& out) {
  const DistributionPair pair = DistributionPair::parse(cfg.pair_text);
  const int n = cfg.n_values.front();
  const double thr = resolve_threshold(pair, n, cfg.test, cfg.threshold_rule,
                                       cfg.comparison_level);
  const RiskEstimate est = estimate_risk(pair, n, cfg.test, thr, cfg.trials,
                                         cfg.seed, 0, cfg.workers, cfg.lr_cap);
  out << "n=" << n << " test=" << to_string(cfg.test)
      << " threshold=" << fmt(thr) << " trials=" << est.trials
      << " type1=" << fmt(est.type1_hat) << " type2=" << fmt(est.type2_hat)
      << " risk=" << fmt(est.risk_hat) << " hw95=" << fmt(est.half_width_95)
      << " seed=" << cfg.seed << "\n";
}

void cmd_sweep(const ExperimentConfig& cfg, std::ostream& out) {
  const auto rows = sweep(cfg);
  const auto emit = [&](std::ostream& sink) {
    if (cfg.format == "json")
      write_sweep_json(sink, cfg, rows);
    else
      write_sweep_csv(sink, cfg, rows);
  };
  if (cfg.output_path.empty()) {
    emit(out);
  } else {
    std::ofstream file(cfg.output_path);
    if (!file) throw parameter_error("sweep: cannot open " + cfg.output_path);
    emit(file);
    out << "wrote " << cfg.output_path << "\n";
  }
}

void cmd_second_moment(const std::string& pair_text, int n, int grid,
                       bool with_oracle, std::ostream& out) {
  const DistributionPair pair = DistributionPair::parse(pair_text);
  const TabularSurrogate surrogate = to_tabular(pair, grid);
  const KernelSpectrum spec = build_spectrum(surrogate.pair);
  SecondMomentReport report = second_moment_exact(spec, n);
  if (with_oracle) report.value_oracle = second_moment_oracle(surrogate.pair, n);
  out << "n=" << report.n << " formula=" << fmt(report.value_formula)
      << " oracle="
      << (report.value_oracle ? fmt(*report.value_oracle) : "none") << "\n";
  for (const auto& c : report.per_cycle_type) {
    out << "cycle_type=";
    for (std::size_t i = 0; i < c.cycle_type.size(); ++i)
      out << (i ? "+" : "") << c.cycle_type[i];
    out << " multiplicity=" << fmt(c.multiplicity)
        << " contribution=" << fmt(c.orbit_product) << "\n";
  }
}

void cmd_ldp(const std::string& pair_text, int degree, int exact_n,
             std::ostream& out) {
  const DistributionPair pair = DistributionPair::parse(pair_text);
  const double bound = theorem4_bound(pair.corr(), degree);
  out << "bound=" << fmt(bound) << "\n";
  if (exact_n > 0) {
    const double exact = exact_ldp_norm(pair, exact_n, degree);
    out << "exact=" << fmt(exact) << "\n";
  }
}

ExperimentConfig config_from_options(const std::string& config_path,
                                     const std::string& pair_text, int n,
                                     const std::string& test,
                                     const std::string& threshold, int trials,
                                     std::uint64_t seed, int workers) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = parse_config_file(config_path);
  if (!pair_text.empty()) cfg.pair_text = pair_text;
  if (n > 0) cfg.n_values = {n};
  if (!test.empty()) cfg.test = test_kind_from_string(test);
  if (!threshold.empty()) cfg.threshold_rule = threshold;
  if (trials > 0) cfg.trials = trials;
  if (seed != UINT64_MAX) cfg.seed = seed;
  if (workers > 0) cfg.workers = workers;
  cfg.validate();
  return cfg;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"graphdep: dependency testing between weighted random graphs"};
  app.require_subcommand(1);

  std::string pair_text, config_path, test, threshold;
  std::string hypothesis = "null", in_path, out_path, format;
  std::uint64_t seed = UINT64_MAX;
  int n = 0, grid = 64, cap = kDefaultExhaustiveCap, trials = 0, workers = 0;
  int degree = 1, exact_n = 0;
  double level = 0.05;
  bool emit_pi = false, with_oracle = false;

  auto* info = app.add_subcommand("info", "divergence and exponent table");
  info->add_option("--pair", pair_text)->required();

  auto* spectrum = app.add_subcommand("spectrum", "kernel eigenvalues");
  spectrum->add_option("--pair", pair_text)->required();
  spectrum->add_option("--grid", grid);

  auto* generate = app.add_subcommand("generate", "sample a graph pair");
  generate->add_option("--pair", pair_text)->required();
  generate->add_option("--n", n)->required();
  generate->add_option("--hypothesis", hypothesis);
  generate->add_option("--seed", seed);
  generate->add_option("--out", out_path);
  generate->add_flag("--emit-pi", emit_pi);

  auto* detect = app.add_subcommand("detect", "run a test on a graph file");
  detect->add_option("--pair", pair_text)->required();
  detect->add_option("--test", test);
  detect->add_option("--threshold", threshold);
  detect->add_option("--in", in_path)->required();
  detect->add_option("--cap", cap);
  detect->add_option("--level", level);

  auto* risk = app.add_subcommand("risk", "Monte Carlo risk of one cell");
  risk->add_option("--config", config_path);
  risk->add_option("--pair", pair_text);
  risk->add_option("--n", n);
  risk->add_option("--test", test);
  risk->add_option("--threshold", threshold);
  risk->add_option("--trials", trials);
  risk->add_option("--seed", seed);
  risk->add_option("--workers", workers);

  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep to CSV/JSON");
  sweep_cmd->add_option("--config", config_path)->required();
  sweep_cmd->add_option("--workers", workers);
  sweep_cmd->add_option("--out", out_path);
  sweep_cmd->add_option("--format", format);

  auto* second = app.add_subcommand("second-moment", "null second moment");
  second->add_option("--pair", pair_text)->required();
  second->add_option("--n", n)->required();
  second->add_option("--grid", grid);
  second->add_flag("--oracle", with_oracle);

  auto* ldp = app.add_subcommand("ldp", "low-degree norm bound");
  ldp->add_option("--pair", pair_text)->required();
  ldp->add_option("--D", degree)->required();
  ldp->add_option("--exact-n", exact_n);

  std::vector<const char*> argv;
  argv.push_back("graphdep");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return e.get_exit_code();
  }

  try {
    if (info->parsed()) {
      cmd_info(pair_text, out);
    } else if (spectrum->parsed()) {
      cmd_spectrum(pair_text, grid, out);
    } else if (generate->parsed()) {
      cmd_generate(pair_text, n, hypothesis,
                   seed == UINT64_MAX ? 1 : seed, out_path, emit_pi, out);
    } else if (detect->parsed()) {
      cmd_detect(pair_text, test.empty() ? "lr" : test,
                 threshold.empty() ? "0" : threshold, in_path, cap, level, out);
    } else if (risk->parsed()) {
      cmd_risk(config_from_options(config_path, pair_text, n, test, threshold,
                                   trials, seed, workers),
               out);
    } else if (sweep_cmd->parsed()) {
      ExperimentConfig cfg = parse_config_file(config_path);
      if (workers > 0) cfg.workers = workers;
      if (!out_path.empty()) cfg.output_path = out_path;
      if (!format.empty()) cfg.format = format;
      cfg.validate();
      cmd_sweep(cfg, out);
    } else if (second->parsed()) {
      cmd_second_moment(pair_text, n, grid, with_oracle, out);
    } else if (ldp->parsed()) {
      cmd_ldp(pair_text, degree, exact_n, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace graphdep
