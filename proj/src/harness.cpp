#include "graphdep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "graphdep/errors.hpp"
#include "graphdep/info_metrics.hpp"

namespace graphdep {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ95 = 1.959963984540054;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

}  // namespace

std::string to_string(TestKind t) {
  switch (t) {
    case TestKind::ExactLr: return "lr";
    case TestKind::Glrt: return "glrt";
    case TestKind::Comparison: return "comp";
  }
  throw error("to_string(TestKind): unreachable");
}

TestKind test_kind_from_string(std::string_view s) {
  if (s == "lr") return TestKind::ExactLr;
  if (s == "glrt") return TestKind::Glrt;
  if (s == "comp") return TestKind::Comparison;
  throw parameter_error("test must be one of lr, glrt, comp");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw parameter_error("config: trials must be >= 1");
  if (n_values.empty()) throw parameter_error("config: n grid is empty");
  if (!sweep_param.empty() && sweep_values.empty())
    throw parameter_error("config: sweep axis named but grid is empty");
  if (workers < 1) throw parameter_error("config: workers must be >= 1");
  if (format != "csv" && format != "json")
    throw parameter_error("config: format must be csv or json");
  DistributionPair::parse(pair_text);  // fail fast on a bad pair spec
}

ExperimentConfig parse_config_stream(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw parameter_error("config: expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "pair") {
      cfg.pair_text = value;
    } else if (key == "n") {
      cfg.n_values.clear();
      for (const auto& tok : split(value, ','))
        cfg.n_values.push_back(std::stoi(tok));
    } else if (key == "test") {
      cfg.test = test_kind_from_string(value);
    } else if (key == "threshold") {
      cfg.threshold_rule = value;
    } else if (key == "trials") {
      cfg.trials = std::stoi(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "sweep") {
      // "param: v1,v2,..."
      const auto colon = value.find(':');
      if (colon == std::string::npos)
        throw parameter_error("config: sweep must read 'param: v1,v2,...'");
      cfg.sweep_param = trim(value.substr(0, colon));
      cfg.sweep_values.clear();
      for (const auto& tok : split(value.substr(colon + 1), ','))
        cfg.sweep_values.push_back(std::stod(tok));
    } else if (key == "output") {
      cfg.output_path = value;
    } else if (key == "format") {
      cfg.format = value;
    } else if (key == "workers") {
      cfg.workers = std::stoi(value);
    } else if (key == "level") {
      cfg.comparison_level = std::stod(value);
    } else if (key == "lr_cap") {
      cfg.lr_cap = std::stoi(value);
    } else {
      throw parameter_error("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("config: cannot open " + path);
  return parse_config_stream(in);
}

std::string resolved_config_header(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# pair = " << cfg.pair_text << "\n";
  out << "# n =";
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i)
    out << (i ? "," : " ") << cfg.n_values[i];
  out << "\n";
  out << "# test = " << to_string(cfg.test) << "\n";
  out << "# threshold = " << cfg.threshold_rule << "\n";
  out << "# trials = " << cfg.trials << "\n";
  out << "# seed = " << cfg.seed << "\n";
  if (!cfg.sweep_param.empty()) {
    out << "# sweep = " << cfg.sweep_param << ":";
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i)
      out << (i ? "," : " ") << fmt(cfg.sweep_values[i]);
    out << "\n";
  }
  out << "# format = " << cfg.format << "\n";
  out << "# workers = " << cfg.workers << "\n";
  if (cfg.test == TestKind::Comparison)
    out << "# level = " << fmt(cfg.comparison_level) << "\n";
  if (cfg.test != TestKind::Comparison)
    out << "# lr_cap = " << cfg.lr_cap << "\n";
  return out.str();
}

double wilson_half_width(long successes, long trials) {
  if (trials < 1) throw parameter_error("wilson_half_width: trials >= 1");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  return kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) /
         (1.0 + z2 / n);
}

namespace {

int apply_test(const DistributionPair& pair, const GraphPair& g, TestKind test,
               double threshold, int lr_cap) {
  switch (test) {
    case TestKind::ExactLr:
      return exact_lr_test(pair, g, threshold, lr_cap).decision;
    case TestKind::Glrt:
      return glrt(pair, g, threshold, lr_cap).decision;
    case TestKind::Comparison:
      return comparison_test(pair, g, threshold).decision;
  }
  throw error("apply_test: unreachable");
}

}  // namespace

RiskEstimate estimate_risk(const DistributionPair& pair, int n, TestKind test,
                           double threshold, int trials, std::uint64_t seed,
                           std::uint64_t cell_index, int workers, int lr_cap) {
  if (trials < 1) throw parameter_error("estimate_risk: trials must be >= 1");
  std::vector<std::uint8_t> null_decision(trials, 0);
  std::vector<std::uint8_t> planted_decision(trials, 0);

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_range = [&](int lo, int hi) {
    try {
      for (int t = lo; t < hi; ++t) {
        {
          RngStream rng = RngStream::substream(seed, cell_index, t, 0);
          const GraphPair g = sample_graph_pair(pair, n, Hypothesis::Null, rng);
          null_decision[t] =
              static_cast<std::uint8_t>(apply_test(pair, g, test, threshold, lr_cap));
        }
        {
          RngStream rng = RngStream::substream(seed, cell_index, t, 1);
          const GraphPair g =
              sample_graph_pair(pair, n, Hypothesis::Planted, rng);
          planted_decision[t] =
              static_cast<std::uint8_t>(apply_test(pair, g, test, threshold, lr_cap));
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };

  const int used = std::min(workers, trials);
  if (used <= 1) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (trials + used - 1) / used;
    for (int w = 0; w < used; ++w) {
      const int lo = w * chunk;
      const int hi = std::min(trials, lo + chunk);
      if (lo < hi) pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  long false_alarms = 0, misses = 0;
  for (int t = 0; t < trials; ++t) {
    false_alarms += null_decision[t];
    misses += planted_decision[t] ? 0 : 1;
  }
  RiskEstimate est;
  est.trials = trials;
  est.type1_hat = static_cast<double>(false_alarms) / trials;
  est.type2_hat = static_cast<double>(misses) / trials;
  est.risk_hat = est.type1_hat + est.type2_hat;
  est.half_width_95 =
      wilson_half_width(false_alarms, trials) + wilson_half_width(misses, trials);
  return est;
}

bool risk_ordering_flagged(const RiskEstimate& exact_lr, const RiskEstimate& glrt) {
  return exact_lr.risk_hat >
         glrt.risk_hat + 4.0 * (exact_lr.half_width_95 + glrt.half_width_95);
}

double resolve_threshold(const DistributionPair& pair, int n, TestKind test,
                         const std::string& rule, double comparison_level) {
  if (rule != "auto") return std::stod(rule);
  switch (test) {
    case TestKind::ExactLr:
      return 0.0;  // Bayes rule at equal priors
    case TestKind::Glrt: {
      const double c = find_class_constant(pair, PairClass::D2);
      if (c < 0.0) return 0.0;
      const ExponentProfile profile(pair);
      return glrt_threshold(profile, n, GlrtThresholdRule::D2Rule, c).tau;
    }
    case TestKind::Comparison:
      return comparison_threshold(pair, n, comparison_level);
  }
  throw error("resolve_threshold: unreachable");
}

namespace {

DistributionPair pair_for_axis(const ExperimentConfig& cfg, double axis_value) {
  if (cfg.sweep_param.empty()) return DistributionPair::parse(cfg.pair_text);
  std::istringstream in(cfg.pair_text);
  std::string kind;
  in >> kind;
  std::map<std::string, std::string> kv;
  std::vector<std::string> order;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw parameter_error("pair spec: expected key=value");
    const std::string key = tok.substr(0, eq);
    if (!kv.count(key)) order.push_back(key);
    kv[key] = tok.substr(eq + 1);
  }
  if (!kv.count(cfg.sweep_param)) order.push_back(cfg.sweep_param);
  kv[cfg.sweep_param] = fmt(axis_value);
  std::ostringstream rebuilt;
  rebuilt << kind;
  for (const auto& key : order) rebuilt << ' ' << key << '=' << kv[key];
  return DistributionPair::parse(rebuilt.str());
}

}  // namespace

std::vector<SweepRow> sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<double> axis = cfg.sweep_values;
  if (axis.empty()) axis.push_back(kNan);

  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (double axis_value : axis) {
    for (int n : cfg.n_values) {
      SweepRow row;
      row.axis_value = axis_value;
      row.n = n;
      row.test = to_string(cfg.test);
      row.threshold = kNan;
      row.chi2 = row.kl_pq = row.corr = kNan;
      try {
        const DistributionPair pair = pair_for_axis(cfg, axis_value);
        row.threshold = resolve_threshold(pair, n, cfg.test, cfg.threshold_rule,
                                          cfg.comparison_level);
        row.risk = estimate_risk(pair, n, cfg.test, row.threshold, cfg.trials,
                                 cfg.seed, cell, cfg.workers, cfg.lr_cap);
        row.chi2 = divergence(pair, DivergenceKind::Chi2);
        row.kl_pq = divergence(pair, DivergenceKind::KlPq);
        try {
          row.corr = pair.corr();
        } catch (const unsupported_moment_error&) {
          row.corr = kNan;
        }
        const double delta_n = std::sqrt(std::log(static_cast<double>(n)));
        row.thm1_verdict =
            theorem1_condition(pair, n, 0.5, 0.1, delta_n).holds ? "holds"
                                                                 : "fails";
        const ExponentProfile profile(pair);
        const auto thr_report =
            glrt_threshold(profile, n, GlrtThresholdRule::Custom, 0.0,
                           cfg.test == TestKind::Glrt ? row.threshold : 0.0);
        row.thm2_verdict = thr_report.premises_hold ? "holds" : "fails";
      } catch (const std::exception& e) {
        row.error = e.what();
        row.thm1_verdict = row.thm1_verdict.empty() ? "error" : row.thm1_verdict;
        row.thm2_verdict = "error";
      }
      rows.push_back(std::move(row));
      ++cell;
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg,
                     const std::vector<SweepRow>& rows) {
  out << resolved_config_header(cfg);
  out << "axis,n,test,threshold,trials,type1,type2,risk,hw95,chi2,kl_pq,corr,"
         "thm1_verdict,thm2_verdict\n";
  for (const auto& row : rows) {
    const bool ok = row.error.empty();
    out << fmt(row.axis_value) << ',' << row.n << ',' << row.test << ','
        << fmt(row.threshold) << ',' << (ok ? row.risk.trials : 0) << ','
        << fmt(ok ? row.risk.type1_hat : kNan) << ','
        << fmt(ok ? row.risk.type2_hat : kNan) << ','
        << fmt(ok ? row.risk.risk_hat : kNan) << ','
        << fmt(ok ? row.risk.half_width_95 : kNan) << ',' << fmt(row.chi2)
        << ',' << fmt(row.kl_pq) << ',' << fmt(row.corr) << ','
        << row.thm1_verdict << ',' << row.thm2_verdict << '\n';
  }
}

void write_sweep_json(std::ostream& out, const ExperimentConfig& cfg,
                      const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json doc;
  doc["config"] = {
      {"pair", cfg.pair_text},       {"n", cfg.n_values},
      {"test", to_string(cfg.test)}, {"threshold", cfg.threshold_rule},
      {"trials", cfg.trials},        {"seed", cfg.seed},
      {"sweep_param", cfg.sweep_param}, {"sweep_values", cfg.sweep_values},
      {"format", cfg.format},        {"workers", cfg.workers},
  };
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["axis"] = row.axis_value;
    j["n"] = row.n;
    j["test"] = row.test;
    j["threshold"] = row.threshold;
    if (row.error.empty()) {
      j["trials"] = row.risk.trials;
      j["type1"] = row.risk.type1_hat;
      j["type2"] = row.risk.type2_hat;
      j["risk"] = row.risk.risk_hat;
      j["hw95"] = row.risk.half_width_95;
    } else {
      j["error"] = row.error;
    }
    j["chi2"] = row.chi2;
    j["kl_pq"] = row.kl_pq;
    j["corr"] = row.corr;
    j["thm1_verdict"] = row.thm1_verdict;
    j["thm2_verdict"] = row.thm2_verdict;
    doc["rows"].push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

void write_graph_pair(std::ostream& out, const GraphPair& g, Hypothesis h,
                      std::uint64_t seed, bool emit_pi) {
  out << "n=" << g.n << " hypothesis=" << to_string(h) << " seed=" << seed
      << "\n";
  const auto print_upper = [&](const Eigen::MatrixXd& m) {
    bool first = true;
    for (int i = 0; i < g.n; ++i)
      for (int j = i + 1; j < g.n; ++j) {
        if (!first) out << ' ';
        out << fmt(m(i, j));
        first = false;
      }
    out << "\n";
  };
  print_upper(g.a);
  print_upper(g.b);
  if (emit_pi) {
    if (!g.latent_pi)
      throw parameter_error("write_graph_pair: no latent permutation to emit");
    out << "pi=";
    for (int i = 0; i < g.n; ++i) out << ' ' << (*g.latent_pi)(i);
    out << "\n";
  }
}

GraphPairFile read_graph_pair(std::istream& in) {
  std::string n_tok, h_tok, s_tok;
  if (!(in >> n_tok >> h_tok >> s_tok) || n_tok.rfind("n=", 0) != 0 ||
      h_tok.rfind("hypothesis=", 0) != 0 || s_tok.rfind("seed=", 0) != 0)
    throw parameter_error(
        "graph file: expected header 'n=<n> hypothesis=<h> seed=<s>'");
  GraphPairFile file;
  const int n = std::stoi(n_tok.substr(2));
  if (n < 2) throw parameter_error("graph file: n must be >= 2");
  file.hypothesis = hypothesis_from_string(h_tok.substr(11));
  file.seed = std::stoull(s_tok.substr(5));
  file.graph.n = n;
  file.graph.a = Eigen::MatrixXd::Zero(n, n);
  file.graph.b = Eigen::MatrixXd::Zero(n, n);
  const auto read_upper = [&](Eigen::MatrixXd& m) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double v;
        if (!(in >> v)) throw parameter_error("graph file: truncated weights");
        m(i, j) = m(j, i) = v;
      }
  };
  read_upper(file.graph.a);
  read_upper(file.graph.b);
  std::string pi_tok;
  if (in >> pi_tok) {
    if (pi_tok.rfind("pi=", 0) != 0)
      throw parameter_error("graph file: unexpected trailing token");
    std::vector<int> mapping(n);
    for (int i = 0; i < n; ++i)
      if (!(in >> mapping[i]))
        throw parameter_error("graph file: truncated permutation");
    file.graph.latent_pi = Permutation(std::move(mapping));
  }
  return file;
}

}  // namespace graphdep
