#include "boon/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "boon/estimators.hpp"
#include "boon/pool_io.hpp"
#include "boon/resampling.hpp"
#include "boon/summary.hpp"

namespace boon::cli {

using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IncompatiblePools : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by every subcommand.
struct CommonOptions {
  std::string direction = "max";
  std::string columns = "validation,test";
  std::string format;  // empty: infer from extension
  std::string output;
  bool json_stdout = false;
  bool allow_rejects = false;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::size_t replicates = 10'000;
  double level = 0.95;
};

struct Options {
  CommonOptions common;
  std::vector<std::string> inputs;
  std::vector<unsigned> n_values{5};
  std::string estimator = "nonparametric";
  std::string bandwidth;  // empty: not given
  std::string ci_method;  // boon only; empty: no interval
  std::size_t m_max = 50;
  std::size_t samples_per_m = 100'000;
  bool without_replacement = false;
  bool no_band = false;
  std::string curve_csv;
  std::string direction_b;  // compare only; empty: same as --direction
};

Direction parse_direction(const std::string& s) {
  if (s == "max" || s == "maximize") return Direction::maximize;
  if (s == "min" || s == "minimize") return Direction::minimize;
  throw UsageError("--direction must be 'max' or 'min', got '" + s + "'");
}

std::pair<std::string, std::string> parse_columns(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == s.size() ||
      s.find(',', comma + 1) != std::string::npos) {
    throw UsageError("--columns expects 'validation_name,test_name', got '" + s + "'");
  }
  return {s.substr(0, comma), s.substr(comma + 1)};
}

Bandwidth parse_bandwidth(const std::string& s) {
  if (s.empty() || s == "auto") return Bandwidth::auto_rule();
  double h = 0.0;
  try {
    std::size_t used = 0;
    h = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw UsageError("--bandwidth expects 'auto' or a non-negative number, got '" + s + "'");
  }
  if (!(h >= 0.0)) throw UsageError("--bandwidth must be non-negative");
  return Bandwidth::fixed(h);
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "nonparametric") return EstimatorKind::nonparametric;
  if (s == "gaussian") return EstimatorKind::gaussian_parametric;
  throw UsageError("--estimator must be 'nonparametric' or 'gaussian'");
}

std::uint64_t resolve_seed(const CommonOptions& common) {
  if (common.seed) return *common.seed;
  if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string(kSeedEnvVar) + " is not an unsigned integer: '" + env + "'");
    }
  }
  return 0;
}

ResamplingConfig make_config(const Options& opt) {
  ResamplingConfig cfg;
  cfg.replicates = opt.common.replicates;
  cfg.level = opt.common.level;
  cfg.seed = resolve_seed(opt.common);
  cfg.threads = opt.common.threads;
  cfg.bandwidth = parse_bandwidth(opt.bandwidth);
  return cfg;
}

std::vector<LoadedPool> load_inputs(const Options& opt, json& pools_json) {
  const auto [val_col, test_col] = parse_columns(opt.common.columns);
  std::vector<LoadedPool> loaded;
  for (std::size_t i = 0; i < opt.inputs.size(); ++i) {
    const std::string& path = opt.inputs[i];
    const Direction direction = parse_direction(
        i == 1 && !opt.direction_b.empty() ? opt.direction_b : opt.common.direction);
    PoolFileSpec spec;
    spec.path = path;
    spec.validation_column = val_col;
    spec.test_column = test_col;
    spec.direction = direction;
    if (opt.common.format.empty()) {
      spec.format = format_for_path(path);
    } else if (opt.common.format == "csv") {
      spec.format = PoolFormat::csv;
    } else if (opt.common.format == "jsonl") {
      spec.format = PoolFormat::jsonl;
    } else {
      throw UsageError("--format must be 'csv' or 'jsonl'");
    }
    LoadedPool lp = load_pool(spec, opt.common.allow_rejects);
    json rejected = json::array();
    for (const auto& r : lp.rejected) rejected.push_back({{"row", r.row}, {"reason", r.reason}});
    pools_json.push_back({{"path", path},
                          {"format", spec.format == PoolFormat::csv ? "csv" : "jsonl"},
                          {"m", lp.pool.size()},
                          {"metric", lp.pool.metric_name()},
                          {"direction", to_string(direction)},
                          {"rejected_rows", rejected}});
    loaded.push_back(std::move(lp));
  }
  return loaded;
}

json interval_json(const ConfidenceInterval& ci) {
  return {{"lo", ci.lo},
          {"hi", ci.hi},
          {"level", ci.level},
          {"method", to_string(ci.method)},
          {"replicates", ci.replicates},
          {"seed", ci.seed}};
}

json bandwidth_json(const Bandwidth& b) {
  if (b.automatic) return "auto";
  return json{{"h_val", b.h_val}, {"h_test", b.h_test}};
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "n/a"; }

void warn_rejections(const std::vector<LoadedPool>& pools, const Options& opt, std::ostream& err) {
  for (std::size_t i = 0; i < pools.size(); ++i) {
    for (const auto& r : pools[i].rejected) {
      err << "warning: " << opt.inputs[i] << ": rejected row " << r.row << ": " << r.reason << "\n";
    }
  }
}

json cmd_summarize(const Options& opt, json& report, std::ostream& out, std::ostream& err) {
  const auto pools = load_inputs(opt, report["pools"]);
  warn_rejections(pools, opt, err);
  const ResultPool& pool = pools.front().pool;
  const PoolSummary s = summarize(pool);

  json ad = nullptr;
  std::string ad_text;
  try {
    const auto r = anderson_darling_normality(pool.test_scores());
    ad = {{"statistic", r.statistic},
          {"raw_statistic", r.raw_statistic},
          {"critical_value_5pct", r.critical_value},
          {"reject_normality_at_5pct", r.reject_at_5pct}};
    ad_text = fmt(r.statistic) + (r.reject_at_5pct ? " (normality rejected at 5%)"
                                                   : " (consistent with normal at 5%)");
  } catch (const Error& e) {
    ad_text = std::string("n/a (") + e.what() + ")";
  }

  out << "m                  " << s.m << "\n"
      << "mean test          " << fmt(s.mean_test) << "\n"
      << "std test           " << fmt(s.std_test) << "\n"
      << "IQR test           " << fmt(s.iqr_test) << "\n"
      << "range test         " << fmt(s.range_test.first) << " - " << fmt(s.range_test.second) << "\n"
      << "spearman val/test  " << fmt(s.spearman_val_test) << "\n"
      << "pearson val/test   " << fmt(s.pearson_val_test) << "\n"
      << "anderson-darling   " << ad_text << "\n";

  return {{"m", s.m},
          {"mean_test", s.mean_test},
          {"std_test", optional_json(s.std_test)},
          {"iqr_test", optional_json(s.iqr_test)},
          {"range_test", {s.range_test.first, s.range_test.second}},
          {"spearman_val_test", optional_json(s.spearman_val_test)},
          {"pearson_val_test", optional_json(s.pearson_val_test)},
          {"anderson_darling_test", ad}};
}

json cmd_boon(const Options& opt, json& report, std::ostream& out, std::ostream& err) {
  const EstimatorKind kind = parse_estimator(opt.estimator);
  const ResamplingConfig cfg = make_config(opt);
  const auto pools = load_inputs(opt, report["pools"]);
  warn_rejections(pools, opt, err);
  const ResultPool& pool = pools.front().pool;

  std::string method = opt.ci_method;
  if (method.empty() && !opt.bandwidth.empty()) method = "smoothed";
  if (!method.empty() && method != "bootstrap" && method != "smoothed" && method != "monte-carlo") {
    throw UsageError("--ci-method must be 'bootstrap', 'smoothed' or 'monte-carlo'");
  }
  if (!method.empty()) cfg.validate();

  json settings = {{"estimator", to_string(kind)}, {"n_values", opt.n_values}};
  if (!method.empty()) {
    settings["ci"] = {{"method", method},
                      {"replicates", cfg.replicates},
                      {"level", cfg.level},
                      {"seed", cfg.seed}};
    if (method == "smoothed") settings["ci"]["bandwidth"] = bandwidth_json(cfg.bandwidth);
  }
  report["settings"] = settings;

  json estimates = json::array();
  out << std::left << std::setw(6) << "n" << std::setw(6) << "m" << std::setw(16) << "Boo(n)";
  if (!method.empty()) out << "CI " << fmt(100 * cfg.level, 4) << "%";
  out << "\n";
  for (unsigned n : opt.n_values) {
    if (n == 0) throw UsageError("--n values must be >= 1");
    BoonEstimate est;
    try {
      est = estimate_boon(pool, n, kind);
    } catch (const Error& e) {
      if (kind == EstimatorKind::gaussian_parametric &&
          (e.code() == ErrorCode::degenerate_pool || e.code() == ErrorCode::insufficient_data)) {
        throw Error(e.code(), std::string(e.what()) +
                                  "\nhint: use --estimator nonparametric, which has no such requirement");
      }
      throw;
    }
    if (est.extrapolative) {
      err << "warning: pool has m=" << est.m << " < n=" << n
          << "; the Boo(" << n << ") estimate extrapolates beyond the observed runs\n";
    }
    json e = {{"n", est.n},
              {"m", est.m},
              {"value", est.value},
              {"estimator", to_string(est.kind)},
              {"extrapolative", est.extrapolative}};
    out << std::setw(6) << n << std::setw(6) << est.m << std::setw(16) << fmt(est.value, 8);
    if (!method.empty()) {
      ConfidenceInterval ci;
      if (method == "bootstrap") {
        ci = bootstrap_ci(pool, boon_statistic(n, kind), cfg);
      } else if (method == "smoothed") {
        ci = smoothed_bootstrap_ci(pool, boon_statistic(n, kind), cfg);
      } else {
        ci = monte_carlo_ci_gaussian(fit_gaussian(pool), pool.size(), n, kind, cfg, pool.direction());
      }
      e["ci"] = interval_json(ci);
      out << "[" << fmt(ci.lo, 8) << ", " << fmt(ci.hi, 8) << "]";
    }
    out << (est.extrapolative ? "  (extrapolative)" : "") << "\n";
    estimates.push_back(e);
  }
  return {{"estimates", estimates}};
}

json cmd_curve(const Options& opt, json& report, std::ostream& out, std::ostream& err) {
  const ResamplingConfig cfg = make_config(opt);
  if (opt.m_max == 0) throw UsageError("--m-max must be >= 1");
  const auto pools = load_inputs(opt, report["pools"]);
  warn_rejections(pools, opt, err);
  const ResultPool& pool = pools.front().pool;

  std::vector<std::size_t> ms(opt.m_max);
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i] = i + 1;
  CurveOptions copt;
  copt.samples_per_m = opt.samples_per_m;
  copt.with_replacement = !opt.without_replacement;
  copt.band = !opt.no_band;
  const auto points = best_of_m_curve(pool, ms, copt, cfg);

  report["settings"] = {{"m_max", opt.m_max},
                        {"samples_per_m", opt.samples_per_m},
                        {"with_replacement", copt.with_replacement},
                        {"seed", cfg.seed},
                        {"band",
                         copt.band ? json{{"method", "smoothed_bootstrap"},
                                          {"statistic", "best_single_model"},
                                          {"replicates", cfg.replicates},
                                          {"level", cfg.level},
                                          {"bandwidth", bandwidth_json(cfg.bandwidth)}}
                                   : json(nullptr)}};

  std::ostringstream csv;
  csv << std::setprecision(std::numeric_limits<double>::max_digits10);
  csv << "m,expected_best_test,ci_lo,ci_hi\n";
  json rows = json::array();
  out << std::left << std::setw(6) << "m" << std::setw(16) << "E[best test]" << std::setw(12) << "MC s.e."
      << (copt.band ? "band" : "") << "\n";
  for (const CurvePoint& p : points) {
    json row = {{"m", p.m},
                {"expected_best_test", p.expected_best_test},
                {"mc_standard_error", p.mc_standard_error}};
    csv << p.m << "," << p.expected_best_test << ",";
    out << std::setw(6) << p.m << std::setw(16) << fmt(p.expected_best_test, 8) << std::setw(12)
        << fmt(p.mc_standard_error, 3);
    if (p.ci) {
      row["ci_lo"] = p.ci->lo;
      row["ci_hi"] = p.ci->hi;
      csv << p.ci->lo << "," << p.ci->hi;
      out << "[" << fmt(p.ci->lo, 8) << ", " << fmt(p.ci->hi, 8) << "]";
    } else {
      csv << ",";
    }
    csv << "\n";
    out << "\n";
    rows.push_back(row);
  }

  if (!opt.curve_csv.empty()) {
    std::ofstream f(opt.curve_csv);
    if (!f) throw Error(ErrorCode::unreadable_file, "cannot write '" + opt.curve_csv + "'");
    f << csv.str();
  }
  return {{"points", rows}};
}

json cmd_compare(const Options& opt, json& report, std::ostream& out, std::ostream& err) {
  const ResamplingConfig cfg = make_config(opt);
  if (opt.n_values.size() != 1 || opt.n_values.front() == 0) {
    throw UsageError("compare takes exactly one --n value >= 1");
  }
  const unsigned n = opt.n_values.front();
  const auto pools = load_inputs(opt, report["pools"]);
  warn_rejections(pools, opt, err);
  const ResultPool& a = pools[0].pool;
  const ResultPool& b = pools[1].pool;
  if (a.direction() != b.direction()) {
    throw IncompatiblePools("pools have different directions");
  }
  const Comparison c = compare_architectures(a, b, n, cfg);
  report["settings"] = {{"n", n}, {"replicates", cfg.replicates}, {"level", cfg.level}, {"seed", cfg.seed}};

  out << "Boo(" << n << ") A          " << fmt(boon_nonparametric(a, n).value, 8) << "\n"
      << "Boo(" << n << ") B          " << fmt(boon_nonparametric(b, n).value, 8) << "\n"
      << "delta (B - A)     " << fmt(c.delta, 8) << "\n"
      << "CI " << fmt(100 * cfg.level, 4) << "%          [" << fmt(c.ci.lo, 8) << ", " << fmt(c.ci.hi, 8)
      << "]\n"
      << "significant       " << (c.significant ? "yes" : "no") << "\n";
  return {{"n", n},
          {"boon_a", boon_nonparametric(a, n).value},
          {"boon_b", boon_nonparametric(b, n).value},
          {"delta", c.delta},
          {"ci", interval_json(c.ci)},
          {"significant", c.significant}};
}

void add_common(CLI::App* cmd, CommonOptions& c, bool stochastic) {
  cmd->add_option("--direction", c.direction, "Which scores are better: max or min")
      ->check(CLI::IsMember({"max", "min", "maximize", "minimize"}))
      ->capture_default_str();
  cmd->add_option("--columns", c.columns, "Validation and test column names, comma separated")
      ->capture_default_str();
  cmd->add_option("--format", c.format, "Input format (default: from file extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_option("--output", c.output, "Write the JSON report to this path");
  cmd->add_flag("--json", c.json_stdout, "Print the JSON report instead of the table");
  cmd->add_flag("--allow-rejects", c.allow_rejects,
                "Continue past malformed rows; they are listed in the report");
  if (stochastic) {
    cmd->add_option("--seed", c.seed, std::string("Master seed (default: $") + kSeedEnvVar + " or 0)");
    cmd->add_option("--threads", c.threads, "Worker threads, 0 = all cores; results do not depend on it")
        ->capture_default_str();
    cmd->add_option("--level", c.level, "Confidence level")->capture_default_str();
  }
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return kUsageError;
    case ErrorCode::unreadable_file: return kUnreadableFile;
    case ErrorCode::unknown_columns: return kUnknownColumns;
    case ErrorCode::malformed_rows: return kMalformedRows;
    case ErrorCode::no_valid_rows: return kNoValidRows;
    case ErrorCode::invalid_distribution:
    case ErrorCode::invalid_data:
    case ErrorCode::insufficient_data:
    case ErrorCode::degenerate_pool:
    case ErrorCode::resampling_degenerate: return kEstimatorError;
  }
  return kInternalError;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected best-out-of-n (Boo(n)) performance from repeated-training result pools"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Options opt;

  auto* summarize_cmd = app.add_subcommand("summarize", "Descriptive statistics of a result pool");
  summarize_cmd->add_option("input", opt.inputs, "Pool file (CSV or JSON lines)")->required()->expected(1);
  add_common(summarize_cmd, opt.common, false);

  auto* boon_cmd = app.add_subcommand("boon", "Boo(n) estimates, optionally with confidence intervals");
  boon_cmd->add_option("input", opt.inputs, "Pool file (CSV or JSON lines)")->required()->expected(1);
  add_common(boon_cmd, opt.common, true);
  boon_cmd->add_option("--n", opt.n_values, "Values of n, comma separated")->delimiter(',')->capture_default_str();
  boon_cmd->add_option("--estimator", opt.estimator, "nonparametric or gaussian")
      ->check(CLI::IsMember({"nonparametric", "gaussian"}))
      ->capture_default_str();
  boon_cmd->add_option("--bootstrap", opt.common.replicates, "Replicates B; requests a bootstrap interval")
      ->each([&](const std::string&) {
        if (opt.ci_method.empty()) opt.ci_method = "bootstrap";
      });
  boon_cmd->add_option("--ci-method", opt.ci_method, "bootstrap, smoothed or monte-carlo")
      ->check(CLI::IsMember({"bootstrap", "smoothed", "monte-carlo"}));
  boon_cmd->add_option("--bandwidth", opt.bandwidth, "Smoothing bandwidth: auto or a number");

  auto* curve_cmd = app.add_subcommand("curve", "Expected best-validation test score versus pool size");
  curve_cmd->add_option("input", opt.inputs, "Pool file (CSV or JSON lines)")->required()->expected(1);
  add_common(curve_cmd, opt.common, true);
  curve_cmd->add_option("--m-max", opt.m_max, "Largest pool size on the curve")->capture_default_str();
  curve_cmd->add_option("--samples-per-m", opt.samples_per_m, "Monte Carlo samples per pool size")
      ->capture_default_str();
  curve_cmd->add_option("--bootstrap", opt.common.replicates, "Replicates B for the bands")->capture_default_str();
  curve_cmd->add_option("--bandwidth", opt.bandwidth, "Smoothing bandwidth: auto or a number");
  curve_cmd->add_option("--curve-csv", opt.curve_csv, "Write m,expected_best_test,ci_lo,ci_hi here");
  curve_cmd->add_flag("--without-replacement", opt.without_replacement, "Draw each sample without replacement");
  curve_cmd->add_flag("--no-band", opt.no_band, "Skip the smoothed-bootstrap bands");

  auto* compare_cmd = app.add_subcommand("compare", "Boo(n) difference of two pools (B minus A) with a bootstrap interval");
  compare_cmd->add_option("inputs", opt.inputs, "Pool files A and B")->required()->expected(2);
  add_common(compare_cmd, opt.common, true);
  compare_cmd->add_option("--n", opt.n_values, "n")->capture_default_str();
  compare_cmd->add_option("--bootstrap", opt.common.replicates, "Replicates B")->capture_default_str();
  compare_cmd->add_option("--direction-b", opt.direction_b, "Direction of pool B if it differs from --direction")
      ->check(CLI::IsMember({"max", "min", "maximize", "minimize"}));

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    }
    return kUsageError;
  }

  std::string command;
  for (std::size_t i = 0; i < args.size(); ++i) command += (i ? " " : "") + args[i];

  json report = {{"schema", "boon-report"},
                 {"schema_version", kReportSchemaVersion},
                 {"tool_version", kToolVersion},
                 {"command", command},
                 {"pools", json::array()}};

  try {
    std::ostringstream table;
    if (summarize_cmd->parsed()) {
      report["subcommand"] = "summarize";
      report["results"] = cmd_summarize(opt, report, table, err);
    } else if (boon_cmd->parsed()) {
      report["subcommand"] = "boon";
      report["results"] = cmd_boon(opt, report, table, err);
    } else if (curve_cmd->parsed()) {
      report["subcommand"] = "curve";
      report["results"] = cmd_curve(opt, report, table, err);
    } else {
      report["subcommand"] = "compare";
      report["results"] = cmd_compare(opt, report, table, err);
    }

    if (!opt.common.output.empty()) {
      std::ofstream f(opt.common.output);
      if (!f) throw Error(ErrorCode::unreadable_file, "cannot write '" + opt.common.output + "'");
      f << report.dump(2) << "\n";
    }
    if (opt.common.json_stdout) {
      out << report.dump(2) << "\n";
    } else {
      out << table.str();
    }
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IncompatiblePools& e) {
    err << "error: " << e.what() << "\n";
    return kIncompatiblePools;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace boon::cli
