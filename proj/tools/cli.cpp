#include "cli.hpp"

#include "tho/bench.hpp"
#include "tho/candidate_set.hpp"
#include "tho/report.hpp"
#include "tho/sample_split.hpp"
#include "tho/selector.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace tho::cli {

namespace {

using nlohmann::json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SelectOptions {
  std::string input;
  std::string test = "birge";
  double p = 0.5;
  double theta = 0.25;
  double csqrt = 1.0;
  std::string last = "full";
  std::string family = "S2";
  std::string algorithm = "exact";
  std::string start = "ls";
  std::uint64_t seed = 1;
  std::string output = "json";
  int threads = 0;
  std::string out_path;
};

struct BenchOptions {
  std::string config;
  std::string out_prefix;
  int threads = -1;
};

struct ComplexityOptions {
  std::string config;
  std::string from_runs;
  std::string out_prefix;
  int threads = -1;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, int threads) {
  ExperimentConfig cfg;
  try {
    cfg = config_from_json(read_json_file(path));
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (threads >= 0) cfg.threads = threads;
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

json recipe_json(const Recipe& r) {
  json j{{"kind", to_string(r.kind)}};
  if (r.kind == Recipe::Kind::parametric) {
    j["family"] = to_string(r.family);
  } else {
    j["index"] = r.index;
  }
  return j;
}

json density_json(const Density& d) {
  json j{{"kind", to_string(d.kind())}, {"description", d.describe()}};
  if (const auto* h = d.as_histogram()) {
    j["bins"] = h->bins();
    j["breaks"] = std::vector<double>(h->breaks().begin(), h->breaks().end());
    j["masses"] = std::vector<double>(h->masses().begin(), h->masses().end());
  } else if (const auto* k = d.as_kernel()) {
    j["bandwidth"] = k->bandwidth();
  } else if (const auto* p = d.as_parametric()) {
    j["family"] = to_string(p->family());
    std::vector<double> params;
    for (int i = 0; i < p->param_count(); ++i) params.push_back(p->param(i));
    j["params"] = params;
  }
  return j;
}

// select ---------------------------------------------------------------------

int run_select(const SelectOptions& o, std::ostream& out, std::ostream& err) {
  const TestKind::Variant variant = test_variant_from_string(o.test);
  if (!(o.p > 0.0 && o.p < 1.0)) throw UsageError("--p must lie in (0, 1)");
  if (variant == TestKind::Variant::birge && !(o.theta > 0.0 && o.theta < 0.5)) {
    throw UsageError("--theta must lie in (0, 1/2) with --test birge");
  }
  if (!(o.csqrt >= 0.0) || !std::isfinite(o.csqrt)) throw UsageError("--csqrt must be non-negative");
  const Method method = method_from_string(o.algorithm);
  if (method == Method::approx && o.csqrt == 0.0) throw UsageError("--algorithm approx needs --csqrt > 0");
  const Last last = last_from_string(o.last);
  const FamilyTag family = family_from_string(o.family);
  if (o.output != "json" && o.output != "csv") throw UsageError("--output must be json or csv");

  Eigen::VectorXd x;
  if (o.input == "-") {
    x = parse_sample(std::cin);
  } else {
    std::ifstream in(o.input);
    if (!in) throw UsageError("cannot open " + o.input);
    x = parse_sample(in);
  }
  if (x.size() < 4) throw UsageError("the sample needs at least 4 values");

  SampleSplit split;
  try {
    split = split_sample(x, o.p, o.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const CandidateSet candidates(build_candidates(family, split.training));
  const Eigen::Index M = candidates.size();
  Eigen::MatrixXd values(split.validation.size(), M);
  for (Eigen::Index m = 0; m < M; ++m) values.col(m) = candidates.density(m).eval(split.validation);

  Eigen::Index start = 0;
  if (o.start == "ls") {
    start = classical_ho_select(candidates, values, Contrast::ls).chosen;
  } else {
    long long idx = 0;
    const auto res = std::from_chars(o.start.data(), o.start.data() + o.start.size(), idx);
    if (res.ec != std::errc() || res.ptr != o.start.data() + o.start.size() || idx < 1 || idx > M) {
      throw UsageError("--start must be 'ls' or an index in 1.." + std::to_string(M));
    }
    start = static_cast<Eigen::Index>(idx - 1);
  }

  const TestKind kind = variant == TestKind::Variant::birge ? TestKind::birge(o.theta) : TestKind::baraud();
  PairwiseTester tester(candidates, split.validation, values, kind);
  SelectionOutcome sel;
  switch (method) {
    case Method::exact: sel = exact_select(tester, start); break;
    case Method::approx: sel = approx_select(tester, start, o.csqrt); break;
    case Method::brute: sel = brute_force_select(tester); break;
    default: throw UsageError("--algorithm must be exact, approx or brute");
  }

  const Candidate& chosen = candidates[sel.chosen];
  json report{{"chosen", sel.chosen + 1},
              {"chosen_label", chosen.label},
              {"D", sel.criterion},
              {"N", sel.tests_used},
              {"complexity", sel.complexity},
              {"M", M},
              {"algorithm", to_string(method)},
              {"test", kind.name()},
              {"theta", variant == TestKind::Variant::birge ? json(o.theta) : json(nullptr)},
              {"p", o.p},
              {"family", to_string(family)},
              {"start", start + 1},
              {"seed", o.seed},
              {"n", x.size()},
              {"n_training", split.training.size()},
              {"n_validation", split.validation.size()},
              {"last", to_string(last)},
              {"recipe", recipe_json(chosen.recipe)},
              {"selected", density_json(chosen.density)}};
  if (method == Method::approx) report["delta"] = sel.delta;
  json trace = json::array();
  for (const auto& t : sel.trace) trace.push_back({{"m", t.m + 1}, {"D", t.criterion}});
  report["trace"] = trace;
  if (last == Last::full) {
    try {
      report["refit"] = density_json(refit(chosen.recipe, split.full));
    } catch (const DegenerateSampleError& e) {
      report["refit"] = nullptr;
      report["refit_error"] = e.what();
    }
  }

  err << "selected " << chosen.label << " (" << sel.chosen + 1 << " of " << M << "), D = " << format_real(sel.criterion)
      << ", tests = " << sel.tests_used << ", complexity = " << format_real(sel.complexity) << '\n';

  std::ostringstream body;
  if (o.output == "json") {
    body << report.dump(2) << '\n';
  } else {
    body << "chosen,chosen_label,D,N,complexity,M,algorithm,test,family,last\n"
         << sel.chosen + 1 << ',' << chosen.label << ',' << format_real(sel.criterion) << ',' << sel.tests_used << ','
         << format_real(sel.complexity) << ',' << M << ',' << to_string(method) << ',' << kind.name() << ','
         << to_string(family) << ',' << to_string(last) << '\n';
  }
  if (o.out_path.empty()) {
    out << body.str();
  } else {
    open_output(o.out_path) << body.str();
  }
  return kExitOk;
}

// bench ----------------------------------------------------------------------

Progress progress_printer(std::ostream& err) {
  return [&err, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
    const std::size_t step = std::max<std::size_t>(1, total / 10);
    if (done == total || done >= last + step) {
      last = done;
      err << "  " << done << '/' << total << " replicates\n";
    }
  };
}

void print_quantiles(const RiskReport& report, std::ostream& out) {
  for (const auto& c : complexity_summaries(report)) {
    out << to_string(c.family) << " n=" << c.n << ' ' << to_string(c.method) << ": complexity q75="
        << format_real(c.quantiles[0]) << " q90=" << format_real(c.quantiles[1])
        << " q95=" << format_real(c.quantiles[2]) << " (" << c.count << " runs)\n";
  }
}

int run_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load_config(o.config, o.threads);
  const RiskReport report = run_experiment(cfg, progress_printer(err));
  {
    auto f = open_output(o.out_prefix + ".csv");
    write_runs_csv(f, report);
  }
  open_output(o.out_prefix + ".json") << summary_json(report).dump(2) << '\n';
  print_quantiles(report, out);
  const OracleCheck check = oracle_check(report);
  if (check.compared > 0) {
    out << "exact/brute disagreements: " << check.disagreements << " of " << check.compared << '\n';
  }
  if (!report.failures.empty()) err << report.failures.size() << " replicate(s) failed\n";
  return kExitOk;
}

// complexity -----------------------------------------------------------------

std::vector<RunRecord> read_injected_runs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::string line;
  std::vector<std::string> header;
  std::vector<RunRecord> runs;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
    if (header.empty()) {
      header = cells;
      if (std::find(header.begin(), header.end(), "M") == header.end() ||
          std::find(header.begin(), header.end(), "N") == header.end()) {
        throw UsageError(path + ": header must name the columns M and N");
      }
      continue;
    }
    if (cells.size() != header.size()) throw UsageError(path + ":" + std::to_string(line_no) + ": wrong column count");
    RunRecord r;
    r.density = "injected";
    r.family = FamilyTag::SR;
    long long m = -1;
    long long n_tests = -1;
    try {
      for (std::size_t k = 0; k < header.size(); ++k) {
        const std::string& h = header[k];
        if (h == "M") m = std::stoll(cells[k]);
        else if (h == "N") n_tests = std::stoll(cells[k]);
        else if (h == "density") r.density = cells[k];
        else if (h == "family") r.family = family_from_string(cells[k]);
        else if (h == "n") r.n = std::stoi(cells[k]);
        else if (h == "method") r.method = method_from_string(cells[k]);
        else if (h == "replicate") r.replicate = std::stoi(cells[k]);
      }
    } catch (const std::exception& e) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (m < 2 || n_tests < m - 1 || n_tests > m * (m - 1) / 2) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": need M >= 2 and M-1 <= N <= M(M-1)/2");
    }
    r.members = static_cast<Eigen::Index>(m);
    r.tests_used = static_cast<std::size_t>(n_tests);
    r.complexity = complexity_ratio(r.tests_used, r.members);
    runs.push_back(std::move(r));
  }
  if (runs.empty()) throw UsageError(path + ": no runs");
  return runs;
}

json complexity_json(const RiskReport& report) {
  json cdf = json::array();
  for (const auto& c : complexity_summaries(report)) {
    json levels = json::array();
    for (std::size_t q = 0; q < kComplexityLevels.size(); ++q) {
      levels.push_back({{"level", kComplexityLevels[q]}, {"quantile", c.quantiles[q]}});
    }
    cdf.push_back({{"family", to_string(c.family)},
                   {"n", c.n},
                   {"method", to_string(c.method)},
                   {"count", c.count},
                   {"median", c.median},
                   {"quantiles", levels}});
  }
  json slopes = json::array();
  for (const auto& e : complexity_slopes(report.runs)) {
    slopes.push_back({{"density", e.density},
                      {"family", to_string(e.family)},
                      {"method", to_string(e.method)},
                      {"distinct_sizes", e.distinct_sizes},
                      {"beta", e.slope ? json(*e.slope) : json(nullptr)}});
  }
  return {{"runs", report.runs.size()}, {"failures", report.failures.size()}, {"cdf", cdf}, {"slopes", slopes}};
}

int run_complexity(const ComplexityOptions& o, std::ostream& out, std::ostream& err) {
  RiskReport report;
  if (!o.from_runs.empty()) {
    report.runs = read_injected_runs(o.from_runs);
  } else {
    report = run_experiment(load_config(o.config, o.threads), progress_printer(err));
  }
  {
    auto f = open_output(o.out_prefix + "_runs.csv");
    f << "density,family,n,method,replicate,M,N,complexity_ratio\n";
    for (const auto& r : report.runs) {
      if (r.method == Method::ls || r.method == Method::kl) continue;
      f << r.density << ',' << to_string(r.family) << ',' << r.n << ',' << to_string(r.method) << ',' << r.replicate
        << ',' << r.members << ',' << r.tests_used << ',' << format_real(r.complexity) << '\n';
    }
  }
  const json j = complexity_json(report);
  open_output(o.out_prefix + ".json") << j.dump(2) << '\n';
  print_quantiles(report, out);
  for (const auto& e : complexity_slopes(report.runs)) {
    out << e.density << ' ' << to_string(e.family) << ' ' << to_string(e.method) << ": beta = "
        << (e.slope ? format_real(*e.slope) : std::string("n/a")) << '\n';
  }
  return kExitOk;
}

}  // namespace

Eigen::VectorXd parse_sample(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    double v = 0.0;
    try {
      v = parse_real(line);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!std::isfinite(v)) throw std::invalid_argument("line " + std::to_string(line_no) + ": value is not finite");
    values.push_back(v);
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust hold-out selection of density estimators"};
  app.require_subcommand(1);

  SelectOptions sel;
  auto* select_cmd = app.add_subcommand("select", "Select an estimator for one sample");
  select_cmd->add_option("input", sel.input, "Sample file, one value per line ('-' for stdin)")->required();
  select_cmd->add_option("--test", sel.test, "Robust test: birge or baraud")->capture_default_str();
  select_cmd->add_option("--p", sel.p, "Training proportion")->capture_default_str();
  select_cmd->add_option("--theta", sel.theta, "Birge robustness parameter in (0, 1/2)")->capture_default_str();
  select_cmd->add_option("--csqrt", sel.csqrt, "Approximate search radius scale")->capture_default_str();
  select_cmd->add_option("--last", sel.last, "Final estimate from training or full sample")->capture_default_str();
  select_cmd->add_option("--family", sel.family, "SR, SI, SK, SP, SC, S1 or S2")->capture_default_str();
  select_cmd->add_option("--algorithm", sel.algorithm, "exact, approx or brute")->capture_default_str();
  select_cmd->add_option("--start", sel.start, "Start point: ls or a 1-based index")->capture_default_str();
  select_cmd->add_option("--seed", sel.seed, "Split seed")->capture_default_str();
  select_cmd->add_option("--output", sel.output, "json or csv")->capture_default_str();
  select_cmd->add_option("--threads", sel.threads, "Ignored; selection is sequential");
  select_cmd->add_option("--out", sel.out_path, "Write the report here instead of stdout");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a Monte-Carlo campaign");
  bench_cmd->add_option("--config", bench.config, "Campaign file (JSON)")->required();
  bench_cmd->add_option("--out", bench.out_prefix, "Output prefix for .csv and .json")->required();
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (default: config, else all cores)");

  ComplexityOptions cx;
  auto* cx_cmd = app.add_subcommand("complexity", "Complexity ratios, quantiles and slopes");
  auto* cfg_opt = cx_cmd->add_option("--config", cx.config, "Campaign file (JSON)");
  auto* runs_opt = cx_cmd->add_option("--from-runs", cx.from_runs, "CSV of recorded runs with columns M and N");
  cfg_opt->excludes(runs_opt);
  cx_cmd->add_option("--out", cx.out_prefix, "Output prefix")->required();
  cx_cmd->add_option("--threads", cx.threads, "Worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*select_cmd) return run_select(sel, out, err);
    if (*bench_cmd) return run_bench(bench, out, err);
    if (cx.config.empty() && cx.from_runs.empty()) throw UsageError("complexity needs --config or --from-runs");
    return run_complexity(cx, out, err);
  } catch (const std::invalid_argument& e) {
    // flag and input validation, including parse errors of the sample file
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace tho::cli
