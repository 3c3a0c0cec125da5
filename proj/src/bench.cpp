#include "tho/bench.hpp"

#include "tho/candidate_set.hpp"
#include "tho/metric.hpp"
#include "tho/rng.hpp"
#include "tho/sample_split.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <variant>

namespace tho {

std::string to_string(Loss loss) {
  switch (loss) {
    case Loss::hellinger2: return "hellinger2";
    case Loss::l1: return "l1";
    case Loss::l2: return "l2";
  }
  return "?";
}

Loss loss_from_string(const std::string& name) {
  if (name == "hellinger2" || name == "hellinger") return Loss::hellinger2;
  if (name == "l1") return Loss::l1;
  if (name == "l2") return Loss::l2;
  throw std::invalid_argument("unknown loss: " + name);
}

double loss_value(Loss loss, const Density& estimate, const Density& truth, const QuadratureSpec& quad) {
  switch (loss) {
    case Loss::hellinger2: return hellinger_sq(estimate, truth, quad);
    case Loss::l1: return lq_distance(estimate, truth, 1, quad);
    case Loss::l2: return lq_distance(estimate, truth, 2, quad);
  }
  return 0.0;
}

std::string to_string(Last last) { return last == Last::training ? "training" : "full"; }

Last last_from_string(const std::string& name) {
  if (name == "training") return Last::training;
  if (name == "full") return Last::full;
  throw std::invalid_argument("unknown last: " + name);
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(!densities.empty(), "config: densities must not be empty");
  for (const auto& d : densities) builtin_density(d);
  require(!families.empty(), "config: families must not be empty");
  require(!sizes.empty(), "config: n must not be empty");
  for (int n : sizes) require(n >= 4, "config: every n must be at least 4");
  require(p > 0.0 && p < 1.0, "config: p must lie in (0, 1)");
  for (int n : sizes) {
    const Eigen::Index n1 = training_size(n, p);
    require(n1 >= 2 && n1 <= n - 1, "config: p leaves an empty training or validation part");
  }
  if (test == TestKind::Variant::birge) require(theta > 0.0 && theta < 0.5, "config: theta must lie in (0, 1/2)");
  require(!methods.empty(), "config: methods must not be empty");
  if (std::find(methods.begin(), methods.end(), Method::approx) != methods.end()) {
    require(c > 0.0 && std::isfinite(c), "config: c must be positive for the approx method");
  }
  require(replicates >= 1, "config: replicates must be at least 1");
  require(!losses.empty(), "config: losses must not be empty");
  require(threads >= 0, "config: threads must be non-negative");
  quad.validate();
}

TestKind ExperimentConfig::test_kind() const {
  return test == TestKind::Variant::birge ? TestKind::birge(theta) : TestKind::baraud();
}

std::uint64_t replicate_seed(std::uint64_t master, const std::string& density, FamilyTag family, int n,
                             int replicate) {
  std::uint64_t h = fnv1a(density);
  h = fnv1a("|" + to_string(family), h);
  h = fnv1a("|" + std::to_string(n), h);
  return splitmix64(splitmix64(master ^ h) + static_cast<std::uint64_t>(replicate));
}

std::vector<RunRecord> run_replicate(const ExperimentConfig& cfg, const BenchmarkDensity& truth, FamilyTag family,
                                     int n, int replicate) {
  using Clock = std::chrono::steady_clock;
  const std::uint64_t seed = replicate_seed(cfg.seed, truth.label, family, n, replicate);
  Rng rng(seed);
  const Eigen::VectorXd x = truth.sample(n, rng);
  const SampleSplit split = split_sample(x, cfg.p, rng.next());
  const CandidateSet candidates(build_candidates(family, split.training), cfg.quad);

  Eigen::MatrixXd values(split.validation.size(), candidates.size());
  for (Eigen::Index m = 0; m < candidates.size(); ++m) values.col(m) = candidates.density(m).eval(split.validation);
  const Eigen::Index start = classical_ho_select(candidates, values, Contrast::ls).chosen;

  std::vector<RunRecord> out;
  for (const Method method : cfg.methods) {
    const auto t0 = Clock::now();
    SelectionOutcome sel;
    if (method == Method::ls || method == Method::kl) {
      sel = classical_ho_select(candidates, values, method == Method::ls ? Contrast::ls : Contrast::kl);
    } else {
      PairwiseTester tester(candidates, split.validation, values, cfg.test_kind());
      if (method == Method::exact) {
        sel = exact_select(tester, start);
      } else if (method == Method::approx) {
        sel = approx_select(tester, start, cfg.c);
      } else {
        sel = brute_force_select(tester);
      }
    }
    const double wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    RunRecord rec;
    rec.density = truth.label;
    rec.family = family;
    rec.n = n;
    rec.replicate = replicate;
    rec.method = method;
    rec.seed = seed;
    rec.members = candidates.size();
    rec.chosen = sel.chosen;
    rec.chosen_label = candidates.label(sel.chosen);
    rec.criterion = sel.criterion;
    rec.tests_used = sel.tests_used;
    rec.complexity = sel.complexity;
    rec.wall_ms = wall_ms;
    rec.contrast_fallback = sel.fallback;

    Density estimate = candidates.density(sel.chosen);
    if (cfg.last == Last::full) {
      try {
        estimate = refit(candidates[sel.chosen].recipe, split.full);
      } catch (const DegenerateSampleError&) {
        rec.refit_fallback = true;
      }
    }
    for (const Loss loss : cfg.losses) rec.losses.push_back(loss_value(loss, estimate, truth.pdf, cfg.quad));
    out.push_back(std::move(rec));
  }
  return out;
}

RiskReport run_experiment(const ExperimentConfig& cfg, const Progress& progress) {
  cfg.validate();
  struct Job {
    const BenchmarkDensity* truth;
    FamilyTag family;
    int n;
    int replicate;
  };
  std::vector<Job> jobs;
  for (const auto& label : cfg.densities) {
    const BenchmarkDensity& truth = builtin_density(label);
    for (const FamilyTag family : cfg.families) {
      for (const int n : cfg.sizes) {
        for (int r = 0; r < cfg.replicates; ++r) jobs.push_back({&truth, family, n, r});
      }
    }
  }

  using Result = std::variant<std::vector<RunRecord>, std::string>;
  std::vector<Result> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      try {
        results[k] = run_replicate(cfg, *job.truth, job.family, job.n, job.replicate);
      } catch (const std::exception& e) {
        results[k] = std::string(e.what());
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, jobs.size());
      }
    }
  };

  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RiskReport report;
  report.config = cfg;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (auto* runs = std::get_if<std::vector<RunRecord>>(&results[k])) {
      for (auto& r : *runs) report.runs.push_back(std::move(r));
    } else {
      const Job& job = jobs[k];
      report.failures.push_back(
          {job.truth->label, job.family, job.n, job.replicate, std::get<std::string>(results[k])});
    }
  }
  return report;
}

double empirical_risk(const std::vector<double>& losses) {
  if (losses.empty()) throw std::invalid_argument("empirical_risk needs at least one loss");
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(losses.size());
}

LogRatio normalized_log2_ratio(double r1, double r2, Loss loss) {
  if (r1 < 0.0 || r2 < 0.0 || std::isnan(r1) || std::isnan(r2)) {
    throw std::invalid_argument("risks must be non-negative");
  }
  const double r = loss == Loss::l1 ? 1.0 : 2.0;
  if (r1 == 0.0 || r2 == 0.0) {
    if (r1 == r2) return {0.0, true};
    return {r1 == 0.0 ? -kInf : kInf, true};
  }
  return {std::log2(r1 / r2) / r, false};
}

double complexity_slope(const std::vector<std::pair<Eigen::Index, double>>& samples) {
  std::set<Eigen::Index> distinct;
  for (const auto& [m, _] : samples) {
    if (m < 2) throw std::invalid_argument("complexity_slope needs M >= 2");
    distinct.insert(m);
  }
  if (distinct.size() < 3) throw std::invalid_argument("complexity_slope needs at least three distinct M");
  Eigen::MatrixXd design(static_cast<Eigen::Index>(samples.size()), 2);
  Eigen::VectorXd y(design.rows());
  for (Eigen::Index k = 0; k < design.rows(); ++k) {
    const auto& [m, log_n] = samples[static_cast<std::size_t>(k)];
    design(k, 0) = 1.0;
    design(k, 1) = std::log(static_cast<double>(m - 1));
    y(k) = log_n;
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);
  return coef(1);
}

double type1_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // tolerance keeps q n that are integers in exact arithmetic from rounding up
  const auto pos = static_cast<std::size_t>(std::max(0.0, std::ceil(q * n - 1e-9)));
  return values[std::min(pos, values.size() - 1)];
}

namespace {

bool test_based(Method m) { return m == Method::exact || m == Method::approx || m == Method::brute; }

}  // namespace

std::vector<CellRisk> cell_risks(const RiskReport& report) {
  using Key = std::tuple<std::string, int, int, int, std::size_t>;  // density, family, n, method, loss
  std::map<Key, std::vector<double>> groups;
  std::vector<Key> order;
  for (const auto& run : report.runs) {
    for (std::size_t l = 0; l < run.losses.size(); ++l) {
      const Key key{run.density, static_cast<int>(run.family), run.n, static_cast<int>(run.method), l};
      auto [it, inserted] = groups.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.push_back(run.losses[l]);
    }
  }
  std::vector<CellRisk> out;
  for (const auto& key : order) {
    const auto& losses = groups[key];
    CellRisk c;
    c.density = std::get<0>(key);
    c.family = static_cast<FamilyTag>(std::get<1>(key));
    c.n = std::get<2>(key);
    c.method = static_cast<Method>(std::get<3>(key));
    c.loss = report.config.losses[std::get<4>(key)];
    c.risk = empirical_risk(losses);
    c.replicates = losses.size();
    out.push_back(c);
  }
  return out;
}

std::vector<RiskRatio> risk_ratios(const RiskReport& report, Method baseline) {
  const std::vector<CellRisk> cells = cell_risks(report);
  std::vector<RiskRatio> out;
  for (const auto& base : cells) {
    if (base.method != baseline) continue;
    for (const auto& other : cells) {
      if (other.method == baseline || other.density != base.density || other.family != base.family ||
          other.n != base.n || other.loss != base.loss) {
        continue;
      }
      out.push_back({other.density, other.family, other.n, other.method, other.loss,
                     normalized_log2_ratio(other.risk, base.risk, other.loss)});
    }
  }
  return out;
}

std::vector<ComplexitySummary> complexity_summaries(const RiskReport& report) {
  using Key = std::tuple<int, int, int>;  // family, n, method
  std::map<Key, std::vector<double>> groups;
  for (const auto& run : report.runs) {
    if (!test_based(run.method)) continue;
    groups[{static_cast<int>(run.family), run.n, static_cast<int>(run.method)}].push_back(run.complexity);
  }
  std::vector<ComplexitySummary> out;
  for (const auto& [key, ratios] : groups) {
    ComplexitySummary s;
    s.family = static_cast<FamilyTag>(std::get<0>(key));
    s.n = std::get<1>(key);
    s.method = static_cast<Method>(std::get<2>(key));
    s.count = ratios.size();
    s.median = type1_quantile(ratios, 0.5);
    for (std::size_t q = 0; q < kComplexityLevels.size(); ++q) s.quantiles[q] = type1_quantile(ratios, kComplexityLevels[q]);
    out.push_back(s);
  }
  return out;
}

std::vector<SlopeEntry> complexity_slopes(const std::vector<RunRecord>& runs) {
  using Key = std::tuple<std::string, int, int>;  // density, family, method
  std::map<Key, std::map<Eigen::Index, std::vector<double>>> groups;
  for (const auto& run : runs) {
    if (!test_based(run.method) || run.members < 2 || run.tests_used == 0) continue;
    groups[{run.density, static_cast<int>(run.family), static_cast<int>(run.method)}][run.members].push_back(
        std::log(static_cast<double>(run.tests_used)));
  }
  std::vector<SlopeEntry> out;
  for (const auto& [key, by_m] : groups) {
    SlopeEntry e;
    e.density = std::get<0>(key);
    e.family = static_cast<FamilyTag>(std::get<1>(key));
    e.method = static_cast<Method>(std::get<2>(key));
    e.distinct_sizes = by_m.size();
    if (by_m.size() >= 3) {
      std::vector<std::pair<Eigen::Index, double>> samples;
      for (const auto& [m, logs] : by_m) samples.emplace_back(m, empirical_risk(logs));
      e.slope = complexity_slope(samples);
    }
    out.push_back(e);
  }
  return out;
}

OracleCheck oracle_check(const RiskReport& report) {
  using Key = std::tuple<std::string, int, int, int>;
  std::map<Key, const RunRecord*> exact;
  std::map<Key, const RunRecord*> brute;
  for (const auto& run : report.runs) {
    const Key key{run.density, static_cast<int>(run.family), run.n, run.replicate};
    if (run.method == Method::exact) exact[key] = &run;
    if (run.method == Method::brute) brute[key] = &run;
  }
  OracleCheck check;
  for (const auto& [key, e] : exact) {
    const auto it = brute.find(key);
    if (it == brute.end()) continue;
    ++check.compared;
    if (e->criterion != it->second->criterion || e->chosen != it->second->chosen) ++check.disagreements;
  }
  return check;
}

}  // namespace tho
