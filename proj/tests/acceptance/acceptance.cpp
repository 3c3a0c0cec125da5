// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Pass criterion numbers as arguments to run a subset.

#include "cli.hpp"
#include "tho/bench.hpp"
#include "tho/metric.hpp"
#include "tho/report.hpp"
#include "tho/robust_tests.hpp"
#include "tho/sample_split.hpp"
#include "tho/selector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

using namespace tho;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool report(int id, const std::string& title, bool ok, const std::string& detail) {
  std::cout << "criterion " << id << " (" << title << "): " << (ok ? "PASS" : "FAIL") << " - " << detail << std::endl;
  return ok;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

const std::vector<std::string>& suite_labels() {
  static const std::vector<std::string> labels = [] {
    std::vector<std::string> out;
    for (const auto& d : builtin_densities()) out.push_back(d.label);
    return out;
  }();
  return labels;
}

Histogram random_histogram(Rng& rng, double lo, double hi, int max_bins) {
  const int bins = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_bins)));
  std::vector<double> inner;
  for (int k = 0; k < bins - 1; ++k) inner.push_back(lo + (hi - lo) * rng.uniform());
  std::sort(inner.begin(), inner.end());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  Eigen::VectorXd breaks(static_cast<Eigen::Index>(inner.size()) + 2);
  breaks(0) = lo;
  for (std::size_t k = 0; k < inner.size(); ++k) breaks(static_cast<Eigen::Index>(k) + 1) = inner[k];
  breaks(breaks.size() - 1) = hi;
  Eigen::VectorXd masses(breaks.size() - 1);
  for (Eigen::Index k = 0; k < masses.size(); ++k) masses(k) = 0.05 + rng.uniform();
  masses /= masses.sum();
  return Histogram(breaks, masses);
}

Eigen::VectorXd normal_sample(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

// Random member of the mixed pool: histogram, kernel or parametric fit.
Density random_density(Rng& rng) {
  switch (rng.below(3)) {
    case 0: return Density(random_histogram(rng, -3.0 - rng.uniform(), 3.0 + rng.uniform(), 8));
    case 1: return Density(KernelEstimate(normal_sample(rng, 30), 0.15 + rng.uniform()));
    default: return Density(ParametricEstimate(ParametricFamily::gaussian, rng.normal() * 0.5, 0.6 + rng.uniform()));
  }
}

Density as_reference(const Histogram& h) {
  return Density(ReferenceDensity{"wrapped", [h](double x) { return h.eval(x); }, h.support(), h.hints(), true});
}

// Sampled subset of one of S_R, S_K or the mixed S_2 family, keeping the family order.
std::vector<Candidate> random_instance_members(Rng& rng, const Eigen::VectorXd& training, int kind) {
  const FamilyTag tag = kind == 0 ? FamilyTag::SR : kind == 1 ? FamilyTag::SK : FamilyTag::S2;
  std::vector<Candidate> pool = build_candidates(tag, training);
  const std::size_t want = 3 + rng.below(38);
  if (pool.size() <= want) return pool;
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t k = idx.size() - 1; k > 0; --k) std::swap(idx[k], idx[rng.below(k + 1)]);
  idx.resize(want);
  std::sort(idx.begin(), idx.end());
  std::vector<Candidate> out;
  for (std::size_t k : idx) out.push_back(pool[k]);
  return out;
}

// Criteria 1, 2 and 3 share one randomized sweep.
struct SweepResult {
  int instances = 0;
  int criterion_equal = 0;
  int unique_argmin = 0;
  int unique_agree = 0;
  int containment_violations = 0;
  int bound_violations = 0;
  int runs_checked = 0;
  int min_members = 1 << 30;
  int max_members = 0;
  double seconds = 0.0;
};

SweepResult oracle_sweep(int instances) {
  SweepResult r;
  const auto t0 = Clock::now();
  Rng rng(20240601);
  const auto& suite = builtin_densities();
  for (int inst = 0; inst < instances; ++inst) {
    const BenchmarkDensity& truth = suite[rng.below(suite.size())];
    const int n = 60 + static_cast<int>(rng.below(341));
    const Eigen::VectorXd x = truth.sample(n, rng);
    const SampleSplit split = split_sample(x, 0.5, rng.next());
    std::vector<Candidate> members = random_instance_members(rng, split.training, inst % 3);
    if (members.size() < 3) {
      --inst;
      continue;
    }
    const CandidateSet set(std::move(members));
    const Eigen::Index m = set.size();
    const TestKind kind = inst % 2 == 0 ? TestKind::birge(0.05 + 0.4 * rng.uniform()) : TestKind::baraud();
    const Eigen::Index start = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));

    PairwiseTester brute_tester(set, split.validation, kind);
    const SelectionOutcome brute = brute_force_select(brute_tester);
    PairwiseTester exact_tester(set, split.validation, kind);
    const SelectionOutcome exact = exact_select(exact_tester, start);
    PairwiseTester approx_tester(set, split.validation, kind);
    const SelectionOutcome approx = approx_select(approx_tester, start, 1.0);

    ++r.instances;
    r.min_members = std::min<int>(r.min_members, static_cast<int>(m));
    r.max_members = std::max<int>(r.max_members, static_cast<int>(m));
    if (exact.criterion == brute.criterion) ++r.criterion_equal;

    Eigen::VectorXd crit(m);
    for (Eigen::Index k = 0; k < m; ++k) crit(k) = crit_D(k, brute_tester);
    const double best = crit.minCoeff();
    if ((crit.array() == best).count() == 1) {
      ++r.unique_argmin;
      if (exact.chosen == brute.chosen) ++r.unique_agree;
    }
    for (Eigen::Index k = 0; k < m; ++k) {
      if (set.hellinger(exact.chosen, k) > crit(k) + 1e-12) ++r.containment_violations;
    }
    const auto lo = static_cast<std::size_t>(m - 1);
    const auto hi = static_cast<std::size_t>(m * (m - 1) / 2);
    for (const SelectionOutcome* o : {&exact, &approx, &brute}) {
      ++r.runs_checked;
      if (o->tests_used < lo || o->tests_used > hi) ++r.bound_violations;
    }
  }
  r.seconds = seconds_since(t0);
  return r;
}

bool criterion_1_2_3(const std::set<int>& wanted) {
  const SweepResult s = oracle_sweep(500);
  bool ok = true;
  if (wanted.count(1)) {
    const bool pass = s.criterion_equal == s.instances && s.unique_agree == s.unique_argmin && s.instances >= 500 &&
                      s.seconds <= 300.0;
    ok &= report(1, "oracle equivalence", pass,
                 std::to_string(s.criterion_equal) + "/" + std::to_string(s.instances) + " equal D, " +
                     std::to_string(s.unique_agree) + "/" + std::to_string(s.unique_argmin) +
                     " unique-argmin choices agree, M in [" + std::to_string(s.min_members) + ", " +
                     std::to_string(s.max_members) + "], " + fmt(s.seconds) + " s");
  }
  if (wanted.count(2)) {
    ok &= report(2, "ball containment", s.containment_violations == 0,
                 std::to_string(s.containment_violations) + " violations over " + std::to_string(s.instances) + " instances");
  }
  if (wanted.count(3)) {
    const bool ends = complexity_ratio(9, 10) == 0.0 && complexity_ratio(45, 10) == 1.0 &&
                      complexity_ratio(39, 40) == 0.0 && complexity_ratio(780, 40) == 1.0;
    ok &= report(3, "test-count bounds", s.bound_violations == 0 && ends,
                 std::to_string(s.bound_violations) + " out-of-bound runs over " + std::to_string(s.runs_checked) +
                     ", ratio end points " + (ends ? "exact" : "wrong"));
  }
  return ok;
}

bool criterion_4() {
  Rng rng(4242);
  const double uniform_pair = hellinger_sq(Density(ParametricEstimate(ParametricFamily::uniform, 0.0, 1.0)),
                                           Density(ParametricEstimate(ParametricFamily::uniform, 0.0, 2.0)));
  const double uniform_err = std::abs(uniform_pair - (1.0 - 1.0 / std::sqrt(2.0)));

  double closed_err = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double shift = 2.0 * rng.uniform() - 1.0;
    const Histogram f = random_histogram(rng, -1.0, 1.0 + rng.uniform(), 10);
    const Histogram g = random_histogram(rng, -1.5 + shift, 1.5 + shift, 10);
    closed_err = std::max(closed_err, std::abs(hellinger_sq(f, g) - hellinger_sq(as_reference(f), as_reference(g))));
  }

  bool symmetric = true;
  double triangle_excess = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Density a = random_density(rng);
    const Density b = random_density(rng);
    const Density c = random_density(rng);
    const double ab = hellinger_sq(a, b);
    symmetric &= ab == hellinger_sq(b, a);
    const double h_ab = std::sqrt(ab);
    const double h_bc = std::sqrt(hellinger_sq(b, c));
    const double h_ac = std::sqrt(hellinger_sq(a, c));
    triangle_excess = std::max({triangle_excess, h_ac - h_ab - h_bc, h_ab - h_ac - h_bc, h_bc - h_ab - h_ac});
  }
  const bool pass = uniform_err <= 1e-8 && closed_err <= 1e-8 && symmetric && triangle_excess <= 1e-6;
  return report(4, "metric correctness", pass,
                "uniform pair error " + fmt(uniform_err) + ", closed form vs quadrature max error " + fmt(closed_err) +
                    " on 200 pairs, symmetry " + (symmetric ? "exact" : "broken") +
                    ", worst triangle excess " + fmt(triangle_excess) + " on 200 triples");
}

bool criterion_5() {
  Rng rng(555);
  int pairs = 0;
  int agree = 0;
  int attempts = 0;
  while (pairs < 100 && attempts < 10000) {
    ++attempts;
    std::vector<Candidate> members{{random_density(rng), "a", {}}, {random_density(rng), "b", {}}};
    const CandidateSet set(members);
    const Eigen::VectorXd xv = normal_sample(rng, 20 + static_cast<Eigen::Index>(rng.below(60)));
    const double l0 = log_likelihood(set.density(0), xv);
    const double l1 = log_likelihood(set.density(1), xv);
    if (!std::isfinite(l0) || !std::isfinite(l1) || l0 == l1 || set.hellinger_sq(0, 1) == 0.0) continue;
    ++pairs;
    PairwiseTester tester(set, xv, TestKind::birge_likelihood_ratio());
    const Eigen::Index expected = l0 > l1 ? 0 : 1;
    if (tester.decide(0, 1).winner == expected) ++agree;
  }
  return report(5, "theta = 0 reduction", pairs == 100 && agree == pairs,
                std::to_string(agree) + "/" + std::to_string(pairs) + " pairs follow the likelihood ordering");
}

bool criterion_6() {
  Rng rng(666);
  double worst_birge = 0.0;
  double worst_baraud = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Density f = random_density(rng);
    const Density g = random_density(rng);
    const Eigen::VectorXd xv = normal_sample(rng, 10 + static_cast<Eigen::Index>(rng.below(100)));
    const double h2 = hellinger_sq(f, g);
    const double theta = 0.05 + 0.4 * rng.uniform();
    worst_birge = std::max(worst_birge,
                           std::abs(birge_statistic(f, g, xv, theta, h2) + birge_statistic(g, f, xv, theta, h2)));
    worst_baraud = std::max(worst_baraud, std::abs(baraud_statistic(f, g, xv) + baraud_statistic(g, f, xv)));
  }
  return report(6, "antisymmetry", worst_birge <= 1e-12 && worst_baraud <= 1e-12,
                "max |T(i,j) + T(j,i)| birge " + fmt(worst_birge) + ", baraud " + fmt(worst_baraud) +
                    " on 200 pairs");
}

ExperimentConfig suite_config(FamilyTag family, std::vector<int> sizes, std::vector<Method> methods) {
  ExperimentConfig cfg;
  cfg.densities = suite_labels();
  cfg.families = {family};
  cfg.sizes = std::move(sizes);
  cfg.methods = std::move(methods);
  cfg.replicates = 25;
  cfg.losses = {Loss::hellinger2};
  cfg.seed = 7;
  return cfg;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool criterion_7_8(const std::set<int>& wanted) {
  const auto t0 = Clock::now();
  const RiskReport rep =
      run_experiment(suite_config(FamilyTag::SR, {100, 250, 500, 1000}, {Method::exact, Method::approx}));
  const double secs = seconds_since(t0);
  bool ok = true;

  if (wanted.count(7)) {
    int in_range = 0;
    int densities = 0;
    std::string betas;
    for (const auto& e : complexity_slopes(rep.runs)) {
      if (e.method != Method::exact) continue;
      ++densities;
      const bool good = e.slope && *e.slope >= 1.0 && *e.slope <= 1.8;
      in_range += good;
      betas += " " + e.density + "=" + (e.slope ? fmt(*e.slope, 3) : std::string("none"));
    }
    int small = 0;
    int total = 0;
    for (const auto& r : rep.runs) {
      if (r.method != Method::exact || r.n < 250) continue;
      ++total;
      small += r.complexity < 0.15;
    }
    const double frac_beta = densities ? static_cast<double>(in_range) / densities : 0.0;
    const double frac_small = total ? static_cast<double>(small) / total : 0.0;
    const bool pass = densities == static_cast<int>(suite_labels().size()) && frac_beta >= 0.8 &&
                      frac_small >= 0.7 && rep.failures.empty() && secs <= 1800.0;
    ok &= report(7, "complexity behaviour", pass,
                 std::to_string(in_range) + "/" + std::to_string(densities) + " slopes in [1, 1.8] (" + betas +
                     " ), " + fmt(100.0 * frac_small, 3) + "% of ratios below 0.15 for n >= 250, " +
                     std::to_string(rep.failures.size()) + " failed replicates, " + fmt(secs) + " s");
  }

  if (wanted.count(8)) {
    std::map<std::tuple<std::string, int, int>, std::pair<const RunRecord*, const RunRecord*>> paired;
    for (const auto& r : rep.runs) {
      auto& slot = paired[{r.density, r.n, r.replicate}];
      (r.method == Method::exact ? slot.first : slot.second) = &r;
    }
    int more_tests = 0;
    std::vector<double> exact_ratios, approx_ratios;
    for (const auto& [key, p] : paired) {
      if (!p.first || !p.second) continue;
      more_tests += p.second->tests_used > p.first->tests_used;
      exact_ratios.push_back(p.first->complexity);
      approx_ratios.push_back(p.second->complexity);
    }
    const double med_exact = median(exact_ratios);
    const double med_approx = median(approx_ratios);
    const double reduction = med_approx > 0.0 ? med_exact / med_approx : (med_exact > 0.0 ? kInf : 1.0);

    std::map<std::pair<std::string, int>, std::pair<double, double>> risks;
    for (const auto& c : cell_risks(rep)) {
      auto& slot = risks[{c.density, c.n}];
      (c.method == Method::exact ? slot.first : slot.second) = c.risk;
    }
    std::vector<double> inflation;
    for (const auto& [key, r] : risks) inflation.push_back(r.first > 0.0 ? r.second / r.first - 1.0 : 0.0);
    const double med_inflation = median(inflation);

    std::string per_n;
    for (int n : {100, 250, 500, 1000}) {
      std::vector<double> e, a;
      for (const auto& [key, p] : paired) {
        if (std::get<1>(key) != n || !p.first || !p.second) continue;
        e.push_back(p.first->complexity);
        a.push_back(p.second->complexity);
      }
      per_n += " n=" + std::to_string(n) + ":" + fmt(median(e), 3) + "->" + fmt(median(a), 3);
    }
    const bool pass = more_tests == 0 && reduction >= 1.5 && med_inflation <= 0.25;
    ok &= report(8, "approximate search", pass,
                 std::to_string(more_tests) + " runs where approx used more tests, median ratio " +
                     fmt(med_exact, 3) + " -> " + fmt(med_approx, 3) + " (factor " + fmt(reduction, 3) +
                     "; per size" + per_n + "), median risk inflation per cell " + fmt(100.0 * med_inflation, 3) +
                     "%");
  }
  return ok;
}

bool criterion_9() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg = suite_config(FamilyTag::S1, {500}, {Method::exact, Method::kl});
  cfg.p = 2.0 / 3.0;
  const RiskReport rep = run_experiment(cfg);
  std::vector<double> w;
  std::string detail;
  for (const auto& r : risk_ratios(rep, Method::exact)) {
    if (r.method != Method::kl) continue;
    w.push_back(r.ratio.value);
    detail += " " + r.density + "=" + fmt(r.ratio.value, 3);
  }
  const double med = w.empty() ? -kInf : median(w);
  const bool pass = w.size() == suite_labels().size() && med >= -0.02;
  return report(9, "robust versus classical hold-out", pass,
                "median W(kl, exact) " + fmt(med, 4) + " over " + std::to_string(w.size()) + " densities (" + detail +
                    " ), " + std::to_string(rep.failures.size()) + " failed replicates, " + fmt(seconds_since(t0)) +
                    " s");
}

std::string csv_without_timing(const std::string& path) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = line.find(',', pos);
      cols.push_back(line.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    cols.erase(cols.begin() + 14);  // wall_ms
    for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
    out += '\n';
  }
  return out;
}

bool criterion_10() {
  const fs::path dir = fs::temp_directory_path() / "tho_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "campaign.json";
  std::ofstream(cfg) << R"({"densities": ["normal", "steps", "claw3", "exponential"], "families": ["SR", "SK", "S2"],
    "n": [100, 200], "replicates": 3, "methods": ["exact", "approx", "brute", "ls", "kl"],
    "losses": ["hellinger2", "l1", "l2"], "seed": 99})";
  std::vector<std::string> outputs;
  bool ran = true;
  for (const char* threads : {"1", "1", "4"}) {
    const std::string prefix = (dir / ("run" + std::to_string(outputs.size()))).string();
    std::ostringstream out, err;
    ran &= cli::run({"bench", "--config", cfg.string(), "--out", prefix, "--threads", threads}, out, err) == 0;
    outputs.push_back(csv_without_timing(prefix + ".csv"));
  }
  const auto rows = std::count(outputs[0].begin(), outputs[0].end(), '\n');
  const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2];
  fs::remove_all(dir);
  return report(10, "determinism", ran && same && rows > 1,
                std::to_string(rows - 1) + " rows, identical across reruns and thread counts 1/1/4: " +
                    (same ? "yes" : "no"));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.insert(std::stoi(argv[k]));
  if (wanted.empty()) {
    for (int k = 1; k <= 10; ++k) wanted.insert(k);
  }
  auto any = [&](std::initializer_list<int> ids) {
    return std::any_of(ids.begin(), ids.end(), [&](int id) { return wanted.count(id) > 0; });
  };
  bool ok = true;
  if (any({1, 2, 3})) ok &= criterion_1_2_3(wanted);
  if (wanted.count(4)) ok &= criterion_4();
  if (wanted.count(5)) ok &= criterion_5();
  if (wanted.count(6)) ok &= criterion_6();
  if (any({7, 8})) ok &= criterion_7_8(wanted);
  if (wanted.count(10)) ok &= criterion_10();
  if (wanted.count(9)) ok &= criterion_9();
  std::cout << (ok ? "all selected criteria passed" : "some criteria failed") << std::endl;
  return ok ? 0 : 1;
}
