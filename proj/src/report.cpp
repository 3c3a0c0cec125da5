#include "tho/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

namespace tho {

using nlohmann::json;

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T, typename F>
std::vector<T> parse_list(const json& j, const char* key, F convert) {
  std::vector<T> out;
  const json& v = j.at(key);
  if (!v.is_array()) throw std::invalid_argument(std::string("config: ") + key + " must be a list");
  for (const auto& e : v) out.push_back(convert(e));
  return out;
}

}  // namespace

void write_runs_csv(std::ostream& out, const RiskReport& report) {
  const ExperimentConfig& cfg = report.config;
  const bool birge = cfg.test == TestKind::Variant::birge;
  out << kRunsCsvHeader << '\n';
  for (const auto& run : report.runs) {
    for (std::size_t l = 0; l < run.losses.size(); ++l) {
      out << run.density << ',' << to_string(run.family) << ',' << run.n << ',' << format_real(cfg.p) << ','
          << (birge ? format_real(cfg.theta) : "") << ',' << (birge ? "birge" : "baraud") << ','
          << to_string(run.method) << ',' << (run.method == Method::approx ? format_real(cfg.c) : "") << ','
          << to_string(cfg.last) << ',' << run.replicate << ',' << to_string(cfg.losses[l]) << ','
          << format_real(run.losses[l]) << ',' << run.tests_used << ',' << format_real(run.complexity) << ','
          << format_real(run.wall_ms) << ',' << run.seed << '\n';
    }
  }
}

json summary_json(const RiskReport& report) {
  json s;
  s["config"] = config_to_json(report.config);
  s["runs"] = report.runs.size();

  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"density", f.density},
                        {"family", to_string(f.family)},
                        {"n", f.n},
                        {"replicate", f.replicate},
                        {"message", f.message}});
  }
  s["failures"] = failures;

  json cells = json::array();
  for (const auto& c : cell_risks(report)) {
    cells.push_back({{"density", c.density},
                     {"family", to_string(c.family)},
                     {"n", c.n},
                     {"method", to_string(c.method)},
                     {"loss", to_string(c.loss)},
                     {"risk", number_or_null(c.risk)},
                     {"replicates", c.replicates}});
  }
  s["cells"] = cells;

  json ratios = json::array();
  for (const auto& r : risk_ratios(report, report.config.baseline)) {
    ratios.push_back({{"density", r.density},
                      {"family", to_string(r.family)},
                      {"n", r.n},
                      {"method", to_string(r.method)},
                      {"loss", to_string(r.loss)},
                      {"value", number_or_null(r.ratio.value)},
                      {"sentinel", r.ratio.sentinel}});
  }
  s["risk_ratios"] = {{"baseline", to_string(report.config.baseline)}, {"entries", ratios}};

  json complexity = json::array();
  for (const auto& c : complexity_summaries(report)) {
    complexity.push_back({{"family", to_string(c.family)},
                          {"n", c.n},
                          {"method", to_string(c.method)},
                          {"count", c.count},
                          {"median", c.median},
                          {"q75", c.quantiles[0]},
                          {"q90", c.quantiles[1]},
                          {"q95", c.quantiles[2]}});
  }
  s["complexity"] = complexity;

  json slopes = json::array();
  for (const auto& e : complexity_slopes(report.runs)) {
    slopes.push_back({{"density", e.density},
                      {"family", to_string(e.family)},
                      {"method", to_string(e.method)},
                      {"distinct_sizes", e.distinct_sizes},
                      {"beta", e.slope ? json(*e.slope) : json(nullptr)}});
  }
  s["slopes"] = slopes;

  const OracleCheck check = oracle_check(report);
  s["oracle_check"] = {{"compared", check.compared}, {"disagreements", check.disagreements}};
  return s;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  static const std::set<std::string> known{"densities", "families", "n",    "p",        "test",
                                           "theta",     "methods",  "c",    "replicates", "losses",
                                           "last",      "seed",     "baseline", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("config: unknown key " + key);
  }
  ExperimentConfig cfg;
  try {
    auto str = [](const json& e) { return e.get<std::string>(); };
    cfg.densities = parse_list<std::string>(j, "densities", str);
    if (j.contains("families")) {
      cfg.families = parse_list<FamilyTag>(j, "families", [&](const json& e) { return family_from_string(str(e)); });
    }
    if (j.contains("n")) cfg.sizes = parse_list<int>(j, "n", [](const json& e) { return e.get<int>(); });
    if (j.contains("p")) cfg.p = j.at("p").get<double>();
    if (j.contains("test")) cfg.test = test_variant_from_string(j.at("test").get<std::string>());
    if (j.contains("theta")) cfg.theta = j.at("theta").get<double>();
    if (j.contains("methods")) {
      cfg.methods = parse_list<Method>(j, "methods", [&](const json& e) { return method_from_string(str(e)); });
    }
    if (j.contains("c")) cfg.c = j.at("c").get<double>();
    if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<int>();
    if (j.contains("losses")) {
      cfg.losses = parse_list<Loss>(j, "losses", [&](const json& e) { return loss_from_string(str(e)); });
    }
    if (j.contains("last")) cfg.last = last_from_string(j.at("last").get<std::string>());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("baseline")) cfg.baseline = method_from_string(j.at("baseline").get<std::string>());
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json families = json::array();
  for (auto f : cfg.families) families.push_back(to_string(f));
  json methods = json::array();
  for (auto m : cfg.methods) methods.push_back(to_string(m));
  json losses = json::array();
  for (auto l : cfg.losses) losses.push_back(to_string(l));
  return {{"densities", cfg.densities},
          {"families", families},
          {"n", cfg.sizes},
          {"p", cfg.p},
          {"test", cfg.test == TestKind::Variant::birge ? "birge" : "baraud"},
          {"theta", cfg.theta},
          {"methods", methods},
          {"c", cfg.c},
          {"replicates", cfg.replicates},
          {"losses", losses},
          {"last", to_string(cfg.last)},
          {"seed", cfg.seed},
          {"baseline", to_string(cfg.baseline)}};
}

}  // namespace tho
