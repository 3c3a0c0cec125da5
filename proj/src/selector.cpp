#include "tho/selector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tho {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

void check_start(const PairwiseTester& tester, Eigen::Index start) {
  if (start < 0 || start >= tester.size()) throw std::out_of_range("start index out of range");
}

void finish(SelectionOutcome& out, const PairwiseTester& tester) {
  out.tests_used = tester.tests_used();
  out.complexity = complexity_ratio(out.tests_used, tester.size());
}

// Index of the member of J farthest from m; lowest index on ties.
Eigen::Index farthest(const std::vector<char>& in_j, Eigen::Index m, const PairwiseTester& tester) {
  Eigen::Index best = -1;
  double best_d = -1.0;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(in_j.size()); ++k) {
    if (!in_j[static_cast<std::size_t>(k)]) continue;
    const double d = tester.distance(k, m);
    if (d > best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

bool any(const std::vector<char>& v) {
  for (char c : v) {
    if (c) return true;
  }
  return false;
}

// Shared driver for the exact and the approximate search; delta < 0 means exact.
SelectionOutcome ball_search(PairwiseTester& tester, Eigen::Index start, double delta, Method method) {
  check_start(tester, start);
  const Eigen::Index M = tester.size();
  SelectionOutcome out;
  out.method = method;
  out.delta = std::max(delta, 0.0);

  Eigen::Index m = start;
  double D = crit_D(m, tester);
  out.trace.push_back({m, D});

  auto admissible = [&](Eigen::Index center, Eigen::Index k, double radius) {
    const double d = tester.distance(center, k);
    return d <= radius && (delta < 0.0 || d > delta);
  };

  std::vector<char> in_j(static_cast<std::size_t>(M), 0);
  for (Eigen::Index k = 0; k < M; ++k) {
    if (k != m && admissible(m, k, D)) in_j[static_cast<std::size_t>(k)] = 1;
  }

  std::vector<Eigen::Index> examined;
  while (any(in_j)) {
    const Eigen::Index j = farthest(in_j, m, tester);
    in_j[static_cast<std::size_t>(j)] = 0;

    double d_tmp = 0.0;
    bool broke = false;
    examined.assign(1, j);
    for (Eigen::Index k = 0; k < M && !broke; ++k) {
      if (k == j) continue;
      if (delta >= 0.0) {
        bool close = false;
        for (Eigen::Index t : examined) {
          if (tester.distance(k, t) <= delta) {
            close = true;
            break;
          }
        }
        if (close) continue;
        examined.push_back(k);
      }
      const PairDecision dec = tester.decide(k, j);
      if (dec.winner == k) {
        d_tmp = std::max(d_tmp, dec.distance);
        if (d_tmp > D) broke = true;
      }
    }
    if (broke) continue;  // j is worse than the running point; never installed

    for (Eigen::Index k = 0; k < M; ++k) {
      if (in_j[static_cast<std::size_t>(k)] && !admissible(j, k, d_tmp)) in_j[static_cast<std::size_t>(k)] = 0;
    }
    if (d_tmp < D) {
      m = j;
      D = d_tmp;
      out.trace.push_back({m, D});
    } else if (d_tmp == D && j < m) {
      m = j;
    }
  }

  out.chosen = m;
  out.criterion = D;
  finish(out, tester);
  return out;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::exact: return "exact";
    case Method::approx: return "approx";
    case Method::brute: return "brute";
    case Method::ls: return "ls";
    case Method::kl: return "kl";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "exact") return Method::exact;
  if (name == "approx") return Method::approx;
  if (name == "brute") return Method::brute;
  if (name == "ls") return Method::ls;
  if (name == "kl") return Method::kl;
  throw std::invalid_argument("unknown method: " + name);
}

double complexity_ratio(std::size_t tests, Eigen::Index members) {
  if (members <= 2) return 0.0;
  const double n = static_cast<double>(tests);
  const double m = static_cast<double>(members);
  return 2.0 * (n - m + 1.0) / ((m - 1.0) * (m - 2.0));
}

double crit_D(Eigen::Index m, PairwiseTester& tester) {
  double d = 0.0;
  for (Eigen::Index j = 0; j < tester.size(); ++j) {
    if (j == m) continue;
    const PairDecision dec = tester.decide(m, j);
    if (dec.winner == j) d = std::max(d, dec.distance);
  }
  return d;
}

SelectionOutcome brute_force_select(PairwiseTester& tester) {
  const Eigen::Index M = tester.size();
  Eigen::VectorXd D = Eigen::VectorXd::Zero(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (Eigen::Index j = i + 1; j < M; ++j) {
      const PairDecision dec = tester.decide(i, j);
      const Eigen::Index loser = dec.winner == i ? j : i;
      D(loser) = std::max(D(loser), dec.distance);
    }
  }
  SelectionOutcome out;
  out.method = Method::brute;
  D.minCoeff(&out.chosen);  // first minimum
  out.criterion = D(out.chosen);
  out.trace.push_back({out.chosen, out.criterion});
  finish(out, tester);
  return out;
}

SelectionOutcome exact_select(PairwiseTester& tester, Eigen::Index start) {
  return ball_search(tester, start, -1.0, Method::exact);
}

SelectionOutcome approx_select(PairwiseTester& tester, Eigen::Index start, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("approx threshold scale must be positive");
  const double delta = c / std::sqrt(static_cast<double>(tester.validation().size()));
  return ball_search(tester, start, delta, Method::approx);
}

Eigen::VectorXd ho_criteria(const CandidateSet& candidates, const Eigen::MatrixXd& values, Contrast contrast) {
  if (values.cols() != candidates.size() || values.rows() == 0) {
    throw std::invalid_argument("ho_criteria: value matrix does not match the candidate set");
  }
  const double nv = static_cast<double>(values.rows());
  Eigen::VectorXd crit(candidates.size());
  for (Eigen::Index m = 0; m < candidates.size(); ++m) {
    if (contrast == Contrast::ls) {
      const double norm = candidates.sq_l2_norm(m);
      crit(m) = std::isfinite(norm) ? norm - 2.0 * values.col(m).sum() / nv : kInfinity;
    } else {
      double sum = 0.0;
      for (Eigen::Index k = 0; k < values.rows() && std::isfinite(sum); ++k) {
        const double v = values(k, m);
        sum = v > 0.0 ? sum + std::log(v) : -kInfinity;
      }
      crit(m) = -sum / nv;
    }
  }
  return crit;
}

SelectionOutcome classical_ho_select(const CandidateSet& candidates, const Eigen::MatrixXd& values,
                                     Contrast contrast) {
  SelectionOutcome out;
  out.method = contrast == Contrast::ls ? Method::ls : Method::kl;
  Eigen::VectorXd crit = ho_criteria(candidates, values, contrast);
  if (contrast == Contrast::kl && !(crit.array() < kInfinity).any()) {
    out.fallback = true;
    crit = ho_criteria(candidates, values, Contrast::ls);
  }
  out.chosen = 0;
  for (Eigen::Index m = 1; m < crit.size(); ++m) {
    if (crit(m) < crit(out.chosen)) out.chosen = m;
  }
  out.criterion = crit(out.chosen);
  out.trace.push_back({out.chosen, out.criterion});
  return out;
}

SelectionOutcome classical_ho_select(const CandidateSet& candidates, const Eigen::VectorXd& validation,
                                     Contrast contrast) {
  if (validation.size() == 0) throw std::invalid_argument("validation sample must not be empty");
  Eigen::MatrixXd values(validation.size(), candidates.size());
  for (Eigen::Index m = 0; m < candidates.size(); ++m) values.col(m) = candidates.density(m).eval(validation);
  return classical_ho_select(candidates, values, contrast);
}

}  // namespace tho
