#include "dilemma/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace dilemma {

bool EquilibriumReport::contains(DeterministicStrategy s) const {
  return std::any_of(equilibria.begin(), equilibria.end(), [s](const auto& m) { return m.strategy == s; });
}

std::vector<DeterministicStrategy> EquilibriumReport::strategies() const {
  std::vector<DeterministicStrategy> out;
  for (const auto& m : equilibria) out.push_back(m.strategy);
  return out;
}

namespace {

BestResponseResult respond_to(const PDGame& game, DeterministicStrategy opponent_own_frame) {
  return best_response(game, swap_perspective(opponent_own_frame).to_memory_one());
}

double min_abs_margin(const GreedyPolicy& p) {
  double m = std::abs(p.margins[0]);
  for (double x : p.margins) m = std::min(m, std::abs(x));
  return m;
}

}  // namespace

EquilibriumReport symmetric_equilibria(const PDGame& game) {
  EquilibriumReport report{game, {}, {}};
  for (const auto& entry : catalog()) {
    const auto br = respond_to(game, entry.strategy);
    const double margin = min_abs_margin(br.policy);
    if (!br.tie_states.empty()) {
      // Ambiguous only if s agrees with the response off the tied states.
      bool compatible = true;
      for (StateProfile s : kStates) {
        const bool tied = std::find(br.tie_states.begin(), br.tie_states.end(), s) != br.tie_states.end();
        if (!tied && br.policy.choice.action(s) != entry.strategy.action(s)) compatible = false;
      }
      if (compatible) report.near_boundary.push_back({entry.strategy, margin, true});
      continue;
    }
    if (br.policy.choice != entry.strategy) continue;
    report.equilibria.push_back({entry.strategy, display_name(entry.strategy), margin});
    if (margin < kNearBoundaryMargin) report.near_boundary.push_back({entry.strategy, margin, false});
  }
  return report;
}

ScanResult equilibrium_scan(const PDGame& payoffs, std::span<const double> gamma_grid) {
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    const double g = gamma_grid[i];
    if (!(g >= 0.0 && g < 1.0)) throw std::invalid_argument("gamma grid values must lie in [0, 1)");
    if (i > 0 && !(g > gamma_grid[i - 1])) throw std::invalid_argument("gamma grid must be strictly increasing");
  }
  ScanResult out;
  for (double g : gamma_grid) out.reports.emplace_back(g, symmetric_equilibria(payoffs.with_gamma(g)));

  auto member = [&](DeterministicStrategy s, double g) { return symmetric_equilibria(payoffs.with_gamma(g)).contains(s); };

  for (std::size_t i = 1; i < out.reports.size(); ++i) {
    const auto& [g0, before] = out.reports[i - 1];
    const auto& [g1, after] = out.reports[i];
    for (const auto& entry : catalog()) {
      const bool was = before.contains(entry.strategy);
      const bool is = after.contains(entry.strategy);
      if (was == is) continue;
      double lo = g0, hi = g1;
      while (hi - lo > kBracketWidth) {
        const double mid = 0.5 * (lo + hi);
        if (member(entry.strategy, mid) == was) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      out.transitions.push_back({entry.strategy, is, lo, hi});
    }
  }
  return out;
}

DynamicsTrace alternating_dynamics(const PDGame& game, DeterministicStrategy initial_p2, int max_games) {
  if (max_games < 1) throw std::invalid_argument("max_games must be at least 1");
  DynamicsTrace trace;
  std::optional<DeterministicStrategy> p1;
  DeterministicStrategy p2 = initial_p2;
  // (player 1, player 2, next learner) -> game after which it was seen
  std::map<std::tuple<int, int, int>, int> seen;

  for (int n = 1; n <= max_games; ++n) {
    const int learner = n % 2 == 1 ? 1 : 2;
    const DeterministicStrategy other = learner == 1 ? p2 : *p1;
    const auto br = respond_to(game, other);
    trace.steps.push_back({n, learner, br.policy.choice, br.tie_states});
    if (!br.tie_states.empty()) {
      trace.halted_on_tie = true;
      break;
    }
    const std::optional<DeterministicStrategy> previous = learner == 1 ? p1 : std::optional(p2);
    // An unchanged update means each side is a best response to the other.
    const bool unchanged = previous && *previous == br.policy.choice;
    if (learner == 1) {
      p1 = br.policy.choice;
    } else {
      p2 = br.policy.choice;
    }
    if (unchanged) {
      trace.fixed_point = std::pair(*p1, p2);
      break;
    }
    const auto key = std::tuple(p1->code(), p2.code(), learner == 1 ? 2 : 1);
    if (auto it = seen.find(key); it != seen.end()) {
      trace.cycle = DynamicsCycle{it->second, n - it->second};
      break;
    }
    seen.emplace(key, n);
  }
  return trace;
}

}  // namespace dilemma
