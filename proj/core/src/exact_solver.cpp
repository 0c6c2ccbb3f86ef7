#include "dilemma/exact_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace dilemma {

double QTable::max_at(StateProfile s) const noexcept {
  return std::max((*this)(Action::C, s), (*this)(Action::D, s));
}

double max_abs_diff(const QTable& a, const QTable& b) noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

GreedyPolicy greedy_policy(const QTable& q, double tie_tolerance) {
  GreedyPolicy g;
  for (StateProfile s : kStates) {
    const double m = q.margin(s);
    g.margins[index(s)] = m;
    if (std::abs(m) <= tie_tolerance) g.ties.push_back(s);
    g.choice = g.choice.with(s, m > tie_tolerance ? Action::C : Action::D);
  }
  return g;
}

namespace {

double opponent_prob(const MemoryOneStrategy& opponent, StateProfile s, Action b) {
  const double c = opponent.coop(s);
  return b == Action::C ? c : 1.0 - c;
}

}  // namespace

QTable policy_evaluation(const PDGame& game, DeterministicStrategy own, const MemoryOneStrategy& opponent) {
  // Q(a,s) - gamma * sum_b p(b|s) Q(own(s'), s') = sum_b p(b|s) r(a,b), s' = (a,b).
  Eigen::Matrix<double, 8, 8> A = Eigen::Matrix<double, 8, 8>::Identity();
  Eigen::Matrix<double, 8, 1> rhs = Eigen::Matrix<double, 8, 1>::Zero();
  for (Action a : kActions) {
    for (StateProfile s : kStates) {
      const auto row = static_cast<Eigen::Index>(QTable::flat(a, s));
      for (Action b : kActions) {
        const double p = opponent_prob(opponent, s, b);
        if (p == 0.0) continue;
        const StateProfile next = make_state(a, b);
        rhs(row) += p * payoff(game, 1, next);
        A(row, static_cast<Eigen::Index>(QTable::flat(own.action(next), next))) -= game.gamma() * p;
      }
    }
  }
  const Eigen::PartialPivLU<Eigen::Matrix<double, 8, 8>> lu(A);
  const Eigen::Matrix<double, 8, 1> x = lu.solve(rhs);
  QTable q;
  for (std::size_t i = 0; i < 8; ++i) {
    q.values[i] = x(static_cast<Eigen::Index>(i));
    if (!std::isfinite(q.values[i])) throw SolveFailure("policy evaluation produced a non-finite value");
  }
  return q;
}

QTable bellman_optimality_operator(const PDGame& game, const MemoryOneStrategy& opponent, const QTable& q) {
  QTable out;
  for (Action a : kActions) {
    for (StateProfile s : kStates) {
      double v = 0.0;
      for (Action b : kActions) {
        const double p = opponent_prob(opponent, s, b);
        if (p == 0.0) continue;
        const StateProfile next = make_state(a, b);
        v += p * (payoff(game, 1, next) + game.gamma() * q.max_at(next));
      }
      out(a, s) = v;
    }
  }
  return out;
}

double bellman_residual(const PDGame& game, const MemoryOneStrategy& opponent, const QTable& q) {
  return max_abs_diff(q, bellman_optimality_operator(game, opponent, q));
}

BestResponseResult best_response(const PDGame& game, const MemoryOneStrategy& opponent) {
  BestResponseResult result;
  DeterministicStrategy policy = strategies::kAllD;
  std::array<bool, 16> seen{};
  while (true) {
    if (seen[static_cast<std::size_t>(policy.code())]) {
      throw CycleDetected("policy iteration revisited " + policy.bits());
    }
    seen[static_cast<std::size_t>(policy.code())] = true;
    const QTable q = policy_evaluation(game, policy, opponent);
    ++result.iterations;

    // Only switch a state when the other action is strictly better;
    // otherwise keep the current choice so the iteration cannot oscillate.
    DeterministicStrategy improved = policy;
    for (StateProfile s : kStates) {
      const Action current = policy.action(s);
      const Action other = flip(current);
      if (q(other, s) - q(current, s) > kTieTolerance) improved = improved.with(s, other);
    }
    if (improved == policy) {
      result.q_star = q;
      result.policy = greedy_policy(q);
      result.tie_states = result.policy.ties;
      return result;
    }
    policy = improved;
  }
}

QTable value_iteration(const PDGame& game, const MemoryOneStrategy& opponent, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("value iteration tolerance must be positive");
  const double gamma = game.gamma();
  QTable q;
  if (gamma == 0.0) return bellman_optimality_operator(game, opponent, q);
  // ||q_{k+1} - q*|| <= gamma/(1-gamma) ||q_{k+1} - q_k||
  const double stop = tol * (1.0 - gamma) / (2.0 * gamma);
  for (int it = 0; it < max_iter; ++it) {
    const QTable next = bellman_optimality_operator(game, opponent, q);
    const double delta = max_abs_diff(next, q);
    q = next;
    if (delta < stop) return q;
  }
  throw NoConvergence(max_iter);
}

}  // namespace dilemma
