#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dilemma/game.hpp"
#include "dilemma/strategy.hpp"

namespace dilemma {

/// Action values Q(own action, previous joint state). Flat index is
/// 4 * action + state, which gives the q1..q8 order
/// (C,CC) (C,CD) (C,DC) (C,DD) (D,CC) (D,CD) (D,DC) (D,DD).
struct QTable {
  std::array<double, 8> values{};

  static constexpr std::size_t flat(Action a, StateProfile s) noexcept { return 4 * index(a) + index(s); }

  double& operator()(Action a, StateProfile s) noexcept { return values[flat(a, s)]; }
  double operator()(Action a, StateProfile s) const noexcept { return values[flat(a, s)]; }

  /// One-based alias: q(1) is (C,CC), q(8) is (D,DD).
  double q(int k) const { return values.at(static_cast<std::size_t>(k - 1)); }

  double margin(StateProfile s) const noexcept { return (*this)(Action::C, s) - (*this)(Action::D, s); }
  double max_at(StateProfile s) const noexcept;

  static QTable filled(double v) noexcept {
    QTable t;
    t.values.fill(v);
    return t;
  }

  friend bool operator==(const QTable&, const QTable&) = default;
};

double max_abs_diff(const QTable& a, const QTable& b) noexcept;

/// Absolute tolerance under which q(C,s) and q(D,s) count as tied.
inline constexpr double kTieTolerance = 1e-9;

struct GreedyPolicy {
  DeterministicStrategy choice;
  std::array<double, 4> margins{};  // q(C,s) - q(D,s)
  std::vector<StateProfile> ties;
};

/// Greedy policy for a table; ties within kTieTolerance resolve to D and
/// are listed.
GreedyPolicy greedy_policy(const QTable& q, double tie_tolerance = kTieTolerance);

struct BestResponseResult {
  GreedyPolicy policy;
  QTable q_star;
  std::vector<StateProfile> tie_states;
  int iterations = 0;  // number of policy evaluations
};

class SolveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class CycleDetected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NoConvergence : public std::runtime_error {
 public:
  explicit NoConvergence(int max_iter)
      : std::runtime_error("value iteration did not converge in " + std::to_string(max_iter) + " sweeps"),
        max_iter_(max_iter) {}
  int max_iter() const noexcept { return max_iter_; }

 private:
  int max_iter_;
};

// The opponent argument of every function below is the opponent's
// probability of cooperating indexed by the learner's joint state
// (learner action, opponent action). For a catalog strategy s held by the
// opponent, pass swap_perspective(s).

/// Action values of following `own` forever against `opponent`; the
/// unique solution of the 8x8 linear Bellman system.
QTable policy_evaluation(const PDGame& game, DeterministicStrategy own, const MemoryOneStrategy& opponent);

/// Optimal action values and a deterministic optimal policy, by policy
/// iteration over the 16 deterministic policies starting from All-D.
BestResponseResult best_response(const PDGame& game, const MemoryOneStrategy& opponent);

/// Iterates the Bellman optimality operator from the zero table until the
/// true error is at most `tol`.
QTable value_iteration(const PDGame& game, const MemoryOneStrategy& opponent, double tol, int max_iter = 100000);

/// One application of the Bellman optimality operator.
QTable bellman_optimality_operator(const PDGame& game, const MemoryOneStrategy& opponent, const QTable& q);

/// Sup-norm of q - B(q).
double bellman_residual(const PDGame& game, const MemoryOneStrategy& opponent, const QTable& q);

}  // namespace dilemma
