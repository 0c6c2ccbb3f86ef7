#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dilemma/exact_solver.hpp"
#include "dilemma/game.hpp"
#include "dilemma/strategy.hpp"

namespace dilemma {

/// Reported when a self-best-response has its smallest strict preference
/// below this margin.
inline constexpr double kNearBoundaryMargin = 1e-6;

struct EquilibriumMember {
  DeterministicStrategy strategy;
  std::string name;
  double margin = 0.0;  // min over states of |q(C,s) - q(D,s)|
};

struct NearBoundary {
  DeterministicStrategy strategy;
  double margin = 0.0;
  bool tie = false;  // excluded because the best response is ambiguous
};

struct EquilibriumReport {
  PDGame game;
  std::vector<EquilibriumMember> equilibria;  // in case order
  std::vector<NearBoundary> near_boundary;

  bool contains(DeterministicStrategy s) const;
  std::vector<DeterministicStrategy> strategies() const;
};

/// A strategy s belongs to the set when the best response to an opponent
/// playing s is exactly s, with no tied state.
EquilibriumReport symmetric_equilibria(const PDGame& game);

struct MembershipTransition {
  DeterministicStrategy strategy;
  bool joins = true;  // true: absent below, present above
  double lower = 0.0;
  double upper = 0.0;
};

struct ScanResult {
  std::vector<std::pair<double, EquilibriumReport>> reports;
  std::vector<MembershipTransition> transitions;
};

inline constexpr double kBracketWidth = 1e-6;

/// Equilibrium sets along a sorted grid of discount factors in [0,1), using
/// the payoffs of `payoffs` (its own gamma is ignored). Every change of
/// membership between adjacent grid points is bisected to kBracketWidth.
ScanResult equilibrium_scan(const PDGame& payoffs, std::span<const double> gamma_grid);

struct DynamicsStep {
  int game_index = 0;  // n = 1, 2, ...
  int learner = 1;     // 1 for odd n, 2 for even n
  DeterministicStrategy learned;
  std::vector<StateProfile> ties;
};

struct DynamicsCycle {
  int first_game = 0;  // game after which the repeated pair first appeared
  int length = 0;      // in games
};

struct DynamicsTrace {
  std::vector<DynamicsStep> steps;
  std::optional<std::pair<DeterministicStrategy, DeterministicStrategy>> fixed_point;
  std::optional<DynamicsCycle> cycle;
  bool halted_on_tie = false;
};

/// Exact alternating best responses: player 1 answers player 2's current
/// strategy in odd games, player 2 answers player 1 in even games. Stops on
/// a fixed point (an update that changes nothing), a repeated strategy
/// pair, a tied best response, or after max_games.
DynamicsTrace alternating_dynamics(const PDGame& game, DeterministicStrategy initial_p2, int max_games);

}  // namespace dilemma
