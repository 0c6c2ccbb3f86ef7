#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "dilemma/exact_solver.hpp"
#include "dilemma/game.hpp"
#include "dilemma/strategy.hpp"

namespace dilemma {

// Analytic solutions of the symmetric Bellman optimality system: for each
// of the sixteen deterministic strategies s, the action values a learner
// gets by playing s against an opponent who also plays s, and whether s is
// then greedy with respect to its own values.

/// Eight closed-form action values for case `case_id` (1..16).
QTable case_q(const PDGame& game, int case_id);

enum class ConsistencyKind {
  Never,        // the sign pattern contradicts the game definition
  MeasureZero,  // only attainable on an equality, never under strict inequalities
  Region,       // holds on an open region of (payoffs, gamma)
  Always,
};

struct CaseCondition {
  ConsistencyKind kind;
  std::string description;
};

/// How the consistency region of a case is characterized.
const CaseCondition& case_condition(int case_id);

struct CaseVerdict {
  int case_id = 0;
  QTable q;
  bool consistent = false;
  /// For pair k (q_k vs q_{k+4}): the sign the case requires (+1 means
  /// q_k > q_{k+4}) and the observed difference q_k - q_{k+4}.
  std::array<int, 4> required_sign{};
  std::array<double, 4> observed_diff{};
  std::vector<int> failing_pairs;  // 1-based pair numbers
  std::string condition_desc;
};

/// Evaluates the case's four strict sign conditions on case_q.
CaseVerdict case_consistent(const PDGame& game, int case_id);

/// The same verdict predicted directly from the region formulas (payoff
/// inequalities and gamma thresholds), without evaluating any q values.
bool predicted_consistency(const PDGame& game, int case_id);

/// Threshold on gamma above which Case 7 (WSLS) is consistent, (T-R)/(R-P).
double wsls_threshold(const PDGame& game);
/// Threshold on gamma above which Case 8 (Grim) is consistent, (T-R)/(T-P).
double grim_threshold(const PDGame& game);

enum class FixedOpponent { TFT, WSLS, Grim };

std::string to_string(FixedOpponent opp);
DeterministicStrategy strategy_of(FixedOpponent opp);

struct GammaInterval {
  double lower = 0.0;
  double upper = 1.0;
  std::string lower_expr = "0";
  std::string upper_expr = "1";

  bool contains(double gamma) const noexcept { return gamma > lower && gamma < upper; }
};

struct BestResponseRegion {
  FixedOpponent opponent;
  std::string id;                 // e.g. "tft-5"
  std::string payoff_condition;   // e.g. "T+S>R+P"
  GammaInterval gamma_interval;
  DeterministicStrategy response;  // learner's own frame
  QTable q;                        // closed forms evaluated at the game
};

class BoundaryGamma : public std::domain_error {
 public:
  BoundaryGamma(const std::string& what, double threshold) : std::domain_error(what), threshold_(threshold) {}
  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

/// Distance under which gamma counts as sitting on a region boundary.
inline constexpr double kBoundaryTolerance = 1e-12;

/// All regions for `opp` whose payoff condition holds for this game, with
/// q formulas evaluated at game.gamma(). Their gamma intervals partition
/// (0,1) up to the listed endpoints.
std::vector<BestResponseRegion> regions_for(FixedOpponent opp, const PDGame& game);

/// The region containing game.gamma(). Throws BoundaryGamma when gamma is
/// within kBoundaryTolerance of an interior threshold.
BestResponseRegion best_response_region(FixedOpponent opp, const PDGame& game);

}  // namespace dilemma
