#include "dilemma/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dilemma/strategy.hpp"

namespace dilemma {

std::string to_string(StateProfile s) {
  return {to_char(first_action(s)), to_char(second_action(s))};
}

std::string_view to_string(Action a) { return a == Action::C ? "C" : "D"; }

PDGame validate_game(double R, double S, double T, double P, double gamma) {
  for (double v : {R, S, T, P, gamma}) {
    if (!std::isfinite(v)) throw std::invalid_argument("game parameters must be finite");
  }
  using Which = OrderingViolation::Which;
  auto fail = [&](Which which, const char* rule) {
    std::ostringstream os;
    os << "payoffs (R,S,T,P)=(" << R << "," << S << "," << T << "," << P << ") violate " << rule;
    throw OrderingViolation(which, os.str());
  };
  if (!(T > R)) fail(Which::TemptationAboveReward, "T > R");
  if (!(R > P)) fail(Which::RewardAbovePunishment, "R > P");
  if (!(P > S)) fail(Which::PunishmentAboveSucker, "P > S");
  if (!(2 * R > T + S)) fail(Which::CooperationBeatsAlternation, "2R > T + S");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    std::ostringstream os;
    os << "discount factor " << gamma << " outside [0, 1)";
    throw DiscountOutOfRange(os.str());
  }
  return PDGame(R, S, T, P, gamma);
}

PDGame PDGame::with_gamma(double gamma) const { return validate_game(r_, s_, t_, p_, gamma); }

double PDGame::max_abs_payoff() const noexcept {
  return std::max({std::abs(r_), std::abs(s_), std::abs(t_), std::abs(p_)});
}

double payoff(const PDGame& game, int player, StateProfile state) {
  if (player != 1 && player != 2) throw std::invalid_argument("player must be 1 or 2");
  if (player == 2) state = swapped(state);
  switch (state) {
    case StateProfile::CC: return game.R();
    case StateProfile::CD: return game.S();
    case StateProfile::DC: return game.T();
    case StateProfile::DD: return game.P();
  }
  return 0.0;  // unreachable
}

TransitionMatrix transition_matrix(const MemoryOneStrategy& strategy1, const MemoryOneStrategy& strategy2) {
  TransitionMatrix m{};
  for (StateProfile prev : kStates) {
    const double c1 = strategy1.coop(prev);
    const double c2 = strategy2.coop(swapped(prev));
    for (StateProfile next : kStates) {
      const double p1 = first_action(next) == Action::C ? c1 : 1.0 - c1;
      const double p2 = second_action(next) == Action::C ? c2 : 1.0 - c2;
      m[index(prev)][index(next)] = p1 * p2;
    }
  }
  return m;
}

}  // namespace dilemma
