#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dilemma {

enum class Action : std::uint8_t { C = 0, D = 1 };

inline constexpr std::array<Action, 2> kActions{Action::C, Action::D};

constexpr Action flip(Action a) noexcept { return a == Action::C ? Action::D : Action::C; }
constexpr char to_char(Action a) noexcept { return a == Action::C ? 'C' : 'D'; }

/// Joint outcome of one round, always written as (player 1 action, player 2
/// action). The enumerator values are the canonical indices used by every
/// table and file format in the library.
enum class StateProfile : std::uint8_t { CC = 0, CD = 1, DC = 2, DD = 3 };

inline constexpr std::array<StateProfile, 4> kStates{StateProfile::CC, StateProfile::CD,
                                                     StateProfile::DC, StateProfile::DD};

constexpr std::size_t index(StateProfile s) noexcept { return static_cast<std::size_t>(s); }
constexpr std::size_t index(Action a) noexcept { return static_cast<std::size_t>(a); }

constexpr StateProfile make_state(Action first, Action second) noexcept {
  return static_cast<StateProfile>(index(first) * 2 + index(second));
}
constexpr Action first_action(StateProfile s) noexcept { return static_cast<Action>(index(s) / 2); }
constexpr Action second_action(StateProfile s) noexcept { return static_cast<Action>(index(s) % 2); }

/// Same outcome seen from the other seat: (a, b) -> (b, a).
constexpr StateProfile swapped(StateProfile s) noexcept {
  return make_state(second_action(s), first_action(s));
}

std::string to_string(StateProfile s);
std::string_view to_string(Action a);

class OrderingViolation : public std::invalid_argument {
 public:
  enum class Which { TemptationAboveReward, RewardAbovePunishment, PunishmentAboveSucker, CooperationBeatsAlternation };
  OrderingViolation(Which which, const std::string& what) : std::invalid_argument(what), which_(which) {}
  Which which() const noexcept { return which_; }

 private:
  Which which_;
};

class DiscountOutOfRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stage payoffs of a prisoner's dilemma plus the discount factor. Only
/// constructible through validate_game, so a PDGame always satisfies
/// T > R > P > S, 2R > T + S and 0 <= gamma < 1.
class PDGame {
 public:
  double R() const noexcept { return r_; }
  double S() const noexcept { return s_; }
  double T() const noexcept { return t_; }
  double P() const noexcept { return p_; }
  double gamma() const noexcept { return gamma_; }

  /// Copy of this game with a different discount factor (validated).
  PDGame with_gamma(double gamma) const;

  /// Largest absolute stage payoff.
  double max_abs_payoff() const noexcept;

  friend PDGame validate_game(double R, double S, double T, double P, double gamma);

 private:
  PDGame(double r, double s, double t, double p, double g) : r_(r), s_(s), t_(t), p_(p), gamma_(g) {}
  double r_, s_, t_, p_, gamma_;
};

PDGame validate_game(double R, double S, double T, double P, double gamma);

/// Stage payoff of `player` (1 or 2) for the joint outcome `state`.
double payoff(const PDGame& game, int player, StateProfile state);

class MemoryOneStrategy;

/// rows[prev][next]: probability of moving from joint state `prev` to `next`.
using TransitionMatrix = std::array<std::array<double, 4>, 4>;

/// Markov chain induced by two memory-one strategies. Both strategies are
/// given in their owner's own frame (my action, opponent action); the
/// second player's conditionals are swapped into the joint frame here.
TransitionMatrix transition_matrix(const MemoryOneStrategy& strategy1, const MemoryOneStrategy& strategy2);

}  // namespace dilemma
