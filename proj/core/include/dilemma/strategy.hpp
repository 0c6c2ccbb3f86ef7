#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dilemma/game.hpp"

namespace dilemma {

class ProbabilityOutOfRange : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw, so the
/// stream of values is identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Probability of cooperating after each joint state. Stored in the owner's
/// own frame: index CD means "I played C, my opponent played D".
class MemoryOneStrategy {
 public:
  MemoryOneStrategy() = default;
  explicit MemoryOneStrategy(std::array<double, 4> coop_prob);

  double coop(StateProfile s) const noexcept { return coop_[index(s)]; }
  const std::array<double, 4>& coop_probs() const noexcept { return coop_; }
  bool is_deterministic() const noexcept;

  /// "1001" for deterministic strategies, otherwise four comma-separated decimals.
  std::string to_string() const;

  friend bool operator==(const MemoryOneStrategy&, const MemoryOneStrategy&) = default;

 private:
  std::array<double, 4> coop_{};
};

/// A pure memory-one strategy; bit k is 1 when the strategy cooperates after
/// joint state k (order CC, CD, DC, DD).
class DeterministicStrategy {
 public:
  constexpr DeterministicStrategy() = default;
  constexpr DeterministicStrategy(bool cc, bool cd, bool dc, bool dd) noexcept
      : code_(static_cast<std::uint8_t>(cc << 3 | cd << 2 | dc << 1 | dd)) {}

  /// Pattern as a 4-bit number with CC in the most significant bit, so
  /// "1001" is 9. Throws std::invalid_argument outside 0..15.
  static DeterministicStrategy from_code(int code);
  /// Parses exactly four characters over {0,1}.
  static DeterministicStrategy from_bits(std::string_view bits);

  constexpr int code() const noexcept { return code_; }
  constexpr bool cooperates(StateProfile s) const noexcept { return (code_ >> (3 - index(s))) & 1U; }
  constexpr Action action(StateProfile s) const noexcept { return cooperates(s) ? Action::C : Action::D; }

  DeterministicStrategy with(StateProfile s, Action a) const noexcept;

  std::string bits() const;
  MemoryOneStrategy to_memory_one() const;

  friend constexpr bool operator==(DeterministicStrategy, DeterministicStrategy) = default;
  friend constexpr auto operator<=>(DeterministicStrategy, DeterministicStrategy) = default;

 private:
  std::uint8_t code_ = 0;
};

namespace strategies {
inline constexpr DeterministicStrategy kAllC{true, true, true, true};
inline constexpr DeterministicStrategy kAllD{false, false, false, false};
inline constexpr DeterministicStrategy kTft{true, false, true, false};
inline constexpr DeterministicStrategy kAtft{false, true, false, true};
inline constexpr DeterministicStrategy kWsls{true, false, false, true};
inline constexpr DeterministicStrategy kAwsls{false, true, true, false};
inline constexpr DeterministicStrategy kGrim{true, false, false, false};
inline constexpr DeterministicStrategy kAntiGrim{false, true, true, true};
inline constexpr DeterministicStrategy kRepeat{true, true, false, false};
inline constexpr DeterministicStrategy kAntiRepeat{false, false, true, true};
}  // namespace strategies

struct StrategyCatalogEntry {
  int case_id;
  DeterministicStrategy strategy;
  std::optional<std::string> name;
};

/// All sixteen deterministic strategies ordered by case number. Case n has
/// pattern code 16 - n, so case 1 is All-C and case 16 is All-D.
const std::vector<StrategyCatalogEntry>& catalog();

const StrategyCatalogEntry& catalog_entry(int case_id);
const StrategyCatalogEntry& catalog_entry(DeterministicStrategy s);

/// Conventional name when one exists, otherwise the bit string.
std::string display_name(DeterministicStrategy s);

/// Command-line spelling (ALLC, WSLS, ...) or a 4-bit string.
struct NamedSelector {
  std::string_view key;
  DeterministicStrategy strategy;
};
const std::vector<NamedSelector>& strategy_selectors();

/// Resolves a selector name (case-insensitive) or a bit string. Throws
/// std::invalid_argument listing the valid names on failure.
DeterministicStrategy parse_deterministic(std::string_view text);

/// Accepts everything parse_deterministic does plus four comma-separated
/// probabilities.
MemoryOneStrategy parse_strategy(std::string_view text);

/// Re-expresses a strategy in the other player's indexing: the entries for
/// CD and DC are exchanged. Applying it twice is the identity.
MemoryOneStrategy swap_perspective(const MemoryOneStrategy& strategy);
DeterministicStrategy swap_perspective(DeterministicStrategy strategy);

/// A strategy whose intended action is replaced by the opposite one with
/// probability error_prob.
class NoisyStrategy {
 public:
  NoisyStrategy(MemoryOneStrategy base, double error_prob);

  const MemoryOneStrategy& base() const noexcept { return base_; }
  double error_prob() const noexcept { return error_; }

  /// (1 - e) p + e (1 - p) per state.
  MemoryOneStrategy effective() const;

 private:
  MemoryOneStrategy base_;
  double error_;
};

NoisyStrategy apply_noise(const MemoryOneStrategy& strategy, double error_prob);

Action sample_action(const MemoryOneStrategy& strategy, StateProfile state, Rng& rng);

}  // namespace dilemma
