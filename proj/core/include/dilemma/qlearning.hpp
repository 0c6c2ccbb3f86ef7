#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dilemma/exact_solver.hpp"
#include "dilemma/game.hpp"
#include "dilemma/strategy.hpp"

namespace dilemma {

/// Stop a realization early once no update has moved an entry by more than
/// `threshold` for `window` consecutive steps.
struct ConvergenceStop {
  double threshold = 1e-3;
  long window = 10000;
};

// How epsilon_greedy resolves an exact tie between q(C,s) and q(D,s).
enum class TieBreak { Cooperate, Random };

struct LearnerConfig {
  double eta = 0.2;
  double epsilon = 0.01;
  double initial_q = 0.0;
  long steps_per_phase = 1000000;
  int realizations = 1000;
  std::uint64_t seed = 0;
  long sample_every = 100;
  /// Start each alternating phase from the learner's table of its previous
  /// phase instead of re-initializing to initial_q.
  bool carry_q = false;
  TieBreak tie_break = TieBreak::Cooperate;
  std::optional<StateProfile> initial_state = StateProfile::CC;  // nullopt: uniform draw per realization
  std::optional<ConvergenceStop> stop;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// The three independent random streams owned by one realization.
struct EnvStreams {
  Rng exploration;
  Rng opponent;
  Rng noise;

  /// Reproducible from (seed, phase, realization); streams differ by tag.
  static EnvStreams derive(std::uint64_t seed, std::uint64_t phase, std::uint64_t realization);
};

/// One tabular Q-learning step on entry (action, state).
QTable q_update(const QTable& q, StateProfile state, Action action, double reward, StateProfile next_state, double eta,
                double gamma);

/// Uniform action with probability epsilon, otherwise the greedy action;
/// an exact tie between q(C,s) and q(D,s) is broken uniformly at random.
Action epsilon_greedy(const QTable& q, StateProfile state, double epsilon, Rng& rng,
                      TieBreak tie = TieBreak::Cooperate);

/// Step indices at which a phase records its table: 0, k, 2k, ... and the
/// final step.
std::vector<long> sample_times(const LearnerConfig& config);

struct PhaseRun {
  QTable q;
  std::vector<QTable> samples;  // aligned with sample_times(config)
  long steps_run = 0;           // < steps_per_phase when stopped early
};

/// One realization of learning against a fixed opponent. The opponent's
/// conditionals are indexed by the learner's joint state; its intended
/// action is flipped with the noise probability.
PhaseRun learn_phase(const PDGame& game, const NoisyStrategy& opponent, const LearnerConfig& config,
                     const QTable& initial_q, StateProfile initial_state, EnvStreams& streams);

using PolicyTally = std::array<int, 16>;  // indexed by DeterministicStrategy::code()

struct LearningTrace {
  std::vector<long> times;
  std::vector<QTable> mean_q;  // mean over realizations at each time
  PolicyTally tally{};         // final greedy policy per realization

  const QTable& final_mean() const { return mean_q.back(); }
  DeterministicStrategy modal_policy() const;
  int total() const;
};

/// Greedy policy of a learned table; exact ties resolve to D.
DeterministicStrategy learned_policy(const QTable& q);

/// Runs config.realizations independent realizations against `opponent`
/// (learner's joint frame) and averages them. Each realization starts from
/// a uniformly drawn previous state. Output does not depend on the number
/// of worker threads.
LearningTrace run_learning(const PDGame& game, const NoisyStrategy& opponent, const LearnerConfig& config,
                           std::uint64_t phase = 0);

struct PhaseOutcome {
  int phase = 0;
  int learner = 1;
  DeterministicStrategy opponent;  // frozen strategy, opponent's own frame
  DeterministicStrategy greedy;    // modal learned policy, learner's own frame
  LearningTrace trace;
};

/// Alternating protocol: odd phases train player 1 against player 2's
/// frozen strategy, even phases the reverse. After each phase the learner
/// is frozen to its modal greedy policy. `opponent_noise` is applied to the
/// frozen side in every phase.
std::vector<PhaseOutcome> alternating_qlearning(const PDGame& game, DeterministicStrategy initial_p2,
                                                const LearnerConfig& config, int num_phases,
                                                double opponent_noise = 0.0);

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTraceHeader = "t,qCCC,qCCD,qCDC,qCDD,qDCC,qDCD,qDDC,qDDD";
inline constexpr const char* kTallyHeader = "strategy_bits,count";

void write_trace_csv(std::ostream& os, const LearningTrace& trace);
void write_tally_csv(std::ostream& os, const PolicyTally& tally);

void export_trace(const LearningTrace& trace, const std::filesystem::path& path);
void export_tally(const PolicyTally& tally, const std::filesystem::path& path);

/// Formats a value with 12 significant digits, as used by every CSV.
std::string format_value(double v);

}  // namespace dilemma
