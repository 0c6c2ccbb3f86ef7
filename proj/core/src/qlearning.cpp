#include "dilemma/qlearning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

namespace dilemma {

void LearnerConfig::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("learning rate must lie in (0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (!std::isfinite(initial_q)) throw std::invalid_argument("initial Q must be finite");
  if (steps_per_phase < 1) throw std::invalid_argument("steps per phase must be at least 1");
  if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
  if (sample_every < 1) throw std::invalid_argument("sample interval must be at least 1");
  if (stop && (!(stop->threshold > 0.0) || stop->window < 1)) {
    throw std::invalid_argument("convergence stop needs a positive threshold and window");
  }
}

EnvStreams EnvStreams::derive(std::uint64_t seed, std::uint64_t phase, std::uint64_t realization) {
  auto make = [&](std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(phase), static_cast<std::uint32_t>(realization),
                      static_cast<std::uint32_t>(realization >> 32), tag};
    return Rng(seq);
  };
  return EnvStreams{make(1), make(2), make(3)};
}

QTable q_update(const QTable& q, StateProfile state, Action action, double reward, StateProfile next_state, double eta,
                double gamma) {
  QTable out = q;
  double& entry = out(action, state);
  entry += eta * (reward + gamma * q.max_at(next_state) - entry);
  return out;
}

Action epsilon_greedy(const QTable& q, StateProfile state, double epsilon, Rng& rng, TieBreak tie) {
  if (uniform01(rng) < epsilon) return uniform01(rng) < 0.5 ? Action::C : Action::D;
  const double c = q(Action::C, state), d = q(Action::D, state);
  if (c == d) {
    if (tie == TieBreak::Cooperate) return Action::C;
    return uniform01(rng) < 0.5 ? Action::C : Action::D;
  }
  return c > d ? Action::C : Action::D;
}

std::vector<long> sample_times(const LearnerConfig& config) {
  std::vector<long> t;
  for (long k = 0; k <= config.steps_per_phase; k += config.sample_every) t.push_back(k);
  if (t.back() != config.steps_per_phase) t.push_back(config.steps_per_phase);
  return t;
}

PhaseRun learn_phase(const PDGame& game, const NoisyStrategy& opponent, const LearnerConfig& config,
                     const QTable& initial_q, StateProfile initial_state, EnvStreams& streams) {
  const std::vector<long> times = sample_times(config);
  PhaseRun run;
  run.q = initial_q;
  run.samples.reserve(times.size());
  run.samples.push_back(run.q);
  std::size_t next_sample = 1;

  const double gamma = game.gamma();
  const double error = opponent.error_prob();
  const MemoryOneStrategy& base = opponent.base();
  StateProfile state = initial_state;
  long quiet = 0;
  long t = 0;
  while (t < config.steps_per_phase) {
    const Action mine = epsilon_greedy(run.q, state, config.epsilon, streams.exploration, config.tie_break);
    Action theirs = sample_action(base, state, streams.opponent);
    if (error > 0.0 && uniform01(streams.noise) < error) theirs = flip(theirs);
    const StateProfile next = make_state(mine, theirs);

    double& entry = run.q(mine, state);
    const double delta = config.eta * (payoff(game, 1, next) + gamma * run.q.max_at(next) - entry);
    entry += delta;
    state = next;
    ++t;

    if (next_sample < times.size() && t == times[next_sample]) {
      run.samples.push_back(run.q);
      ++next_sample;
    }
    if (config.stop) {
      quiet = std::abs(delta) < config.stop->threshold ? quiet + 1 : 0;
      if (quiet >= config.stop->window) break;
    }
  }
  run.steps_run = t;
  while (run.samples.size() < times.size()) run.samples.push_back(run.q);
  return run;
}

DeterministicStrategy learned_policy(const QTable& q) { return greedy_policy(q, 0.0).choice; }

DeterministicStrategy LearningTrace::modal_policy() const {
  int best = 0;
  for (int code = 1; code < 16; ++code) {
    // ties go to the lower case number, i.e. the higher code
    if (tally[static_cast<std::size_t>(code)] >= tally[static_cast<std::size_t>(best)]) best = code;
  }
  return DeterministicStrategy::from_code(best);
}

int LearningTrace::total() const {
  int n = 0;
  for (int c : tally) n += c;
  return n;
}

namespace {

constexpr int kBlockSize = 16;

struct BlockResult {
  std::vector<QTable> sums;
  std::vector<QTable> finals;
};

// Realizations are summed within fixed blocks and blocks are reduced in
// order, so the floating-point result is independent of scheduling.
LearningTrace run_realizations(const PDGame& game, const NoisyStrategy& opponent, const LearnerConfig& config,
                               std::uint64_t phase, const std::vector<QTable>* initial_tables,
                               std::vector<QTable>* final_tables) {
  config.validate();
  const std::vector<long> times = sample_times(config);
  const int n = config.realizations;
  const int blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<BlockResult> results(static_cast<std::size_t>(blocks));

  auto run_block = [&](int b) {
    BlockResult& out = results[static_cast<std::size_t>(b)];
    out.sums.assign(times.size(), QTable{});
    const int first = b * kBlockSize;
    const int last = std::min(n, first + kBlockSize);
    for (int r = first; r < last; ++r) {
      EnvStreams streams = EnvStreams::derive(config.seed, phase, static_cast<std::uint64_t>(r));
      const StateProfile start =
          config.initial_state ? *config.initial_state : static_cast<StateProfile>(streams.opponent() % 4);
      const QTable init =
          initial_tables ? (*initial_tables)[static_cast<std::size_t>(r)] : QTable::filled(config.initial_q);
      const PhaseRun run = learn_phase(game, opponent, config, init, start, streams);
      for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t k = 0; k < 8; ++k) out.sums[i].values[k] += run.samples[i].values[k];
      }
      out.finals.push_back(run.q);
    }
  };

  const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(blocks));
  if (workers <= 1) {
    for (int b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int b = next++; b < blocks; b = next++) run_block(b);
      });
    }
  }

  LearningTrace trace;
  trace.times = times;
  trace.mean_q.assign(times.size(), QTable{});
  if (final_tables) final_tables->clear();
  for (const auto& block : results) {
    for (std::size_t i = 0; i < times.size(); ++i) {
      for (std::size_t k = 0; k < 8; ++k) trace.mean_q[i].values[k] += block.sums[i].values[k];
    }
    for (const QTable& q : block.finals) {
      ++trace.tally[static_cast<std::size_t>(learned_policy(q).code())];
      if (final_tables) final_tables->push_back(q);
    }
  }
  for (auto& q : trace.mean_q) {
    for (double& v : q.values) v /= static_cast<double>(n);
  }
  return trace;
}

}  // namespace

LearningTrace run_learning(const PDGame& game, const NoisyStrategy& opponent, const LearnerConfig& config,
                           std::uint64_t phase) {
  return run_realizations(game, opponent, config, phase, nullptr, nullptr);
}

std::vector<PhaseOutcome> alternating_qlearning(const PDGame& game, DeterministicStrategy initial_p2,
                                                const LearnerConfig& config, int num_phases, double opponent_noise) {
  if (num_phases < 1) throw std::invalid_argument("number of phases must be at least 1");
  config.validate();
  std::array<DeterministicStrategy, 2> current{strategies::kAllD, initial_p2};
  std::array<std::vector<QTable>, 2> tables;
  std::vector<PhaseOutcome> out;
  for (int phase = 1; phase <= num_phases; ++phase) {
    const int learner = phase % 2 == 1 ? 1 : 2;
    const std::size_t me = static_cast<std::size_t>(learner - 1);
    const DeterministicStrategy frozen = current[1 - me];
    const NoisyStrategy opponent(swap_perspective(frozen).to_memory_one(), opponent_noise);
    const bool carry = config.carry_q && !tables[me].empty();
    std::vector<QTable> finals;
    LearningTrace trace = run_realizations(game, opponent, config, static_cast<std::uint64_t>(phase),
                                           carry ? &tables[me] : nullptr, config.carry_q ? &finals : nullptr);
    if (config.carry_q) tables[me] = std::move(finals);
    current[me] = trace.modal_policy();
    out.push_back({phase, learner, frozen, current[me], std::move(trace)});
  }
  return out;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_trace_csv(std::ostream& os, const LearningTrace& trace) {
  os << kTraceHeader << '\n';
  for (std::size_t i = 0; i < trace.times.size() && i < trace.mean_q.size(); ++i) {
    os << trace.times[i];
    for (double v : trace.mean_q[i].values) os << ',' << format_value(v);
    os << '\n';
  }
}

void write_tally_csv(std::ostream& os, const PolicyTally& tally) {
  os << kTallyHeader << '\n';
  for (const auto& entry : catalog()) {
    os << entry.strategy.bits() << ',' << tally[static_cast<std::size_t>(entry.strategy.code())] << '\n';
  }
}

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
  writer(os);
  os.flush();
  if (!os) throw IoFailure("failed writing " + path.string());
}

}  // namespace

void export_trace(const LearningTrace& trace, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& os) { write_trace_csv(os, trace); });
}

void export_tally(const PolicyTally& tally, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& os) { write_tally_csv(os, tally); });
}

}  // namespace dilemma
