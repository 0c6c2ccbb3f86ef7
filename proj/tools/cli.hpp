#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dilemma/qlearning.hpp"

namespace dilemma::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidArgs = 2,
  kExitBoundary = 3,
  kExitIo = 4,
};

/// Runs the command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::array<double, 4> parse_payoffs(std::string_view text);  // "R,S,T,P"
std::vector<double> parse_gamma_grid(std::string_view text);  // "a:b:step", both ends inclusive

/// --seed wins, then DILEMMA_SEED, then zero.
std::uint64_t resolve_seed(const std::string& flag_value);

/// Expected number of visits to each (action, state) pair over `steps`
/// rounds when an epsilon-greedy learner follows `policy` against
/// `opponent` (learner frame) from `start`. Indexed like QTable.
std::array<double, 8> expected_visits(DeterministicStrategy policy, const MemoryOneStrategy& opponent, double epsilon,
                                      StateProfile start, long steps);

inline constexpr double kPersistentVisits = 1000.0;

struct ReproduceOptions {
  std::filesystem::path out_dir = "reproduce";
  std::uint64_t seed = 0;
  bool quick = false;
  long steps = 0;  // 0 keeps the learner default
};

struct ManifestEntry {
  std::string file;
  std::string description;
};

/// Writes the verdict table, six learning traces and manifest.csv into
/// options.out_dir. Returns the manifest rows, one per data file.
std::vector<ManifestEntry> reproduce(const ReproduceOptions& options, std::ostream& log);

inline constexpr const char* kManifestHeader = "file,description";
inline constexpr const char* kTableHeader = "case,bits,name,condition,gamma,consistent,onset_lower,onset_upper";

}  // namespace dilemma::cli
