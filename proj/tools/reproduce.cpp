#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "cli.hpp"
#include "dilemma/closed_form.hpp"
#include "dilemma/equilibrium.hpp"
#include "dilemma/exact_solver.hpp"

namespace dilemma::cli {

namespace {

struct TraceRun {
  const char* file;
  const char* opponent;
  DeterministicStrategy strategy;
  double gamma;
  double noise;
};

constexpr TraceRun kRuns[] = {
    {"wsls_g0.9.csv", "WSLS", strategies::kWsls, 0.9, 0.0},
    {"wsls_g0.2.csv", "WSLS", strategies::kWsls, 0.2, 0.0},
    {"grim_g0.9.csv", "Grim", strategies::kGrim, 0.9, 0.0},
    {"grim_g0.2.csv", "Grim", strategies::kGrim, 0.2, 0.0},
    {"grim_noise0.01_g0.9.csv", "Grim", strategies::kGrim, 0.9, 0.01},
    {"grim_noise0.01_g0.2.csv", "Grim", strategies::kGrim, 0.2, 0.01},
};

std::string fmt(const char* pattern, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// Distinct exact values, largest first, at three significant digits.
std::string target_lines(const QTable& q) {
  std::vector<std::string> seen;
  std::vector<double> values(q.values.begin(), q.values.end());
  std::sort(values.rbegin(), values.rend());
  std::string out;
  for (double v : values) {
    const std::string s = fmt("%.3g", v);
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
    seen.push_back(s);
    out += (out.empty() ? "" : " ") + s;
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
  os << text;
  os.flush();
  if (!os) throw IoFailure("failed writing " + path.string());
}

}  // namespace

std::vector<ManifestEntry> reproduce(const ReproduceOptions& options, std::ostream& log) {
  const std::filesystem::path& dir = options.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoFailure("cannot create directory " + dir.string());

  const PDGame game = validate_game(4, 0, 6, 1, 0.9);
  std::vector<ManifestEntry> entries;

  const std::vector<double> grid = parse_gamma_grid("0.01:0.99:0.01");
  const ScanResult scan = equilibrium_scan(game, grid);
  {
    std::ostringstream os;
    os << kTableHeader << '\n';
    for (const auto& e : catalog()) {
      const CaseVerdict v = case_consistent(game, e.case_id);
      os << e.case_id << ',' << e.strategy.bits() << ',' << e.name.value_or("") << ',' << v.condition_desc << ','
         << format_value(game.gamma()) << ',' << (v.consistent ? "Yes" : "No") << ',';
      const auto t = std::find_if(scan.transitions.begin(), scan.transitions.end(),
                                  [&](const MembershipTransition& m) { return m.strategy == e.strategy && m.joins; });
      if (t != scan.transitions.end()) os << format_value(t->lower) << ',' << format_value(t->upper);
      else os << ',';
      os << '\n';
    }
    write_csv(dir / "table1.csv", os.str());
  }
  entries.push_back({"table1.csv",
                     "self-consistency of the 16 memory-one cases for (R S T P)=(4 0 6 1) at gamma=0.9; "
                     "onset brackets of symmetric equilibria (WSLS 2/3 and Grim 2/5)"});
  log << "table1.csv\n";

  LearnerConfig config;
  config.seed = options.seed;
  if (options.quick) config.realizations = 100;
  if (options.steps > 0) config.steps_per_phase = options.steps;

  std::uint64_t phase = 0;
  for (const TraceRun& r : kRuns) {
    ++phase;
    const PDGame g = game.with_gamma(r.gamma);
    const NoisyStrategy opp(swap_perspective(r.strategy).to_memory_one(), r.noise);
    const LearningTrace trace = run_learning(g, opp, config, phase);
    export_trace(trace, dir / r.file);

    const QTable target = best_response(g, swap_perspective(r.strategy).to_memory_one()).q_star;
    std::string desc = std::string("mean Q of a learner against ") + r.opponent;
    if (r.noise > 0.0) desc += " with error " + fmt("%g", r.noise);
    desc += " at gamma=" + fmt("%g", r.gamma) + "; error-free exact values " + target_lines(target) +
            "; modal learned policy " + display_name(trace.modal_policy()) + " in " +
            std::to_string(trace.tally[static_cast<std::size_t>(trace.modal_policy().code())]) + " of " +
            std::to_string(trace.total());
    entries.push_back({r.file, desc});
    log << r.file << '\n';
  }

  std::string manifest = std::string(kManifestHeader) + '\n';
  for (const auto& e : entries) manifest += e.file + ',' + e.description + '\n';
  write_csv(dir / "manifest.csv", manifest);
  return entries;
}

}  // namespace dilemma::cli
