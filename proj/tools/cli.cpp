#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dilemma/closed_form.hpp"
#include "dilemma/equilibrium.hpp"
#include "dilemma/exact_solver.hpp"

namespace dilemma::cli {

namespace {

constexpr const char* kDefaultPayoffs = "4,0,6,1";
constexpr const char* kDefaultGrid = "0.01:0.99:0.01";

double parse_number(std::string_view text, const char* what) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("invalid ") + what + ": '" + s + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string short_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoFailure("cannot open " + path.string() + " for writing");
  writer(os);
  os.flush();
  if (!os) throw IoFailure("failed writing " + path.string());
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoFailure("cannot create directory " + dir.string());
}

PDGame make_game(const std::string& payoffs, double gamma) {
  const auto p = parse_payoffs(payoffs);
  return validate_game(p[0], p[1], p[2], p[3], gamma);
}

std::optional<DeterministicStrategy> as_deterministic(const MemoryOneStrategy& s) {
  if (!s.is_deterministic()) return std::nullopt;
  const auto& p = s.coop_probs();
  return DeterministicStrategy(p[0] == 1.0, p[1] == 1.0, p[2] == 1.0, p[3] == 1.0);
}

std::string describe(DeterministicStrategy s) {
  const std::string name = display_name(s);
  return name == s.bits() ? name : name + " (" + s.bits() + ")";
}

std::string describe(const MemoryOneStrategy& s) {
  if (const auto d = as_deterministic(s)) return describe(*d);
  return s.to_string();
}

std::string entry_label(Action a, StateProfile s) {
  return "q(" + std::string(to_string(a)) + "," + to_string(s) + ")";
}

std::optional<FixedOpponent> fixed_opponent(DeterministicStrategy s) {
  if (s == strategies::kTft) return FixedOpponent::TFT;
  if (s == strategies::kWsls) return FixedOpponent::WSLS;
  if (s == strategies::kGrim) return FixedOpponent::Grim;
  return std::nullopt;
}

std::string strategy_footer() {
  std::ostringstream os;
  os << "Strategies are given by name or as four bits in the order CC,CD,DC,DD\n"
        "(1 = cooperate), each state written as (own move, other's move) from the\n"
        "strategy owner's side. Names:\n";
  for (const auto& sel : strategy_selectors()) os << "  " << sel.key << " = " << sel.strategy.bits() << '\n';
  os << "A stochastic opponent may be given as four probabilities, e.g. 0.9,0.1,0.2,0.8.\n\n"
        "Exit codes: 0 ok, 2 invalid arguments, 3 boundary gamma under --strict,\n"
        "4 output failure. DILEMMA_SEED sets the seed when --seed is absent.\n";
  return os.str();
}

const MembershipTransition* onset_of(const ScanResult& scan, DeterministicStrategy s) {
  for (const auto& t : scan.transitions) {
    if (t.strategy == s && t.joins) return &t;
  }
  return nullptr;
}

void write_table_csv(std::ostream& os, const PDGame& game, const ScanResult& scan) {
  os << kTableHeader << '\n';
  for (const auto& e : catalog()) {
    const CaseVerdict v = case_consistent(game, e.case_id);
    os << e.case_id << ',' << e.strategy.bits() << ',' << csv_field(e.name.value_or("")) << ','
       << csv_field(v.condition_desc) << ',' << format_value(game.gamma()) << ',' << (v.consistent ? "Yes" : "No")
       << ',';
    if (const auto* t = onset_of(scan, e.strategy)) os << format_value(t->lower) << ',' << format_value(t->upper);
    else os << ',';
    os << '\n';
  }
}

struct BestResponseArgs {
  std::string payoffs = kDefaultPayoffs;
  double gamma = 0.9;
  std::string opp;
  double noise = 0.0;
  bool strict = false;
  std::string out;
};

int cmd_best_response(const BestResponseArgs& a, std::ostream& out, std::ostream& err) {
  const PDGame game = make_game(a.payoffs, a.gamma);
  const MemoryOneStrategy own = parse_strategy(a.opp);
  const NoisyStrategy opp(swap_perspective(own), a.noise);
  const BestResponseResult br = best_response(game, opp.effective());

  out << "opponent: " << describe(own);
  if (a.noise > 0.0) out << " with error " << format_value(a.noise);
  out << '\n';
  out << "payoffs: R=" << format_value(game.R()) << " S=" << format_value(game.S()) << " T=" << format_value(game.T())
      << " P=" << format_value(game.P()) << '\n';
  out << "gamma: " << format_value(game.gamma()) << '\n';
  out << "policy: " << describe(br.policy.choice) << '\n';
  for (Action act : kActions) {
    for (StateProfile s : kStates) out << "  " << entry_label(act, s) << " = " << format_value(br.q_star(act, s)) << '\n';
  }
  out << "ties:";
  if (br.tie_states.empty()) out << " none";
  for (StateProfile s : br.tie_states) out << ' ' << to_string(s);
  out << '\n';

  int code = kExitOk;
  const auto det = as_deterministic(own);
  const auto fixed = det && a.noise == 0.0 ? fixed_opponent(*det) : std::nullopt;
  if (fixed) {
    try {
      const BestResponseRegion r = best_response_region(*fixed, game);
      out << "region: " << r.id << " (" << (r.payoff_condition.empty() ? "" : r.payoff_condition + ", ")
          << r.gamma_interval.lower_expr << " < gamma < " << r.gamma_interval.upper_expr << ")\n";
      out << "closed-form response: " << describe(r.response) << '\n';
      out << "closed-form max deviation: " << format_value(max_abs_diff(r.q, br.q_star)) << '\n';
    } catch (const BoundaryGamma& e) {
      err << "warning: " << e.what() << '\n';
      if (a.strict) code = kExitBoundary;
    }
  }

  if (!a.out.empty()) {
    write_file(a.out, [&](std::ostream& os) {
      os << "action,state,q\n";
      for (Action act : kActions) {
        for (StateProfile s : kStates) os << to_string(act) << ',' << to_string(s) << ',' << format_value(br.q_star(act, s)) << '\n';
      }
    });
  }
  return code;
}

struct ScanArgs {
  std::string payoffs = kDefaultPayoffs;
  double gamma = 0.9;
  std::string grid = kDefaultGrid;
  bool table1 = false;
  std::string out;
};

int cmd_scan(const ScanArgs& a, std::ostream& out) {
  const PDGame game = make_game(a.payoffs, a.gamma);
  const std::vector<double> grid = parse_gamma_grid(a.grid);
  const ScanResult scan = equilibrium_scan(game, grid);

  if (a.table1) {
    out << "case  bits  name         verdict  condition\n";
    for (const auto& e : catalog()) {
      const CaseVerdict v = case_consistent(game, e.case_id);
      char line[160];
      std::snprintf(line, sizeof line, "%4d  %s  %-11s  %-7s  %s\n", e.case_id, e.strategy.bits().c_str(),
                    e.name.value_or("-").c_str(), v.consistent ? "Yes" : "No", v.condition_desc.c_str());
      out << line;
    }
  } else {
    out << "gamma equilibria\n";
    for (const auto& [g, report] : scan.reports) {
      out << format_value(g);
      for (const auto& m : report.equilibria) out << ' ' << m.name;
      for (const auto& nb : report.near_boundary) {
        if (nb.tie) out << " [" << display_name(nb.strategy) << " tied]";
      }
      out << '\n';
    }
  }
  out << "onsets:\n";
  if (scan.transitions.empty()) out << "  none on this grid\n";
  for (const auto& t : scan.transitions) {
    out << "  " << display_name(t.strategy) << (t.joins ? " joins" : " leaves") << " at "
        << format_value(0.5 * (t.lower + t.upper)) << " +/- " << format_value(0.5 * (t.upper - t.lower)) << " ["
        << format_value(t.lower) << ", " << format_value(t.upper) << "]\n";
  }

  if (!a.out.empty()) {
    const std::filesystem::path dir = a.out;
    ensure_directory(dir);
    if (a.table1) write_file(dir / "table1.csv", [&](std::ostream& os) { write_table_csv(os, game, scan); });
    write_file(dir / "scan.csv", [&](std::ostream& os) {
      os << "gamma,equilibria\n";
      for (const auto& [g, report] : scan.reports) {
        std::string names;
        for (const auto& s : report.strategies()) names += (names.empty() ? "" : " ") + s.bits();
        os << format_value(g) << ',' << names << '\n';
      }
    });
    write_file(dir / "onsets.csv", [&](std::ostream& os) {
      os << "strategy_bits,joins,lower,upper\n";
      for (const auto& t : scan.transitions) {
        os << t.strategy.bits() << ',' << (t.joins ? 1 : 0) << ',' << format_value(t.lower) << ','
           << format_value(t.upper) << '\n';
      }
    });
  }
  return kExitOk;
}

struct QlearnArgs {
  std::string payoffs = kDefaultPayoffs;
  double gamma = 0.9;
  std::string opp = "WSLS";
  double noise = 0.0;
  LearnerConfig config;
  std::string seed;
  std::string out = ".";
  int phases = 0;
  bool random_ties = false;
  bool random_start = false;
};

void print_summary(std::ostream& out, const PDGame& game, const MemoryOneStrategy& opponent, const LearnerConfig& c,
                   const LearningTrace& trace) {
  const BestResponseResult br = best_response(game, opponent);
  const DeterministicStrategy modal = trace.modal_policy();
  const auto start = c.initial_state.value_or(StateProfile::CC);
  const auto visits = expected_visits(modal, opponent, c.epsilon, start, c.steps_per_phase);
  out << "modal policy: " << describe(modal) << ", " << trace.tally[static_cast<std::size_t>(modal.code())] << " of "
      << trace.total() << " realizations\n";
  out << "exact best response: " << describe(br.policy.choice) << '\n';
  out << "entry     mean          target        rel.error     visits\n";
  for (Action a : kActions) {
    for (StateProfile s : kStates) {
      const double mean = trace.final_mean()(a, s);
      const double target = br.q_star(a, s);
      const double rel = target != 0.0 ? std::abs(mean - target) / std::abs(target) : std::abs(mean);
      const double v = visits[QTable::flat(a, s)];
      char line[160];
      std::snprintf(line, sizeof line, "%-8s  %-12.6g  %-12.6g  %-12.3g  %.3g%s\n", entry_label(a, s).c_str(), mean,
                    target, rel, v, v >= kPersistentVisits ? "" : " (rare)");
      out << line;
    }
  }
}

int cmd_qlearn(QlearnArgs a, std::ostream& out) {
  const PDGame game = make_game(a.payoffs, a.gamma);
  LearnerConfig c = a.config;
  c.seed = resolve_seed(a.seed);
  if (a.random_ties) c.tie_break = TieBreak::Random;
  if (a.random_start) c.initial_state = std::nullopt;
  c.validate();
  const MemoryOneStrategy own = parse_strategy(a.opp);
  const std::filesystem::path dir = a.out;
  ensure_directory(dir);

  if (a.phases > 0) {
    const auto initial = as_deterministic(own);
    if (!initial) throw std::invalid_argument("alternating learning needs a deterministic initial strategy");
    const auto phases = alternating_qlearning(game, *initial, c, a.phases, a.noise);
    for (const auto& p : phases) {
      const std::string stem = "phase" + std::to_string(p.phase);
      export_trace(p.trace, dir / (stem + "_trace.csv"));
      export_tally(p.trace.tally, dir / (stem + "_tally.csv"));
      out << "phase " << p.phase << ": player " << p.learner << " vs " << describe(p.opponent) << " -> "
          << describe(p.greedy) << " (" << p.trace.tally[static_cast<std::size_t>(p.greedy.code())] << " of "
          << p.trace.total() << ")\n";
    }
    return kExitOk;
  }

  const NoisyStrategy opp(swap_perspective(own), a.noise);
  const LearningTrace trace = run_learning(game, opp, c);
  export_trace(trace, dir / "trace.csv");
  export_tally(trace.tally, dir / "tally.csv");
  out << "opponent: " << describe(own);
  if (a.noise > 0.0) out << " with error " << format_value(a.noise);
  out << ", gamma " << format_value(game.gamma()) << ", " << c.realizations << " realizations of "
      << c.steps_per_phase << " steps, seed " << c.seed << '\n';
  print_summary(out, game, opp.effective(), c, trace);
  const auto det = as_deterministic(own);
  if (det && *det == strategies::kGrim && a.noise == 0.0) {
    out << "note: against Grim without error the states CC and DC recur only until the learner first defects,\n"
           "so q(C,CC), q(D,CC), q(C,DC) and q(D,DC) are updated a few times at most and need not reach their\n"
           "targets; the learned policy can differ from the exact best response for the same reason.\n";
  }
  out << "wrote " << (dir / "trace.csv").string() << " and " << (dir / "tally.csv").string() << '\n';
  return kExitOk;
}

struct ReproduceArgs {
  std::string out = "reproduce";
  std::string seed;
  bool quick = false;
  long steps = 0;
};

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out) {
  ReproduceOptions o;
  o.out_dir = a.out;
  o.seed = resolve_seed(a.seed);
  o.quick = a.quick;
  o.steps = a.steps;
  const auto entries = reproduce(o, out);
  out << "wrote " << entries.size() << " files and manifest.csv to " << o.out_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

std::array<double, 4> parse_payoffs(std::string_view text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw std::invalid_argument("payoffs must be four numbers R,S,T,P");
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) p[i] = parse_number(parts[i], "payoff");
  return p;
}

std::vector<double> parse_gamma_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument("gamma grid must be a:b:step");
  const double a = parse_number(parts[0], "grid start");
  const double b = parse_number(parts[1], "grid end");
  const double step = parse_number(parts[2], "grid step");
  if (!(step > 0.0) || !(a >= 0.0) || !(b < 1.0) || !(a <= b)) {
    throw std::invalid_argument("gamma grid needs 0 <= a <= b < 1 and step > 0");
  }
  const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
  if (n > 1000000) throw std::invalid_argument("gamma grid has too many points");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) grid.push_back(std::min(a + static_cast<double>(k) * step, b));
  return grid;
}

std::uint64_t resolve_seed(const std::string& flag_value) {
  std::string text = flag_value;
  const char* origin = "--seed";
  if (text.empty()) {
    const char* env = std::getenv("DILEMMA_SEED");
    if (!env || !*env) return 0;
    text = env;
    origin = "DILEMMA_SEED";
  }
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (text.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(text);
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw std::invalid_argument(std::string(origin) + " must be a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::array<double, 8> expected_visits(DeterministicStrategy policy, const MemoryOneStrategy& opponent, double epsilon,
                                      StateProfile start, long steps) {
  std::array<double, 4> dist{};
  dist[index(start)] = 1.0;
  std::array<double, 8> visits{};
  for (long t = 0; t < steps; ++t) {
    std::array<double, 4> next{};
    for (StateProfile s : kStates) {
      const double mass = dist[index(s)];
      if (mass == 0.0) continue;
      const double pc = policy.cooperates(s) ? 1.0 - epsilon / 2 : epsilon / 2;
      const double oc = opponent.coop(s);
      visits[QTable::flat(Action::C, s)] += mass * pc;
      visits[QTable::flat(Action::D, s)] += mass * (1 - pc);
      next[index(StateProfile::CC)] += mass * pc * oc;
      next[index(StateProfile::CD)] += mass * pc * (1 - oc);
      next[index(StateProfile::DC)] += mass * (1 - pc) * oc;
      next[index(StateProfile::DD)] += mass * (1 - pc) * (1 - oc);
    }
    dist = next;
  }
  return visits;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact best responses, equilibria and Q-learning in the repeated prisoner's dilemma", "dilemma"};
  app.footer(strategy_footer());
  app.require_subcommand(1);

  BestResponseArgs br;
  auto* br_cmd = app.add_subcommand("best-response", "Best response to a fixed memory-one opponent");
  br_cmd->add_option("--opp", br.opp, "Opponent strategy (name, bits or four probabilities)")->required();
  br_cmd->add_option("--gamma", br.gamma, "Discount factor in [0,1)")->capture_default_str();
  br_cmd->add_option("--payoffs", br.payoffs, "Payoffs R,S,T,P")->capture_default_str();
  br_cmd->add_option("--noise", br.noise, "Opponent implementation error")->capture_default_str();
  br_cmd->add_flag("--strict", br.strict, "Exit 3 when gamma sits on a region boundary");
  br_cmd->add_option("--out", br.out, "Also write q* to this CSV file");

  ScanArgs sc;
  auto* sc_cmd = app.add_subcommand("scan", "Symmetric equilibria over a gamma grid");
  sc_cmd->alias("equilibrium-scan");
  sc_cmd->add_option("--payoffs", sc.payoffs, "Payoffs R,S,T,P")->capture_default_str();
  sc_cmd->add_option("--gamma-grid", sc.grid, "Grid a:b:step, both ends inclusive")->capture_default_str();
  sc_cmd->add_option("--gamma", sc.gamma, "Discount factor for --table1")->capture_default_str();
  sc_cmd->add_flag("--table1", sc.table1, "Print the 16-case verdict table");
  sc_cmd->add_option("--out", sc.out, "Directory for scan.csv, onsets.csv and table1.csv");

  QlearnArgs ql;
  auto* ql_cmd = app.add_subcommand("qlearn", "Q-learning against a fixed opponent");
  ql_cmd->add_option("--opp", ql.opp, "Opponent strategy (name, bits or four probabilities)")->capture_default_str();
  ql_cmd->add_option("--gamma", ql.gamma, "Discount factor in [0,1)")->capture_default_str();
  ql_cmd->add_option("--payoffs", ql.payoffs, "Payoffs R,S,T,P")->capture_default_str();
  ql_cmd->add_option("--eta", ql.config.eta, "Learning rate")->capture_default_str();
  ql_cmd->add_option("--epsilon", ql.config.epsilon, "Exploration probability")->capture_default_str();
  ql_cmd->add_option("--realizations", ql.config.realizations, "Independent runs averaged")->capture_default_str();
  ql_cmd->add_option("--steps", ql.config.steps_per_phase, "Rounds per run (per phase)")->capture_default_str();
  ql_cmd->add_option("--sample-every", ql.config.sample_every, "Trace sampling interval")->capture_default_str();
  ql_cmd->add_option("--initial-q", ql.config.initial_q, "Initial value of every Q entry")->capture_default_str();
  ql_cmd->add_option("--noise", ql.noise, "Opponent implementation error")->capture_default_str();
  ql_cmd->add_option("--seed", ql.seed, "Base seed (default: DILEMMA_SEED or 0)");
  ql_cmd->add_option("--out", ql.out, "Output directory")->capture_default_str();
  ql_cmd->add_option("--phases", ql.phases, "Alternate learners for this many phases")->check(CLI::NonNegativeNumber);
  ql_cmd->add_flag("--carry-q", ql.config.carry_q, "Keep each player's Q between its phases");
  ql_cmd->add_flag("--random-ties", ql.random_ties, "Break exact Q ties at random instead of choosing C");
  ql_cmd->add_flag("--random-start", ql.random_start, "Draw the first state uniformly instead of CC");

  ReproduceArgs rp;
  auto* rp_cmd = app.add_subcommand("reproduce", "Write the verdict table, learning traces and manifest");
  rp_cmd->add_option("--out", rp.out, "Output directory")->capture_default_str();
  rp_cmd->add_option("--seed", rp.seed, "Base seed (default: DILEMMA_SEED or 0)");
  rp_cmd->add_flag("--quick", rp.quick, "100 realizations instead of 1000");
  rp_cmd->add_option("--steps", rp.steps, "Override rounds per trace")->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidArgs;
  }

  try {
    if (app.got_subcommand(br_cmd)) return cmd_best_response(br, out, err);
    if (app.got_subcommand(sc_cmd)) return cmd_scan(sc, out);
    if (app.got_subcommand(ql_cmd)) return cmd_qlearn(ql, out);
    if (app.got_subcommand(rp_cmd)) return cmd_reproduce(rp, out);
  } catch (const IoFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidArgs;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidArgs;
  }
  return kExitInvalidArgs;
}

}  // namespace dilemma::cli
