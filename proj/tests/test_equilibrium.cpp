#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "dilemma/closed_form.hpp"
#include "dilemma/equilibrium.hpp"
#include "oracles.hpp"

using namespace dilemma;

namespace {

const PDGame kGame = validate_game(4, 0, 6, 1, 0.9);

std::vector<double> percent_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 99; ++k) g.push_back(k / 100.0);
  return g;
}

using Set = std::vector<DeterministicStrategy>;

}  // namespace

TEST_CASE("symmetric equilibria of the reference game") {
  CHECK(symmetric_equilibria(kGame).strategies() == Set{strategies::kWsls, strategies::kGrim, strategies::kAllD});
  CHECK(symmetric_equilibria(kGame.with_gamma(0.5)).strategies() == Set{strategies::kGrim, strategies::kAllD});
  CHECK(symmetric_equilibria(kGame.with_gamma(0.3)).strategies() == Set{strategies::kAllD});
  const auto r = symmetric_equilibria(kGame);
  CHECK(r.equilibria[0].name == "WSLS");
  CHECK(r.equilibria[0].margin > 0.0);
}

TEST_CASE("ties at a threshold exclude the strategy and flag it") {
  const auto r = symmetric_equilibria(kGame.with_gamma(0.4));
  CHECK_FALSE(r.contains(strategies::kGrim));
  const bool flagged = std::any_of(r.near_boundary.begin(), r.near_boundary.end(),
                                   [](const NearBoundary& n) { return n.strategy == strategies::kGrim && n.tie; });
  CHECK(flagged);
}

TEST_CASE("solver-based and closed-form equilibrium sets agree") {
  std::mt19937_64 rng(61);
  for (int set = 0; set < 40; ++set) {
    const auto pay = oracle::random_payoffs(rng);
    for (int k = 1; k <= 24; ++k) {
      const PDGame g = validate_game(pay[0], pay[1], pay[2], pay[3], k / 25.0);
      Set expected;
      for (const auto& e : catalog()) {
        if (case_consistent(g, e.case_id).consistent) expected.push_back(e.strategy);
      }
      const auto report = symmetric_equilibria(g);
      if (!report.near_boundary.empty()) continue;
      CHECK(report.strategies() == expected);
    }
  }
}

TEST_CASE("equilibrium scan localizes thresholds") {
  const auto grid = percent_grid();
  const auto scan = equilibrium_scan(kGame, grid);
  REQUIRE(scan.reports.size() == grid.size());
  REQUIRE(scan.transitions.size() == 2);
  const auto find = [&](DeterministicStrategy s) {
    return *std::find_if(scan.transitions.begin(), scan.transitions.end(),
                         [&](const auto& t) { return t.strategy == s; });
  };
  const auto wsls = find(strategies::kWsls);
  CHECK(wsls.joins);
  CHECK(wsls.upper - wsls.lower <= kBracketWidth);
  CHECK(wsls.lower <= 2.0 / 3.0);
  CHECK(wsls.upper >= 2.0 / 3.0);
  const auto grim = find(strategies::kGrim);
  CHECK(grim.upper - grim.lower <= kBracketWidth);
  CHECK(std::abs(0.5 * (grim.lower + grim.upper) - 0.4) <= 1e-6);

  // monotone: once a strategy joins it stays
  for (std::size_t i = 1; i < scan.reports.size(); ++i) {
    for (auto s : scan.reports[i - 1].second.strategies()) CHECK(scan.reports[i].second.contains(s));
    CHECK(scan.reports[i].second.contains(strategies::kAllD));
  }

  const auto no_wsls = equilibrium_scan(validate_game(3, 0, 5, 2, 0.5), grid);
  for (const auto& [g, report] : no_wsls.reports) CHECK_FALSE(report.contains(strategies::kWsls));

  const double bad[] = {0.5, 0.4};
  CHECK_THROWS_AS(equilibrium_scan(kGame, bad), std::invalid_argument);
}

TEST_CASE("alternating best-response dynamics") {
  SUBCASE("WSLS is a fixed point") {
    const auto t = alternating_dynamics(kGame, strategies::kWsls, 50);
    REQUIRE(t.fixed_point);
    CHECK(t.fixed_point->first == strategies::kWsls);
    CHECK(t.fixed_point->second == strategies::kWsls);
    CHECK(t.steps.front().learned == strategies::kWsls);
    CHECK(t.steps.size() == 2);
  }
  SUBCASE("WSLS at low gamma collapses to All-D") {
    const auto t = alternating_dynamics(kGame.with_gamma(0.2), strategies::kWsls, 50);
    CHECK(t.steps[0].learned == strategies::kAllD);
    REQUIRE(t.fixed_point);
    CHECK(t.fixed_point->first == strategies::kAllD);
    CHECK(t.fixed_point->second == strategies::kAllD);
  }
  SUBCASE("All-D is immediately stable") {
    for (double gm : {0.1, 0.5, 0.9}) {
      const auto t = alternating_dynamics(kGame.with_gamma(gm), strategies::kAllD, 50);
      REQUIRE(t.fixed_point);
      CHECK(t.steps.size() == 2);
      CHECK(t.fixed_point->first == strategies::kAllD);
    }
  }
  SUBCASE("learners alternate and runs are deterministic") {
    for (const auto& e : catalog()) {
      const auto a = alternating_dynamics(kGame.with_gamma(0.7), e.strategy, 100);
      const auto b = alternating_dynamics(kGame.with_gamma(0.7), e.strategy, 100);
      REQUIRE(a.steps.size() == b.steps.size());
      for (std::size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].learner == (i % 2 == 0 ? 1 : 2));
        CHECK(a.steps[i].learned == b.steps[i].learned);
      }
    }
  }
  SUBCASE("fixed points are mutual best responses") {
    std::mt19937_64 rng(67);
    for (int set = 0; set < 20; ++set) {
      const auto pay = oracle::random_payoffs(rng);
      for (int k = 1; k < 10; ++k) {
        const PDGame g = validate_game(pay[0], pay[1], pay[2], pay[3], k / 10.0);
        for (const auto& e : catalog()) {
          const auto t = alternating_dynamics(g, e.strategy, 256);
          if (!t.fixed_point) continue;
          const auto [s1, s2] = *t.fixed_point;
          CHECK(best_response(g, swap_perspective(s2).to_memory_one()).policy.choice == s1);
          CHECK(best_response(g, swap_perspective(s1).to_memory_one()).policy.choice == s2);
        }
      }
    }
  }
  CHECK_THROWS_AS(alternating_dynamics(kGame, strategies::kAllD, 0), std::invalid_argument);
}
