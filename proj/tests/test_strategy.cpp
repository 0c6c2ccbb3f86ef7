#include "doctest.h"

#include <cmath>
#include <set>

#include "dilemma/strategy.hpp"

using namespace dilemma;

TEST_CASE("catalog matches the case table") {
  const auto& cat = catalog();
  REQUIRE(cat.size() == 16);
  for (std::size_t i = 0; i < cat.size(); ++i) CHECK(cat[i].case_id == static_cast<int>(i) + 1);

  CHECK(catalog_entry(1).strategy.bits() == "1111");
  CHECK(catalog_entry(1).name == "All-C");
  CHECK(catalog_entry(4).strategy.bits() == "1100");
  CHECK(catalog_entry(4).name == "Repeat");
  CHECK(catalog_entry(6).strategy.bits() == "1010");
  CHECK(catalog_entry(6).name == "TFT");
  CHECK(catalog_entry(7).strategy.bits() == "1001");
  CHECK(catalog_entry(7).name == "WSLS");
  CHECK(catalog_entry(8).strategy.bits() == "1000");
  CHECK(catalog_entry(8).name == "Grim");
  CHECK(catalog_entry(9).name == "anti-Grim");
  CHECK(catalog_entry(10).name == "AWSLS");
  CHECK(catalog_entry(11).name == "ATFT");
  CHECK(catalog_entry(13).name == "anti-Repeat");
  CHECK(catalog_entry(16).strategy.bits() == "0000");
  CHECK(catalog_entry(16).name == "All-D");

  // Unnamed rows are labeled by their bits.
  for (int id : {2, 3, 5, 12, 14, 15}) {
    CHECK_FALSE(catalog_entry(id).name.has_value());
    CHECK(display_name(catalog_entry(id).strategy) == catalog_entry(id).strategy.bits());
  }

  std::set<int> codes;
  for (const auto& e : cat) codes.insert(e.strategy.code());
  CHECK(codes.size() == 16);
}

TEST_CASE("selectors resolve names and bit strings") {
  CHECK(parse_deterministic("WSLS") == strategies::kWsls);
  CHECK(parse_deterministic("grim") == strategies::kGrim);
  CHECK(parse_deterministic("ALLC") == strategies::kAllC);
  CHECK(parse_deterministic("AREPEAT") == strategies::kAntiRepeat);
  CHECK(parse_deterministic("0110") == strategies::kAwsls);
  CHECK_THROWS_WITH_AS(parse_deterministic("NICE"), doctest::Contains("ALLC"), std::invalid_argument);
  CHECK_THROWS_AS(parse_deterministic("10101"), std::invalid_argument);

  const MemoryOneStrategy s = parse_strategy("0.9,0.1,0.2,0.8");
  CHECK(s.coop(StateProfile::CD) == doctest::Approx(0.1));
  CHECK(s.to_string() == "0.9,0.1,0.2,0.8");
  CHECK(parse_strategy("TFT").to_string() == "1010");
  CHECK_THROWS_AS(parse_strategy("0.9,0.1,0.2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy("0.9,0.1,x,0.2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_strategy("0.9,0.1,1.2,0.2"), ProbabilityOutOfRange);
}

TEST_CASE("swap_perspective exchanges the mixed states") {
  CHECK(swap_perspective(strategies::kWsls) == strategies::kWsls);
  CHECK(swap_perspective(DeterministicStrategy::from_bits("1100")).bits() == "1010");
  CHECK(swap_perspective(strategies::kGrim) == strategies::kGrim);
  CHECK(swap_perspective(strategies::kTft.to_memory_one()).to_string() == "1100");
}

TEST_CASE("swap_perspective is an involution") {
  for (const auto& e : catalog()) {
    CHECK(swap_perspective(swap_perspective(e.strategy)) == e.strategy);
    CHECK(swap_perspective(e.strategy).to_memory_one() == swap_perspective(e.strategy.to_memory_one()));
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const MemoryOneStrategy s({u(rng), u(rng), u(rng), u(rng)});
    CHECK(swap_perspective(swap_perspective(s)) == s);
  }
}

TEST_CASE("implementation error") {
  const auto grim = apply_noise(strategies::kGrim.to_memory_one(), 0.01).effective();
  CHECK(grim.coop(StateProfile::CC) == doctest::Approx(0.99).epsilon(1e-15));
  CHECK(grim.coop(StateProfile::CD) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(grim.coop(StateProfile::DC) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(grim.coop(StateProfile::DD) == doctest::Approx(0.01).epsilon(1e-15));

  const MemoryOneStrategy mixed({0.3, 0.7, 0.1, 1.0});
  CHECK(apply_noise(mixed, 0.0).effective() == mixed);
  for (double p : apply_noise(mixed, 0.5).effective().coop_probs()) CHECK(p == doctest::Approx(0.5));

  CHECK_THROWS_AS(apply_noise(mixed, 1.5), ProbabilityOutOfRange);
  CHECK_THROWS_AS(apply_noise(mixed, -0.01), ProbabilityOutOfRange);
}

TEST_CASE("noise e on p equals noise 1-e on the complement") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const std::array<double, 4> p{u(rng), u(rng), u(rng), u(rng)};
    const std::array<double, 4> q{1 - p[0], 1 - p[1], 1 - p[2], 1 - p[3]};
    const double e = u(rng);
    const auto a = apply_noise(MemoryOneStrategy(p), e).effective();
    const auto b = apply_noise(MemoryOneStrategy(q), 1 - e).effective();
    for (StateProfile s : kStates) CHECK(a.coop(s) == doctest::Approx(b.coop(s)).epsilon(1e-12));
  }
}

TEST_CASE("sample_action") {
  Rng rng(1);
  for (StateProfile s : kStates) {
    for (int i = 0; i < 100; ++i) {
      CHECK(sample_action(strategies::kAllD.to_memory_one(), s, rng) == Action::D);
      CHECK(sample_action(strategies::kAllC.to_memory_one(), s, rng) == Action::C);
      CHECK(sample_action(strategies::kWsls.to_memory_one(), s, rng) == strategies::kWsls.action(s));
    }
  }

  // Binomial(1e6, 0.5) has standard deviation 5e-4, so 0.002 is four sigma.
  const MemoryOneStrategy coin({0.5, 0.5, 0.5, 0.5});
  Rng r2(2024);
  int c = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) c += sample_action(coin, StateProfile::CD, r2) == Action::C;
  CHECK(std::abs(c / double(n) - 0.5) <= 0.002);

  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) CHECK(sample_action(coin, StateProfile::CC, a) == sample_action(coin, StateProfile::CC, b));
}
