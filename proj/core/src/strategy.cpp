#include "dilemma/strategy.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace dilemma {

MemoryOneStrategy::MemoryOneStrategy(std::array<double, 4> coop_prob) : coop_(coop_prob) {
  for (double p : coop_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ProbabilityOutOfRange("cooperation probability " + std::to_string(p) + " outside [0, 1]");
    }
  }
}

bool MemoryOneStrategy::is_deterministic() const noexcept {
  return std::all_of(coop_.begin(), coop_.end(), [](double p) { return p == 0.0 || p == 1.0; });
}

std::string MemoryOneStrategy::to_string() const {
  std::string out;
  if (is_deterministic()) {
    for (double p : coop_) out.push_back(p == 1.0 ? '1' : '0');
    return out;
  }
  char buf[32];
  for (std::size_t i = 0; i < coop_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", coop_[i]);
    if (i) out.push_back(',');
    out += buf;
  }
  return out;
}

DeterministicStrategy DeterministicStrategy::from_code(int code) {
  if (code < 0 || code > 15) throw std::invalid_argument("strategy code must be in 0..15");
  DeterministicStrategy s;
  s.code_ = static_cast<std::uint8_t>(code);
  return s;
}

DeterministicStrategy DeterministicStrategy::from_bits(std::string_view bits) {
  if (bits.size() != 4 || bits.find_first_not_of("01") != std::string_view::npos) {
    throw std::invalid_argument("expected four characters over {0,1}, got '" + std::string(bits) + "'");
  }
  return DeterministicStrategy(bits[0] == '1', bits[1] == '1', bits[2] == '1', bits[3] == '1');
}

DeterministicStrategy DeterministicStrategy::with(StateProfile s, Action a) const noexcept {
  DeterministicStrategy out = *this;
  const auto mask = static_cast<std::uint8_t>(1U << (3 - index(s)));
  if (a == Action::C) {
    out.code_ |= mask;
  } else {
    out.code_ &= static_cast<std::uint8_t>(~mask);
  }
  return out;
}

std::string DeterministicStrategy::bits() const {
  std::string out;
  for (StateProfile s : kStates) out.push_back(cooperates(s) ? '1' : '0');
  return out;
}

MemoryOneStrategy DeterministicStrategy::to_memory_one() const {
  std::array<double, 4> p{};
  for (StateProfile s : kStates) p[index(s)] = cooperates(s) ? 1.0 : 0.0;
  return MemoryOneStrategy(p);
}

const std::vector<StrategyCatalogEntry>& catalog() {
  static const std::vector<StrategyCatalogEntry> entries = [] {
    std::vector<StrategyCatalogEntry> v;
    for (int id = 1; id <= 16; ++id) {
      v.push_back({id, DeterministicStrategy::from_code(16 - id), std::nullopt});
    }
    v[0].name = "All-C";
    v[3].name = "Repeat";
    v[5].name = "TFT";
    v[6].name = "WSLS";
    v[7].name = "Grim";
    v[8].name = "anti-Grim";
    v[9].name = "AWSLS";
    v[10].name = "ATFT";
    v[12].name = "anti-Repeat";
    v[15].name = "All-D";
    return v;
  }();
  return entries;
}

const StrategyCatalogEntry& catalog_entry(int case_id) {
  if (case_id < 1 || case_id > 16) throw std::invalid_argument("case id must be in 1..16");
  return catalog()[static_cast<std::size_t>(case_id - 1)];
}

const StrategyCatalogEntry& catalog_entry(DeterministicStrategy s) { return catalog_entry(16 - s.code()); }

std::string display_name(DeterministicStrategy s) {
  const auto& e = catalog_entry(s);
  return e.name ? *e.name : s.bits();
}

const std::vector<NamedSelector>& strategy_selectors() {
  static const std::vector<NamedSelector> v{
      {"ALLC", strategies::kAllC},   {"ALLD", strategies::kAllD},       {"TFT", strategies::kTft},
      {"ATFT", strategies::kAtft},   {"WSLS", strategies::kWsls},       {"AWSLS", strategies::kAwsls},
      {"GRIM", strategies::kGrim},   {"AGRIM", strategies::kAntiGrim},  {"REPEAT", strategies::kRepeat},
      {"AREPEAT", strategies::kAntiRepeat},
  };
  return v;
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::string selector_list() {
  std::string out;
  for (const auto& sel : strategy_selectors()) {
    if (!out.empty()) out += ", ";
    out += sel.key;
  }
  return out + ", or a 4-bit string in order CC,CD,DC,DD";
}

}  // namespace

DeterministicStrategy parse_deterministic(std::string_view text) {
  const std::string key = upper(text);
  for (const auto& sel : strategy_selectors()) {
    if (sel.key == key) return sel.strategy;
  }
  if (text.size() == 4 && text.find_first_not_of("01") == std::string_view::npos) {
    return DeterministicStrategy::from_bits(text);
  }
  throw std::invalid_argument("unknown strategy '" + std::string(text) + "'; valid: " + selector_list());
}

MemoryOneStrategy parse_strategy(std::string_view text) {
  if (text.find(',') == std::string_view::npos) return parse_deterministic(text).to_memory_one();
  std::array<double, 4> p{};
  std::size_t count = 0;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view tok = rest.substr(0, comma);
    if (count >= 4) throw std::invalid_argument("expected four probabilities in '" + std::string(text) + "'");
    const std::string s(tok);
    std::size_t used = 0;
    try {
      p[count] = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw std::invalid_argument("bad probability '" + s + "' in '" + std::string(text) + "'");
    }
    ++count;
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (count != 4) throw std::invalid_argument("expected four probabilities in '" + std::string(text) + "'");
  return MemoryOneStrategy(p);
}

MemoryOneStrategy swap_perspective(const MemoryOneStrategy& strategy) {
  auto p = strategy.coop_probs();
  std::swap(p[index(StateProfile::CD)], p[index(StateProfile::DC)]);
  return MemoryOneStrategy(p);
}

DeterministicStrategy swap_perspective(DeterministicStrategy strategy) {
  return strategy.with(StateProfile::CD, strategy.action(StateProfile::DC))
      .with(StateProfile::DC, strategy.action(StateProfile::CD));
}

NoisyStrategy::NoisyStrategy(MemoryOneStrategy base, double error_prob) : base_(std::move(base)), error_(error_prob) {
  if (!(error_prob >= 0.0 && error_prob <= 1.0)) {
    throw ProbabilityOutOfRange("error probability " + std::to_string(error_prob) + " outside [0, 1]");
  }
}

MemoryOneStrategy NoisyStrategy::effective() const {
  std::array<double, 4> p{};
  for (StateProfile s : kStates) {
    const double c = base_.coop(s);
    p[index(s)] = std::clamp((1.0 - error_) * c + error_ * (1.0 - c), 0.0, 1.0);
  }
  return MemoryOneStrategy(p);
}

NoisyStrategy apply_noise(const MemoryOneStrategy& strategy, double error_prob) {
  return NoisyStrategy(strategy, error_prob);
}

Action sample_action(const MemoryOneStrategy& strategy, StateProfile state, Rng& rng) {
  return uniform01(rng) < strategy.coop(state) ? Action::C : Action::D;
}

}  // namespace dilemma
