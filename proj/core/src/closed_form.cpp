#include "dilemma/closed_form.hpp"

#include <cmath>
#include <sstream>

namespace dilemma {

namespace {

// Shorthands for the geometric factors that appear in every case.
struct Factors {
  double R, S, T, P, g;
  double a;  // 1 / (1 - g)
  double b;  // 1 / (1 - g^2)

  explicit Factors(const PDGame& game)
      : R(game.R()), S(game.S()), T(game.T()), P(game.P()), g(game.gamma()),
        a(1.0 / (1.0 - g)), b(1.0 / (1.0 - g * g)) {}
};

QTable make_q(double q1, double q2, double q3, double q4, double q5, double q6, double q7, double q8) {
  return QTable{{q1, q2, q3, q4, q5, q6, q7, q8}};
}

}  // namespace

QTable case_q(const PDGame& game, int case_id) {
  const Factors f(game);
  const double R = f.R, S = f.S, T = f.T, P = f.P, g = f.g, a = f.a, b = f.b;
  switch (case_id) {
    case 1: {
      const double c = R * a, d = T + g * R * a;
      return make_q(c, c, c, c, d, d, d, d);
    }
    case 2:
      return make_q(R * a, R * a, R * a, S + g * R * a, T + g * R * a, T + g * R * a, T + g * R * a, P * a);
    case 3:
      return make_q(R * a, S * a, R * a, R * a, T * a, P + g * R * a, T * a, T * a);
    case 4:
      return make_q(R * a, S * a, R * a, S * a, T * a, P * a, T * a, P * a);
    case 5: {
      const double x = S * b + g * T * b, y = T * b + g * S * b;
      return make_q(R * a, R * a, x, R * a, y, y, P + g * R * a, y);
    }
    case 6: {
      const double x = S * b + g * T * b, y = T * b + g * S * b;
      return make_q(R * a, R * a, x, x, y, y, P * a, P * a);
    }
    case 7: {
      const double lose = S + g * P + g * g * R * a;
      const double tempt = T + g * P + g * g * R * a;
      const double punish = P + g * R * a;
      return make_q(R * a, lose, lose, R * a, tempt, punish, punish, tempt);
    }
    case 8: {
      const double sucker = S + g * P * a;
      return make_q(R * a, sucker, sucker, sucker, T + g * P * a, P * a, P * a, P * a);
    }
    case 9: {
      const double q1 = S + g * R * b + g * g * P * b;
      const double mid = R * b + g * P * b;
      const double q5 = P * b + g * R * b;
      const double hi = T + g * R * b + g * g * P * b;
      return make_q(q1, mid, mid, mid, q5, hi, hi, hi);
    }
    case 10: {
      const double x = S + g * R + g * g * P * a;
      const double y = R + g * P * a;
      const double z = T + g * R + g * g * P * a;
      return make_q(x, y, y, x, P * a, z, z, P * a);
    }
    case 11: {
      const double y = R * b + g * P * b, z = P * b + g * R * b;
      return make_q(S * a, S * a, y, y, z, z, T * a, T * a);
    }
    case 12:
      return make_q(S * a, S * a, R + g * P * a, S * a, P * a, P * a, T * a, P * a);
    case 13: {
      const double w = S * b + g * T * b, x = R * b + g * P * b;
      const double y = P * b + g * R * b, z = T * b + g * S * b;
      return make_q(w, x, w, x, y, z, y, z);
    }
    case 14: {
      const double w = S * b + g * T * b;
      return make_q(w, R + g * P * a, w, w, P * a, T * b + g * S * b, P * a, P * a);
    }
    case 15: {
      const double x = S + g * P * b + g * g * R * b;
      const double y = P * b + g * R * b;
      return make_q(x, x, x, R * b + g * P * b, y, y, y, T + g * P * b + g * g * R * b);
    }
    case 16: {
      const double x = S + g * P * a, y = P * a;
      return make_q(x, x, x, x, y, y, y, y);
    }
    default:
      throw std::invalid_argument("case id must be in 1..16");
  }
}

const CaseCondition& case_condition(int case_id) {
  using K = ConsistencyKind;
  static const std::array<CaseCondition, 16> conditions{{
      {K::Never, "never: requires R > T"},
      {K::Never, "never: requires R > T"},
      {K::Never, "never: requires R > T"},
      {K::Never, "never: requires R > T"},
      {K::Never, "never: q1 > q5 and q2 < q6 contradict since q1 = q2 and q5 = q6"},
      {K::MeasureZero, "only when T+S=R+P and gamma=(T-R)/(R-S)"},
      {K::Region, "T+P<2R and gamma>(T-R)/(R-P)"},
      {K::Region, "gamma>(T-R)/(T-P)"},
      {K::Never, "never: requires gamma < 0"},
      {K::Never, "never: requires gamma < 0"},
      {K::Never, "never: requires gamma < 0"},
      {K::Never, "never: requires S > P"},
      {K::MeasureZero, "only when T+S=R+P and gamma=1 (outside gamma<1)"},
      {K::MeasureZero, "only when T+S>2P and gamma=(P-S)/(T-P)"},
      {K::Never, "never: requires R > T"},
      {K::Always, "always"},
  }};
  if (case_id < 1 || case_id > 16) throw std::invalid_argument("case id must be in 1..16");
  return conditions[static_cast<std::size_t>(case_id - 1)];
}

CaseVerdict case_consistent(const PDGame& game, int case_id) {
  const DeterministicStrategy s = catalog_entry(case_id).strategy;
  CaseVerdict v;
  v.case_id = case_id;
  v.q = case_q(game, case_id);
  v.condition_desc = case_condition(case_id).description;
  v.consistent = true;
  for (StateProfile st : kStates) {
    const std::size_t k = index(st);
    v.required_sign[k] = s.cooperates(st) ? 1 : -1;
    v.observed_diff[k] = v.q.margin(st);
    const bool holds = v.required_sign[k] > 0 ? v.observed_diff[k] > 0.0 : v.observed_diff[k] < 0.0;
    if (!holds) {
      v.consistent = false;
      v.failing_pairs.push_back(static_cast<int>(k) + 1);
    }
  }
  return v;
}

double wsls_threshold(const PDGame& game) { return (game.T() - game.R()) / (game.R() - game.P()); }
double grim_threshold(const PDGame& game) { return (game.T() - game.R()) / (game.T() - game.P()); }

bool predicted_consistency(const PDGame& game, int case_id) {
  switch (case_condition(case_id).kind) {
    case ConsistencyKind::Never:
    case ConsistencyKind::MeasureZero:
      return false;
    case ConsistencyKind::Always:
      return true;
    case ConsistencyKind::Region:
      break;
  }
  if (case_id == 7) return game.T() + game.P() < 2 * game.R() && game.gamma() > wsls_threshold(game);
  return game.gamma() > grim_threshold(game);
}

std::string to_string(FixedOpponent opp) {
  switch (opp) {
    case FixedOpponent::TFT: return "TFT";
    case FixedOpponent::WSLS: return "WSLS";
    case FixedOpponent::Grim: return "Grim";
  }
  return "?";
}

DeterministicStrategy strategy_of(FixedOpponent opp) {
  switch (opp) {
    case FixedOpponent::TFT: return strategies::kTft;
    case FixedOpponent::WSLS: return strategies::kWsls;
    case FixedOpponent::Grim: return strategies::kGrim;
  }
  return strategies::kAllD;
}

namespace {

QTable tft_all_c(const Factors& f) {
  const double x = f.R * f.a, y = f.S + f.g * f.R * f.a;
  const double z = f.T + f.g * f.S + f.g * f.g * f.R * f.a, w = f.P + f.g * f.S + f.g * f.g * f.R * f.a;
  return make_q(x, x, y, y, z, z, w, w);
}

QTable tft_repeat(const Factors& f) {
  const double x = f.R * f.a, y = f.S + f.g * f.R * f.a, z = f.T + f.g * f.P * f.a, w = f.P * f.a;
  return make_q(x, x, y, y, z, z, w, w);
}

QTable tft_all_d(const Factors& f) {
  const double x = f.R + f.g * f.T + f.g * f.g * f.P * f.a, y = f.S + f.g * f.T + f.g * f.g * f.P * f.a;
  const double z = f.T + f.g * f.P * f.a, w = f.P * f.a;
  return make_q(x, x, y, y, z, z, w, w);
}

QTable tft_anti_repeat(const Factors& f) {
  const double x = f.R + f.g * f.T * f.b + f.g * f.g * f.S * f.b;
  const double y = f.S * f.b + f.g * f.T * f.b;
  const double z = f.T * f.b + f.g * f.S * f.b;
  const double w = f.P + f.g * f.S * f.b + f.g * f.g * f.T * f.b;
  return make_q(x, x, y, y, z, z, w, w);
}

QTable wsls_all_d(const Factors& f) {
  const double x = f.R + f.g * f.T * f.b + f.g * f.g * f.P * f.b;
  const double y = f.S + f.g * f.P * f.b + f.g * f.g * f.T * f.b;
  const double z = f.T * f.b + f.g * f.P * f.b;
  const double w = f.P * f.b + f.g * f.T * f.b;
  return make_q(x, y, y, x, z, w, w, z);
}

QTable grim_all_d(const Factors& f) {
  const double s = f.S + f.g * f.P * f.a;
  return make_q(f.R + f.g * f.T + f.g * f.g * f.P * f.a, s, s, s, f.T + f.g * f.P * f.a, f.P * f.a, f.P * f.a,
                f.P * f.a);
}

GammaInterval interval(double lo, std::string lo_expr, double hi, std::string hi_expr) {
  return GammaInterval{lo, hi, std::move(lo_expr), std::move(hi_expr)};
}

}  // namespace

std::vector<BestResponseRegion> regions_for(FixedOpponent opp, const PDGame& game) {
  const Factors f(game);
  const double R = f.R, S = f.S, T = f.T, P = f.P;
  std::vector<BestResponseRegion> out;
  auto add = [&](std::string id, std::string cond, GammaInterval iv, DeterministicStrategy resp, QTable q) {
    out.push_back({opp, std::move(id), std::move(cond), std::move(iv), resp, q});
  };
  switch (opp) {
    case FixedOpponent::TFT: {
      if (T + S <= R + P) {
        const double hi = (P - S) / (R - S), lo = (T - R) / (T - P);
        add("tft-1", "T+S<R+P", interval(hi, "(P-S)/(R-S)", 1.0, "1"), strategies::kAllC, tft_all_c(f));
        add("tft-2", "T+S<R+P", interval(lo, "(T-R)/(T-P)", hi, "(P-S)/(R-S)"), strategies::kRepeat, tft_repeat(f));
        add("tft-3", "T+S<R+P", interval(0.0, "0", lo, "(T-R)/(T-P)"), strategies::kAllD, tft_all_d(f));
      } else {
        const double hi = (T - R) / (R - S), lo = (P - S) / (T - P);
        add("tft-4", "T+S>R+P", interval(hi, "(T-R)/(R-S)", 1.0, "1"), strategies::kAllC, tft_all_c(f));
        add("tft-5", "T+S>R+P", interval(lo, "(P-S)/(T-P)", hi, "(T-R)/(R-S)"), strategies::kAntiRepeat,
            tft_anti_repeat(f));
        add("tft-6", "T+S>R+P", interval(0.0, "0", lo, "(P-S)/(T-P)"), strategies::kAllD, tft_all_d(f));
      }
      break;
    }
    case FixedOpponent::WSLS: {
      if (T + P < 2 * R) {
        const double th = wsls_threshold(game);
        add("wsls-1", "T+P<2R", interval(th, "(T-R)/(R-P)", 1.0, "1"), strategies::kWsls, case_q(game, 7));
        add("wsls-2", "T+P<2R", interval(0.0, "0", th, "(T-R)/(R-P)"), strategies::kAllD, wsls_all_d(f));
      } else {
        add("wsls-3", "T+P>2R", interval(0.0, "0", 1.0, "1"), strategies::kAllD, wsls_all_d(f));
      }
      break;
    }
    case FixedOpponent::Grim: {
      const double th = grim_threshold(game);
      add("grim-1", "any", interval(th, "(T-R)/(T-P)", 1.0, "1"), strategies::kGrim, case_q(game, 8));
      add("grim-2", "any", interval(0.0, "0", th, "(T-R)/(T-P)"), strategies::kAllD, grim_all_d(f));
      break;
    }
  }
  return out;
}

BestResponseRegion best_response_region(FixedOpponent opp, const PDGame& game) {
  const double g = game.gamma();
  auto regions = regions_for(opp, game);
  for (const auto& r : regions) {
    for (double th : {r.gamma_interval.lower, r.gamma_interval.upper}) {
      if (th > 0.0 && th < 1.0 && std::abs(g - th) <= kBoundaryTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "gamma " << g << " lies on the " << to_string(opp) << " region boundary " << th;
        throw BoundaryGamma(os.str(), th);
      }
    }
  }
  for (auto& r : regions) {
    if (r.gamma_interval.contains(g)) return std::move(r);
  }
  // gamma == 0 exactly: the lowest region is closed at zero.
  for (auto& r : regions) {
    if (r.gamma_interval.lower == 0.0 && g == 0.0) return std::move(r);
  }
  throw BoundaryGamma("gamma is not inside any region", g);
}

}  // namespace dilemma
