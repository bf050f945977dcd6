#include "tollsim/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "tollsim/error.hpp"

namespace tollsim {

double marginal_utility_of_money(double beta_m, double average_income, double income) {
  if (!(income > 0.0)) throw Error("income must be > 0, got " + std::to_string(income));
  if (!(average_income > 0.0)) throw Error("average income must be > 0, got " + std::to_string(average_income));
  return beta_m * average_income / income;
}

ActivityTerms score_activity(const Activity& act, double start, double end, const ScoringParams& p) {
  ActivityTerms t;
  const double t_typ = act.typical_duration / 3600.0;
  const double t0 = t_typ * std::exp(-p.zeta_hours / t_typ);

  double perform_start = start;
  if (act.opening_time && start < *act.opening_time) {
    perform_start = std::min(end, static_cast<double>(*act.opening_time));
    t.wait = p.beta_wait * (perform_start - start) / 3600.0;
  }
  double dur_s = end - perform_start;
  if (dur_s < p.min_duration_s) {
    dur_s = p.min_duration_s;
    t.short_dur = p.short_penalty;
  }
  t.dur = p.beta_perf * t_typ * std::log((dur_s / 3600.0) / t0);
  if (act.latest_start && start > *act.latest_start) t.late = p.beta_late * (start - *act.latest_start) / 3600.0;
  if (act.earliest_end && end < *act.earliest_end) t.early = p.beta_early * (*act.earliest_end - end) / 3600.0;
  return t;
}

LegTerms score_leg(Mode mode, double travel_time_s, double distance_m, double money, int transfers,
                   const ScoringParams& p, double beta_m_n) {
  const std::size_t m = index(mode);
  LegTerms t;
  t.constant = p.constant[m];
  t.travel = p.beta_trav[m] * travel_time_s / 3600.0;
  t.money = money_to_utility(money, beta_m_n);
  t.distance = (p.beta_d[m] + beta_m_n * p.gamma_d[m]) * distance_m;
  t.transfer = p.beta_transfer * transfers;
  return t;
}

ScoredPlan score_plan(const Plan& plan, const ExecutedPlan* executed, const ScoringParams& p, double beta_m_n) {
  ScoredPlan out;
  const auto& acts = plan.activities;
  if (plan.legs.empty()) {
    out.activities.push_back(score_activity(acts.front(), 0.0, kDaySeconds, p));
  } else {
    if (executed == nullptr || executed->legs.size() != plan.legs.size() ||
        executed->activities.size() != acts.size())
      throw Error("events do not cover every leg of the plan");
    const auto& ex = executed->activities;
    if (!ex.front().end || !ex.back().start) throw Error("events do not cover every leg of the plan");
    // overnight: last activity start to first activity end on the next day
    Activity wrapped = acts.front();
    wrapped.latest_start = acts.back().latest_start;
    out.activities.push_back(score_activity(wrapped, *ex.back().start, *ex.front().end + double(kDaySeconds), p));
    for (std::size_t i = 1; i + 1 < acts.size(); ++i) {
      if (!ex[i].start || !ex[i].end) throw Error("events do not cover every leg of the plan");
      out.activities.push_back(score_activity(acts[i], *ex[i].start, *ex[i].end, p));
    }
    for (std::size_t i = 0; i < plan.legs.size(); ++i) {
      const ExecutedLeg& leg = executed->legs[i];
      out.legs.push_back(score_leg(leg.mode, leg.arrival - leg.departure, leg.distance, leg.money,
                                   plan.legs[i].transfers.value_or(0), p, beta_m_n));
      out.money += leg.money;
    }
  }
  double total = 0.0;
  for (const ActivityTerms& a : out.activities) total += a.total();
  for (const LegTerms& l : out.legs) total += l.total();
  out.total = total;
  return out;
}

}  // namespace tollsim
