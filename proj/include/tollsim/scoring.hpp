#pragma once

#include <vector>

#include "tollsim/config.hpp"
#include "tollsim/events.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim {

/// beta_m * average_income / income. Throws Error for nonpositive income or average.
double marginal_utility_of_money(double beta_m, double average_income, double income);

inline double money_to_utility(double amount, double beta_m_n) { return beta_m_n * amount; }
inline double utility_to_money(double utils, double beta_m_n) { return utils / beta_m_n; }

struct ActivityTerms {
  double dur = 0.0;
  double wait = 0.0;
  double late = 0.0;
  double early = 0.0;
  double short_dur = 0.0;

  double total() const { return dur + wait + late + early + short_dur; }
};

struct LegTerms {
  double constant = 0.0;
  double travel = 0.0;
  double money = 0.0;
  double distance = 0.0;
  double transfer = 0.0;

  double total() const { return constant + travel + money + distance + transfer; }
};

/// Scores one activity performed from `start` to `end` (seconds, end may exceed 86400 for
/// the wrapped overnight activity).
ActivityTerms score_activity(const Activity& act, double start, double end, const ScoringParams& p);

/// Scores one leg. `travel_time_s` in seconds, `distance_m` in meters, `money` is the sum of
/// the leg's money events (payments negative).
LegTerms score_leg(Mode mode, double travel_time_s, double distance_m, double money, int transfers,
                   const ScoringParams& p, double beta_m_n);

struct ScoredPlan {
  double total = 0.0;
  std::vector<ActivityTerms> activities;  // the wrapped first/last activity comes first
  std::vector<LegTerms> legs;
  double money = 0.0;
};

/// Scores the executed version of `plan`. The first and last activity are scored together
/// as one overnight activity. A plan without legs is one activity lasting the whole day.
/// Throws Error when the execution does not cover every leg.
ScoredPlan score_plan(const Plan& plan, const ExecutedPlan* executed, const ScoringParams& p, double beta_m_n);

}  // namespace tollsim
