#pragma once

#include <span>
#include <vector>

#include "tollsim/config.hpp"
#include "tollsim/rng.hpp"
#include "tollsim/router.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim {

/// Unscored plans first (lowest index), otherwise a logit draw with weights
/// exp(score / temperature). A temperature <= 0 picks the best plan (lowest index on ties).
/// Throws Error on empty memory.
std::size_t select_plan(const Agent& agent, double temperature, Rng& rng);

/// Shifts every activity end except the last by an independent draw in [-range, +range],
/// clamped to [0, 86400); leg departures follow. The copy is unscored.
Plan mutate_times(const Plan& plan, int range_s, Rng& rng);

/// Replaces every network-mode route by a least-cost path from `router`. Unscored copy.
Plan reroute(const Plan& plan, const Router& router, const ScoringParams& p, double beta_m_n);

/// Index ranges [first_leg, last_leg) of the home-based tours: legs between consecutive
/// visits to the first activity's location type.
std::vector<std::pair<std::size_t, std::size_t>> tours(const Plan& plan);

/// Person modes available to an agent.
std::vector<Mode> available_modes(const Agent& agent);

/// Switches one randomly chosen tour to a different mode drawn from `modes`. Network legs get
/// routes from `router`, teleported legs none. Throws Error if no alternative exists.
Plan change_mode(const Plan& plan, std::span<const Mode> modes, const Router& router, const ScoringParams& p,
                 double beta_m_n, Rng& rng);

/// Drops the lowest-scored plans until at most `max` remain; the selected plan is kept.
/// Unscored plans count as best.
void trim_memory(Agent& agent, int max);

}  // namespace tollsim
