#include "tollsim/replanning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tollsim/error.hpp"

namespace tollsim {

std::size_t select_plan(const Agent& agent, double temperature, Rng& rng) {
  const auto& plans = agent.plans;
  if (plans.empty()) throw Error("agent " + std::to_string(agent.id) + " has no plans");
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (!plans[i].score) return i;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < plans.size(); ++i) {
    if (*plans[i].score > *plans[best].score) best = i;
  }
  if (temperature <= 0.0 || plans.size() == 1) return best;
  const double top = *plans[best].score;
  std::vector<double> w(plans.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    w[i] = std::exp((*plans[i].score - top) / temperature);
    sum += w[i];
  }
  double u = rng.uniform() * sum;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (u < w[i]) return i;
    u -= w[i];
  }
  return best;
}

Plan mutate_times(const Plan& plan, int range_s, Rng& rng) {
  Plan out = plan;
  out.score.reset();
  for (std::size_t i = 0; i + 1 < out.activities.size(); ++i) {
    Activity& a = out.activities[i];
    const double shift = range_s > 0 ? rng.uniform(-range_s, range_s) : 0.0;
    const int t = a.end_time + static_cast<int>(std::lround(shift));
    a.end_time = std::clamp(t, 0, kDaySeconds - 1);
    out.legs[i].departure_time = a.end_time;
  }
  return out;
}

Plan reroute(const Plan& plan, const Router& router, const ScoringParams& p, double beta_m_n) {
  Plan out = plan;
  out.score.reset();
  for (std::size_t i = 0; i < out.legs.size(); ++i) {
    Leg& leg = out.legs[i];
    if (!is_network_mode(leg.mode)) continue;
    leg.route = router.route(out.activities[i].link, out.activities[i + 1].link, out.activities[i].end_time,
                             leg.mode, CostWeights::for_mode(p, leg.mode, beta_m_n));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> tours(const Plan& plan) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::string& home = plan.activities.front().type;
  std::size_t first = 0;
  for (std::size_t i = 0; i < plan.legs.size(); ++i) {
    if (plan.activities[i + 1].type == home) {
      out.emplace_back(first, i + 1);
      first = i + 1;
    }
  }
  if (first < plan.legs.size()) out.emplace_back(first, plan.legs.size());
  return out;
}

std::vector<Mode> available_modes(const Agent& agent) {
  if (agent.kind == AgentKind::freight) return {Mode::freight};
  std::vector<Mode> m;
  if (agent.car_available) m.push_back(Mode::car);
  m.insert(m.end(), {Mode::pt, Mode::bicycle, Mode::walk});
  return m;
}

Plan change_mode(const Plan& plan, std::span<const Mode> modes, const Router& router, const ScoringParams& p,
                 double beta_m_n, Rng& rng) {
  const auto ts = tours(plan);
  if (ts.empty()) throw Error("plan has no tour");
  const auto [first, last] = ts[rng.below(ts.size())];
  const Mode current = plan.legs[first].mode;
  std::vector<Mode> options;
  for (Mode m : modes) {
    if (m != current) options.push_back(m);
  }
  if (options.empty()) throw Error("no alternative mode available");
  const Mode next = options[rng.below(options.size())];

  Plan out = plan;
  out.score.reset();
  for (std::size_t i = first; i < last; ++i) {
    Leg& leg = out.legs[i];
    leg.mode = next;
    leg.transfers.reset();
    if (is_network_mode(next)) {
      leg.route = router.route(out.activities[i].link, out.activities[i + 1].link, out.activities[i].end_time, next,
                               CostWeights::for_mode(p, next, beta_m_n));
    } else {
      leg.route.clear();
    }
  }
  return out;
}

void trim_memory(Agent& agent, int max) {
  auto& plans = agent.plans;
  while (plans.size() > static_cast<std::size_t>(std::max(1, max))) {
    std::size_t worst = plans.size();
    double worst_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < plans.size(); ++i) {
      if (i == agent.selected || !plans[i].score) continue;
      if (*plans[i].score < worst_score) {
        worst_score = *plans[i].score;
        worst = i;
      }
    }
    if (worst == plans.size()) {
      // only unscored plans besides the selected one: drop the oldest of them
      worst = agent.selected == 0 ? 1 : 0;
    }
    plans.erase(plans.begin() + static_cast<std::ptrdiff_t>(worst));
    if (agent.selected > worst) --agent.selected;
  }
}

}  // namespace tollsim
