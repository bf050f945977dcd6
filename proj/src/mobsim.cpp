#include "tollsim/mobsim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "tollsim/error.hpp"

namespace tollsim {

TravelTimeTable::TravelTimeTable(const Network& net, int bin_s)
    : bin_s_(bin_s), bins_(kDaySeconds / bin_s) {
  tt_.resize(net.links().size() * static_cast<std::size_t>(bins_));
  for (std::size_t i = 0; i < net.links().size(); ++i) {
    std::fill_n(tt_.begin() + static_cast<std::ptrdiff_t>(i * bins_), bins_, net.links()[i].free_flow_time());
  }
}

double TravelTimeTable::get(std::size_t link_idx, double time) const {
  return tt_[link_idx * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(interval_of(time, bin_s_))];
}

void TravelTimeTable::set(std::size_t link_idx, int bin, double tt) {
  tt_[link_idx * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(bin)] = tt;
}

double beeline(const Network& net, LinkId a, LinkId b) {
  const auto [ax, ay] = net.link_coord(a);
  const auto [bx, by] = net.link_coord(b);
  return std::hypot(ax - bx, ay - by);
}

double teleport_leg(Mode mode, double beeline_distance, const MobsimParams& params) {
  if (!is_teleported(mode)) throw Error("mode " + std::string(to_string(mode)) + " is not teleported");
  const TeleportParams& p = params.teleport[index(mode)];
  return beeline_distance * p.beeline_factor / p.speed;
}

double teleport_distance(Mode mode, double beeline_distance, const MobsimParams& params) {
  if (!is_teleported(mode)) throw Error("mode " + std::string(to_string(mode)) + " is not teleported");
  return beeline_distance * params.teleport[index(mode)].beeline_factor;
}

namespace {

constexpr double kEps = 1e-9;

int ceil_seconds(double s) { return static_cast<int>(std::ceil(s - kEps)); }

struct Vehicle {
  std::size_t agent;  // index into population
  int earliest_exit;
};

struct LinkState {
  std::deque<Vehicle> queue;
  std::deque<std::size_t> entry_wait;  // departing agents waiting to enter
  std::vector<std::size_t> blocked_upstream;
  double rate = 0.0;     // tokens per second
  double bucket = 1.0;
  double bucket_cap = 1.0;
  int last_refresh = 0;
  double storage = 1.0;
  int free_time = 1;     // whole seconds
  int blocked_since = -1;
  int entry_wait_since = -1;
  int scheduled = -1;    // time of the pending wake, -1 if none
  int entry_scheduled = -1;
};

struct AgentState {
  const Plan* plan = nullptr;
  std::size_t act = 0;     // current activity, or the one the current leg leads to
  std::size_t route_pos = 0;
  std::vector<std::size_t> route;  // link indices of the current leg
  int link_enter = 0;
  double leg_distance = 0.0;
};

enum class ItemKind : std::uint8_t { link = 0, entry = 1, agent = 2 };

struct Item {
  int time;
  ItemKind kind;
  std::size_t idx;
  bool operator>(const Item& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return idx > o.idx;
  }
};

class Engine {
  // marks agent items that complete a teleported leg rather than end an activity
  static constexpr std::size_t kTeleportBit = std::size_t{1} << (sizeof(std::size_t) * 8 - 1);

 public:
  Engine(const Network& net, const Population& pop, const TollSchedule& tolls, const MobsimParams& params,
         double sample_scale, int bin_s)
      : net_(net), pop_(pop), tolls_(tolls), params_(params), links_(net.links().size()),
        agents_(pop.agents.size()), tt_sum_(net.links().size() * static_cast<std::size_t>(kDaySeconds / bin_s), 0.0),
        tt_n_(tt_sum_.size(), 0), bin_s_(bin_s) {
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const Link& l = net.links()[i];
      LinkState& s = links_[i];
      s.rate = l.flow_capacity * sample_scale / 3600.0;
      s.bucket_cap = std::max(1.0, s.rate);
      s.bucket = s.bucket_cap;
      s.storage = std::max(1.0, std::floor(l.length * l.lanes / params.cell_length) * sample_scale);
      s.free_time = std::max(1, ceil_seconds(l.free_flow_time()));
    }
  }

  MobsimResult run() {
    for (std::size_t a = 0; a < pop_.agents.size(); ++a) {
      AgentState& st = agents_[a];
      st.plan = &pop_.agents[a].selected_plan();
      st.act = 0;
      if (st.plan->legs.empty()) continue;
      push({st.plan->activities[0].end_time, ItemKind::agent, a});
    }
    while (!heap_.empty()) {
      const Item it = heap_.top();
      heap_.pop();
      now_ = it.time;
      switch (it.kind) {
        case ItemKind::agent: dispatch_agent(it.idx); break;
        case ItemKind::link:
          if (links_[it.idx].scheduled != it.time) break;
          links_[it.idx].scheduled = -1;
          process_link(it.idx);
          break;
        case ItemKind::entry: serve_entry(it.idx, it.time); break;
      }
    }
    MobsimResult result;
    result.events = std::move(events_);
    result.forced_moves = forced_;
    result.travel_times = TravelTimeTable(net_, bin_s_);
    const int bins = kDaySeconds / bin_s_;
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const double tfree = net_.links()[i].free_flow_time();
      for (int b = 0; b < bins; ++b) {
        const std::size_t k = i * static_cast<std::size_t>(bins) + static_cast<std::size_t>(b);
        if (tt_n_[k] == 0) continue;
        result.travel_times.set(i, b, std::max(tfree, tt_sum_[k] / tt_n_[k]));
      }
    }
    return result;
  }

 private:
  void push(Item it) { heap_.push(it); }

  void wake_link(std::size_t li, int t) {
    LinkState& s = links_[li];
    if (s.scheduled != -1 && s.scheduled <= t) return;
    s.scheduled = t;
    push({t, ItemKind::link, li});
  }

  void emit(EventKind kind, std::size_t agent, std::optional<LinkId> link, double amount = 0.0,
            std::optional<Mode> mode = std::nullopt, double distance = 0.0) {
    events_.push_back(Event{now_, kind, pop_.agents[agent].id, link, amount, mode, distance});
  }

  const Leg& current_leg(std::size_t a) const { return agents_[a].plan->legs[agents_[a].act]; }

  void end_activity(std::size_t a) {
    AgentState& st = agents_[a];
    const Plan& plan = *st.plan;
    const Activity& act = plan.activities[st.act];
    emit(EventKind::act_end, a, act.link);
    const Leg& leg = plan.legs[st.act];
    const Activity& next = plan.activities[st.act + 1];
    emit(EventKind::leg_depart, a, act.link, 0.0, leg.mode);
    if (is_teleported(leg.mode)) {
      const double bl = beeline(net_, act.link, next.link);
      st.leg_distance = teleport_distance(leg.mode, bl, params_);
      const int arrival = now_ + ceil_seconds(teleport_leg(leg.mode, bl, params_));
      st.act += 1;
      push({arrival, ItemKind::agent, a | kTeleportBit});
      return;
    }
    st.route.clear();
    for (LinkId lid : leg.route) {
      const std::size_t li = net_.link_index(lid);
      if (!net_.links()[li].allows(leg.mode))
        throw RoutingError("agent " + std::to_string(pop_.agents[a].id) + ": link " + std::to_string(lid) +
                           " does not allow " + std::string(to_string(leg.mode)));
      st.route.push_back(li);
    }
    st.route_pos = 0;
    st.leg_distance = 0.0;
    if (st.route.empty()) {
      arrive(a);
      return;
    }
    LinkState& first = links_[st.route[0]];
    if (first.entry_wait.empty() && occupancy(st.route[0]) < first.storage) {
      enter_link(a, st.route[0]);
    } else {
      if (first.entry_wait.empty()) {
        first.entry_wait_since = now_;
        schedule_entry(st.route[0], now_ + params_.stuck_time_s);
      }
      first.entry_wait.push_back(a);
    }
  }

  double occupancy(std::size_t li) const { return static_cast<double>(links_[li].queue.size()); }

  void enter_link(std::size_t a, std::size_t li) {
    AgentState& st = agents_[a];
    LinkState& s = links_[li];
    st.link_enter = now_;
    emit(EventKind::link_enter, a, net_.links()[li].id);
    s.queue.push_back(Vehicle{a, now_ + s.free_time});
    if (s.queue.size() == 1) wake_link(li, s.queue.front().earliest_exit);
  }

  void arrive(std::size_t a) {
    AgentState& st = agents_[a];
    const Leg& leg = current_leg(a);
    st.act += 1;
    const Activity& act = st.plan->activities[st.act];
    emit(EventKind::leg_arrive, a, act.link, 0.0, leg.mode, st.leg_distance);
    start_activity(a);
  }

  void start_activity(std::size_t a) {
    AgentState& st = agents_[a];
    const Activity& act = st.plan->activities[st.act];
    emit(EventKind::act_start, a, act.link);
    if (st.act + 1 < st.plan->activities.size()) push({std::max(now_, act.end_time), ItemKind::agent, a});
  }

  void refresh_bucket(LinkState& s) {
    if (now_ > s.last_refresh) {
      s.bucket = std::min(s.bucket_cap, s.bucket + s.rate * (now_ - s.last_refresh));
      s.last_refresh = now_;
    }
  }

  void process_link(std::size_t li) {
    LinkState& s = links_[li];
    refresh_bucket(s);
    while (!s.queue.empty()) {
      const Vehicle head = s.queue.front();
      if (head.earliest_exit > now_) {
        wake_link(li, head.earliest_exit);
        return;
      }
      if (s.bucket + kEps < 1.0) {
        wake_link(li, now_ + std::max(1, ceil_seconds((1.0 - s.bucket) / s.rate)));
        return;
      }
      AgentState& st = agents_[head.agent];
      const bool last = st.route_pos + 1 == st.route.size();
      std::size_t next = 0;
      bool forced = false;
      if (!last) {
        next = st.route[st.route_pos + 1];
        if (occupancy(next) >= links_[next].storage) {
          if (s.blocked_since < 0) s.blocked_since = now_;
          if (now_ - s.blocked_since < params_.stuck_time_s) {
            auto& up = links_[next].blocked_upstream;
            if (std::find(up.begin(), up.end(), li) == up.end()) up.push_back(li);
            wake_link(li, s.blocked_since + params_.stuck_time_s);
            return;
          }
          forced = true;
        }
      }
      s.queue.pop_front();
      s.bucket -= 1.0;
      s.blocked_since = -1;
      if (forced) ++forced_;
      leave_link(head.agent, li);
      if (last) {
        arrive(head.agent);
      } else {
        st.route_pos += 1;
        enter_link(head.agent, next);
      }
      space_freed(li);
    }
  }

  void leave_link(std::size_t a, std::size_t li) {
    AgentState& st = agents_[a];
    const Link& l = net_.links()[li];
    emit(EventKind::link_leave, a, l.id);
    st.leg_distance += l.length;
    const Mode mode = current_leg(a).mode;
    const double toll = toll_for(l.id, std::min(now_, kDaySeconds - 1), tolls_);
    if (toll > 0.0 && !params_.toll_exempt[index(mode)]) emit(EventKind::money, a, l.id, -toll);
    const int bin = interval_of(st.link_enter, bin_s_);
    const std::size_t k = li * static_cast<std::size_t>(kDaySeconds / bin_s_) + static_cast<std::size_t>(bin);
    tt_sum_[k] += now_ - st.link_enter;
    tt_n_[k] += 1;
  }

  void space_freed(std::size_t li) {
    LinkState& s = links_[li];
    while (!s.entry_wait.empty() && occupancy(li) < s.storage) {
      const std::size_t a = s.entry_wait.front();
      s.entry_wait.pop_front();
      enter_link(a, li);
      s.entry_wait_since = now_;
    }
    if (s.blocked_upstream.empty()) return;
    auto up = std::move(s.blocked_upstream);
    s.blocked_upstream.clear();
    for (std::size_t u : up) wake_link(u, now_);
  }

  void schedule_entry(std::size_t li, int t) {
    links_[li].entry_scheduled = t;
    push({t, ItemKind::entry, li});
  }

  void serve_entry(std::size_t li, int item_time) {
    LinkState& s = links_[li];
    if (s.entry_scheduled != item_time) return;
    s.entry_scheduled = -1;
    if (s.entry_wait.empty()) return;
    if (now_ - s.entry_wait_since < params_.stuck_time_s) {
      schedule_entry(li, s.entry_wait_since + params_.stuck_time_s);
      return;
    }
    const std::size_t a = s.entry_wait.front();
    s.entry_wait.pop_front();
    ++forced_;
    enter_link(a, li);
    s.entry_wait_since = now_;
    if (!s.entry_wait.empty()) schedule_entry(li, now_ + params_.stuck_time_s);
  }

  void dispatch_agent(std::size_t tagged) {
    if (tagged & kTeleportBit) {
      const std::size_t a = tagged & ~kTeleportBit;
      AgentState& st = agents_[a];
      const Leg& leg = st.plan->legs[st.act - 1];
      const Activity& act = st.plan->activities[st.act];
      emit(EventKind::leg_arrive, a, act.link, 0.0, leg.mode, st.leg_distance);
      start_activity(a);
    } else {
      end_activity(tagged);
    }
  }

  const Network& net_;
  const Population& pop_;
  const TollSchedule& tolls_;
  const MobsimParams& params_;
  std::vector<LinkState> links_;
  std::vector<AgentState> agents_;
  std::vector<double> tt_sum_;
  std::vector<int> tt_n_;
  int bin_s_;
  int now_ = 0;
  int forced_ = 0;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap_;
  EventLog events_;
};

}  // namespace

MobsimResult run_mobsim(const Network& net, const Population& pop, const TollSchedule& tolls,
                        const MobsimParams& params, double sample_scale, int bin_s) {
  Engine engine(net, pop, tolls, params, sample_scale, bin_s);
  return engine.run();
}

MobsimResult run_mobsim(const Scenario& scenario, const TollSchedule& tolls) {
  return run_mobsim(scenario.network, scenario.population, tolls, scenario.config.mobsim,
                    scenario.config.scenario.sample_scale, scenario.config.tolling.interval_s);
}

VehicleDelays measure_delay_events(const EventLog& log, const Network& net, int interval_s) {
  VehicleDelays out;
  std::map<std::pair<AgentId, LinkId>, int> entered;
  for (const Event& e : log) {
    if (e.kind == EventKind::link_enter) {
      entered[{e.agent, *e.link}] = e.time;
    } else if (e.kind == EventKind::link_leave) {
      auto it = entered.find({e.agent, *e.link});
      if (it == entered.end()) continue;
      const double actual = e.time - it->second;
      entered.erase(it);
      const double delay = std::max(0.0, actual - net.link(*e.link).free_flow_time());
      out[{*e.link, interval_of(e.time, interval_s)}].push_back(delay);
    }
  }
  return out;
}

}  // namespace tollsim
