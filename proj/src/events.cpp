#include "tollsim/events.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "tollsim/csv.hpp"
#include "tollsim/error.hpp"

namespace tollsim {

namespace {
constexpr std::string_view kHeader = "time,kind,agent,link,amount,mode,distance";
constexpr std::array<std::string_view, 7> kKindNames = {"act_start",  "act_end",    "leg_depart", "link_enter",
                                                        "link_leave", "leg_arrive", "money"};
}  // namespace

std::string_view to_string(EventKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> parse_event_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

void write_events(std::ostream& out, const EventLog& log) {
  out << kHeader << '\n';
  std::string line;
  for (const Event& e : log) {
    line.clear();
    line += std::to_string(e.time);
    line += ',';
    line += to_string(e.kind);
    line += ',';
    line += std::to_string(e.agent);
    line += ',';
    if (e.link) line += std::to_string(*e.link);
    line += ',';
    if (e.kind == EventKind::money) line += csv::fmt(e.amount);
    line += ',';
    if (e.mode) line += to_string(*e.mode);
    line += ',';
    if (e.kind == EventKind::leg_arrive) line += csv::fmt(e.distance);
    line += '\n';
    out << line;
  }
}

void write_events(const std::filesystem::path& path, const EventLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_events(out, log);
}

EventLog read_events(std::istream& in) {
  const std::string file = "events.csv";
  std::string line;
  if (!std::getline(in, line) || csv::split(line)[0] != "time" || line.rfind(kHeader, 0) != 0)
    throw ValidationError(file, "header", "columns", "unexpected header");
  EventLog log;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto c = csv::split(line);
    const std::string r = "row " + std::to_string(row);
    if (c.size() != 7) throw ValidationError(file, r, "columns", "expected 7 columns");
    Event e;
    e.time = csv::parse<int>(c[0], file, r, "time");
    auto kind = parse_event_kind(c[1]);
    if (!kind) throw ValidationError(file, r, "kind", "unknown event kind");
    e.kind = *kind;
    e.agent = csv::parse<AgentId>(c[2], file, r, "agent");
    if (!c[3].empty()) e.link = csv::parse<LinkId>(c[3], file, r, "link");
    if (!c[4].empty()) e.amount = csv::parse<double>(c[4], file, r, "amount");
    if (!c[5].empty()) {
      auto m = parse_mode(c[5]);
      if (!m) throw ValidationError(file, r, "mode", "unknown mode");
      e.mode = *m;
    }
    if (!c[6].empty()) e.distance = csv::parse<double>(c[6], file, r, "distance");
    if (!log.empty() && e.time < log.back().time) throw ValidationError(file, r, "time", "events not time-sorted");
    log.push_back(e);
  }
  return log;
}

EventLog read_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.filename().string(), "document", "file", "missing file " + path.string());
  return read_events(in);
}

std::vector<ExecutedPlan> collect_executions(const EventLog& log) {
  std::map<AgentId, ExecutedPlan> plans;
  std::map<AgentId, bool> in_leg;
  for (const Event& e : log) {
    ExecutedPlan& p = plans[e.agent];
    p.agent = e.agent;
    if (p.activities.empty()) p.activities.emplace_back();
    switch (e.kind) {
      case EventKind::act_end:
        p.activities.back().end = e.time;
        break;
      case EventKind::act_start:
        p.activities.push_back(ExecutedActivity{e.time, std::nullopt});
        break;
      case EventKind::leg_depart: {
        ExecutedLeg leg;
        leg.mode = e.mode.value_or(Mode::car);
        leg.departure = e.time;
        p.legs.push_back(std::move(leg));
        in_leg[e.agent] = true;
        break;
      }
      case EventKind::link_enter:
        if (!p.legs.empty()) p.legs.back().links.push_back(*e.link);
        break;
      case EventKind::link_leave:
        break;
      case EventKind::leg_arrive:
        if (!p.legs.empty()) {
          p.legs.back().arrival = e.time;
          p.legs.back().distance = e.distance;
        }
        in_leg[e.agent] = false;
        break;
      case EventKind::money:
        p.money += e.amount;
        if (!p.legs.empty() && in_leg[e.agent]) p.legs.back().money += e.amount;
        break;
    }
  }
  std::vector<ExecutedPlan> out;
  out.reserve(plans.size());
  for (auto& [id, p] : plans) out.push_back(std::move(p));
  return out;
}

}  // namespace tollsim
