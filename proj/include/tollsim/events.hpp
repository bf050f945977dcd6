#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "tollsim/mode.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim {

enum class EventKind : std::uint8_t { act_start, act_end, leg_depart, link_enter, link_leave, leg_arrive, money };

std::string_view to_string(EventKind k) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view s) noexcept;

/// One entry of the day's event stream. `link` is set for everything but money events on
/// teleported legs; `mode` is set on leg_depart/leg_arrive; `amount` is the money transfer
/// (negative for payments); `distance` is the leg distance on leg_arrive.
struct Event {
  int time = 0;
  EventKind kind = EventKind::act_start;
  AgentId agent = 0;
  std::optional<LinkId> link;
  double amount = 0.0;
  std::optional<Mode> mode;
  double distance = 0.0;

  bool operator==(const Event&) const = default;
};

using EventLog = std::vector<Event>;

/// Header: time,kind,agent,link,amount,mode,distance. One event per line, time-sorted.
void write_events(std::ostream& out, const EventLog& log);
void write_events(const std::filesystem::path& path, const EventLog& log);
EventLog read_events(std::istream& in);
EventLog read_events(const std::filesystem::path& path);

/// One leg as it was executed.
struct ExecutedLeg {
  Mode mode = Mode::car;
  int departure = 0;
  int arrival = 0;
  double distance = 0.0;  // m
  double money = 0.0;     // sum of money events during the leg
  std::vector<LinkId> links;
};

/// Realized activity timing; start is unset for the first activity and end for the last.
struct ExecutedActivity {
  std::optional<int> start;
  std::optional<int> end;
};

struct ExecutedPlan {
  AgentId agent = 0;
  std::vector<ExecutedActivity> activities;
  std::vector<ExecutedLeg> legs;
  double money = 0.0;  // all money events of the agent
};

/// Groups an event log by agent (ascending id), reconstructing activities and legs.
std::vector<ExecutedPlan> collect_executions(const EventLog& log);

}  // namespace tollsim
