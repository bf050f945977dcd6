#include "tollsim/router.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "tollsim/error.hpp"

namespace tollsim {

CostWeights CostWeights::for_mode(const ScoringParams& p, Mode mode, double beta_m_n) {
  return CostWeights{p.beta_trav[index(mode)], beta_m_n, p.gamma_d[index(mode)], p.beta_d[index(mode)]};
}

double Router::arc_cost(std::size_t li, double time, const CostWeights& w) const {
  const Link& l = net_.links()[li];
  const double tt = tt_.empty() ? l.free_flow_time() : tt_.get(li, time);
  const double toll = tolls_.empty() ? 0.0 : toll_for(l.id, std::min(time, kDaySeconds - 1.0), tolls_);
  const double cost = -w.beta_trav * tt / 3600.0 - w.beta_m_n * (w.gamma_d * l.length - toll) - w.beta_d * l.length;
  return std::max(kMinArcCost, cost);
}

std::vector<LinkId> Router::route(LinkId origin, LinkId destination, double departure, Mode mode,
                                  const CostWeights& w) const {
  if (origin == destination) return {};
  const std::size_t n = net_.nodes().size();
  const std::size_t dest_idx = net_.link_index(destination);
  const std::size_t target = n;  // virtual node: the destination link has been traversed
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> cost(n + 1, kInf);
  std::vector<double> time(n + 1, 0.0);
  std::vector<std::size_t> pred(n + 1, kNone);  // link index used to reach the node
  std::vector<bool> done(n + 1, false);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  const std::size_t start = net_.node_index(net_.link(origin).to);
  cost[start] = 0.0;
  time[start] = departure;
  heap.push({0.0, start});

  while (!heap.empty()) {
    const auto [c, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = true;
    if (u == target) break;
    for (std::size_t li : net_.out_links(u)) {
      const Link& l = net_.links()[li];
      if (!l.allows(mode)) continue;
      const std::size_t v = li == dest_idx ? target : net_.node_index(l.to);
      if (done[v]) continue;
      const double t = time[u];
      const double nc = c + arc_cost(li, t, w);
      const double tt = tt_.empty() ? l.free_flow_time() : tt_.get(li, t);
      const bool better = nc < cost[v] || (nc == cost[v] && pred[v] != kNone && l.id < net_.links()[pred[v]].id);
      if (!better) continue;
      cost[v] = nc;
      time[v] = t + tt;
      pred[v] = li;
      heap.push({nc, v});
    }
  }
  if (pred[target] == kNone)
    throw RoutingError("no route from link " + std::to_string(origin) + " to link " + std::to_string(destination) +
                       " for mode " + std::string(to_string(mode)));

  std::vector<LinkId> out;
  std::size_t v = target;
  while (v != start) {
    const Link& l = net_.links()[pred[v]];
    out.push_back(l.id);
    v = net_.node_index(l.from);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace tollsim
