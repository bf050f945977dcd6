#pragma once

#include <vector>

#include "tollsim/config.hpp"
#include "tollsim/mobsim.hpp"
#include "tollsim/scenario.hpp"
#include "tollsim/tolling.hpp"

namespace tollsim {

/// Agent-specific weights of the generalized link cost. Costs are disutilities:
///   cost(r, t) = -beta_trav * tt(r, t) / 3600 - beta_m_n * (gamma_d * length - toll(r, t)) - beta_d * length
/// floored at kMinArcCost.
struct CostWeights {
  double beta_trav = -6.0;  // utils/h
  double beta_m_n = 1.0;    // utils/currency
  double gamma_d = 0.0;     // currency/m
  double beta_d = 0.0;      // utils/m

  static CostWeights for_mode(const ScoringParams& p, Mode mode, double beta_m_n);
};

inline constexpr double kMinArcCost = 1e-6;

/// Time-dependent least-cost routing on the previous iteration's travel times and tolls.
/// Equal-cost alternatives resolve towards the predecessor link with the smaller id.
class Router {
 public:
  Router(const Network& net, const TravelTimeTable& tt, const TollSchedule& tolls)
      : net_(net), tt_(tt), tolls_(tolls) {}

  /// Arc cost of entering link index `li` at `time`.
  double arc_cost(std::size_t li, double time, const CostWeights& w) const;

  /// Links to traverse after leaving `origin`, ending with `destination`. Empty when both are
  /// the same link. Throws RoutingError when the destination cannot be reached.
  std::vector<LinkId> route(LinkId origin, LinkId destination, double departure, Mode mode,
                            const CostWeights& w) const;

 private:
  const Network& net_;
  const TravelTimeTable& tt_;
  const TollSchedule& tolls_;
};

}  // namespace tollsim
