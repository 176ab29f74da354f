#pragma once

#include <vector>

#include "ptroute/network.hpp"

namespace ptroute {

enum class WeightingMode { unit, prelec };

/// Prospect-theory parameters shared by the whole population.
/// beta is the diminishing-sensitivity exponent (beta1 = beta2 = beta),
/// lambda the loss-aversion coefficient, beta3 the Prelec rational index.
struct BehaviorParams {
    double beta = 0.5;
    double lambda = 2.0;
    double beta3 = 0.65;
    WeightingMode weighting = WeightingMode::unit;
};

/// Reference cost an edge is judged against. Distinct from the edge's
/// free-flow time: the default is the BPR cost at critical flow, which is
/// 1.15x free flow.
struct ReferencePoint {
    double value = 0.0;
};

enum class Branch { gain, zero, loss };

struct RelativeCost {
    double magnitude = 0.0;
    Branch branch = Branch::zero;
};

/// BPR travel time: c0 * (1 + (3/20) * (f / f_crt)^4).
double bpr_cost(const Edge& edge, double f);

/// d/df of bpr_cost: c0 * (3/5) * f^3 / f_crt^4.
double bpr_cost_derivative(const Edge& edge, double f);

/// Prelec weighting w(p) = exp(-(-log p)^beta3), with w(0) = 0 by continuity.
double prelec_weight(double p, double beta3);

/// S-shaped value function: (z - z0)^beta for gains, -lambda * (z0 - z)^beta
/// for losses.
double value_function(double z, double z0, double beta, double lambda);

/// Default reference: bpr_cost at critical flow, unless the edge overrides it.
ReferencePoint default_reference(const Edge& edge);

/// |c_e(f) - ref| tagged gain/loss/zero by which side of the reference the
/// BPR cost falls on (cheaper than reference = gain).
RelativeCost reference_relative_cost(const Edge& edge, const ReferencePoint& ref, double f);

/// Perceived edge value: the reversed value function of the reference-relative
/// cost, weighted by the mobility prospect. Gains carry w(pi)*lambda, losses
/// -w(1-pi); exactly one branch is active per f. `unit` mode sets both
/// weights to 1.
double pt_edge_cost(const Edge& edge, const ReferencePoint& ref, const BehaviorParams& params,
                    double f);

/// Per-edge reference points for a network, honoring per-edge overrides.
std::vector<ReferencePoint> default_references(const Network& net);

/// Sum of pt_edge_cost over a route's edges at the aggregated edge flows.
double pt_route_cost(const Network& net, const std::vector<ReferencePoint>& refs,
                     const BehaviorParams& params, const FlowProfile& profile, std::size_t route);

/// Perceived player value: sum of pt_route_cost over ALL routes. Every
/// player shares this objective (the route sum does not restrict to the
/// player's own flow).
double pt_player_cost(const Network& net, const std::vector<ReferencePoint>& refs,
                      const BehaviorParams& params, const FlowProfile& profile,
                      std::size_t player);

/// Objective (non-perceived) counterpart: sum of bpr_cost over all routes'
/// edges at the aggregated flows.
double objective_player_cost(const Network& net, const FlowProfile& profile, std::size_t player);

}  // namespace ptroute
