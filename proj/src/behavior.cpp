#include "ptroute/behavior.hpp"

#include <cmath>
#include <stdexcept>

namespace ptroute {

namespace {

// (x)^beta with x >= 0. Bases below 1e-300 collapse to 0 so denormal
// intermediates cannot surface as NaN through log/exp paths.
double pow_beta(double x, double beta) {
    if (x <= 1e-300) return 0.0;
    return std::pow(x, beta);
}

void require_nonnegative_flow(double f) {
    if (f < 0.0) throw std::invalid_argument("flow must be >= 0");
}

}  // namespace

double bpr_cost(const Edge& edge, double f) {
    require_nonnegative_flow(f);
    const double ratio = f / edge.critical_flow;
    const double r2 = ratio * ratio;
    return edge.free_flow_time * (1.0 + 0.15 * r2 * r2);
}

double bpr_cost_derivative(const Edge& edge, double f) {
    require_nonnegative_flow(f);
    const double c4 = edge.critical_flow * edge.critical_flow * edge.critical_flow *
                      edge.critical_flow;
    return edge.free_flow_time * 0.6 * f * f * f / c4;
}

double prelec_weight(double p, double beta3) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside [0, 1]");
    if (p == 0.0) return 0.0;  // continuity convention: (-log 0) diverges
    if (p == 1.0) return 1.0;
    return std::exp(-std::pow(-std::log(p), beta3));
}

double value_function(double z, double z0, double beta, double lambda) {
    if (z >= z0) return pow_beta(z - z0, beta);
    return -lambda * pow_beta(z0 - z, beta);
}

ReferencePoint default_reference(const Edge& edge) {
    if (edge.reference) return {*edge.reference};
    return {bpr_cost(edge, edge.critical_flow)};
}

RelativeCost reference_relative_cost(const Edge& edge, const ReferencePoint& ref, double f) {
    const double c = bpr_cost(edge, f);
    if (c < ref.value) return {ref.value - c, Branch::gain};
    if (c > ref.value) return {c - ref.value, Branch::loss};
    return {0.0, Branch::zero};
}

double pt_edge_cost(const Edge& edge, const ReferencePoint& ref, const BehaviorParams& params,
                    double f) {
    const RelativeCost rc = reference_relative_cost(edge, ref, f);
    switch (rc.branch) {
        case Branch::gain: {
            // Reversed value function: loss aversion scales the gain side.
            const double w = params.weighting == WeightingMode::prelec
                                 ? prelec_weight(edge.congestion_prob, params.beta3)
                                 : 1.0;
            return w * params.lambda * pow_beta(rc.magnitude, params.beta);
        }
        case Branch::loss: {
            const double w = params.weighting == WeightingMode::prelec
                                 ? prelec_weight(1.0 - edge.congestion_prob, params.beta3)
                                 : 1.0;
            return -w * pow_beta(rc.magnitude, params.beta);
        }
        case Branch::zero: return 0.0;
    }
    return 0.0;
}

std::vector<ReferencePoint> default_references(const Network& net) {
    std::vector<ReferencePoint> refs;
    refs.reserve(net.edge_count());
    for (const auto& e : net.edges()) refs.push_back(default_reference(e));
    return refs;
}

double pt_route_cost(const Network& net, const std::vector<ReferencePoint>& refs,
                     const BehaviorParams& params, const FlowProfile& profile,
                     std::size_t route) {
    if (route >= net.route_count()) throw std::invalid_argument("unknown route index");
    const std::vector<double> f = edge_flows(net, profile);
    double total = 0.0;
    for (std::size_t e : net.route_edges(route))
        total += pt_edge_cost(net.edges()[e], refs[e], params, f[e]);
    return total;
}

double pt_player_cost(const Network& net, const std::vector<ReferencePoint>& refs,
                      const BehaviorParams& params, const FlowProfile& profile,
                      std::size_t player) {
    (void)player;  // the route sum is common to every player
    const std::vector<double> f = edge_flows(net, profile);
    double total = 0.0;
    for (std::size_t r = 0; r < net.route_count(); ++r)
        for (std::size_t e : net.route_edges(r))
            total += pt_edge_cost(net.edges()[e], refs[e], params, f[e]);
    return total;
}

double objective_player_cost(const Network& net, const FlowProfile& profile, std::size_t player) {
    (void)player;
    const std::vector<double> f = edge_flows(net, profile);
    double total = 0.0;
    for (std::size_t r = 0; r < net.route_count(); ++r)
        for (std::size_t e : net.route_edges(r)) total += bpr_cost(net.edges()[e], f[e]);
    return total;
}

}  // namespace ptroute
