#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ptroute {

/// A road segment with BPR latency parameters and its congestion probability.
struct Edge {
    std::string id;
    double free_flow_time = 0.0;   // travel time at zero flow
    double critical_flow = 0.0;    // flow level where congestion becomes unacceptable
    double max_flow = 0.0;         // jam capacity, strictly above critical_flow
    double congestion_prob = 0.0;  // probability the edge stays below critical flow
    std::optional<double> reference;  // overrides the default reference cost
    std::optional<std::string> from;  // endpoints, optional; enable path checks
    std::optional<std::string> to;
};

/// An origin-destination route given as a sequence of edge ids.
struct Route {
    std::vector<std::string> edge_ids;
};

struct PlayerSpec {
    std::string id;
    double total_demand = 0.0;
};

/// Per-player split of demand across routes: flows[player][route].
struct FlowProfile {
    std::vector<std::vector<double>> flows;

    std::size_t player_count() const { return flows.size(); }
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Directed multigraph with one OD pair and an explicit route set.
/// Immutable after construction; route/edge indices are precomputed so
/// flow aggregation is just table lookups.
class Network {
  public:
    Network() = default;
    Network(std::vector<std::string> nodes, std::vector<Edge> edges,
            std::pair<std::string, std::string> od, std::vector<Route> routes);

    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::pair<std::string, std::string>& od_pair() const { return od_; }
    const std::vector<Route>& routes() const { return routes_; }

    std::size_t edge_count() const { return edges_.size(); }
    std::size_t route_count() const { return routes_.size(); }

    /// Index of an edge id, or nullopt for unknown ids.
    std::optional<std::size_t> edge_index(const std::string& id) const;

    /// Edge indices along route r. Throws if the route references unknown ids.
    const std::vector<std::size_t>& route_edges(std::size_t r) const;

    /// Number of occurrences of edge e across all routes (the weight an
    /// edge carries in the all-routes cost sum).
    int edge_route_multiplicity(std::size_t e) const;

    /// True when every route reference resolves to a known edge.
    bool routes_resolved() const { return dangling_.empty(); }
    const std::vector<std::string>& dangling_edge_ids() const { return dangling_; }

  private:
    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    std::pair<std::string, std::string> od_;
    std::vector<Route> routes_;

    std::unordered_map<std::string, std::size_t> edge_by_id_;
    std::vector<std::vector<std::size_t>> route_edge_idx_;
    std::vector<int> multiplicity_;
    std::vector<std::string> dangling_;
};

/// Structural checks: dangling edge ids, empty route set, parameter-domain violations,
/// probability domains, and (when endpoints are present) route connectivity.
ValidationReport validate_network(const Network& net);

/// Aggregate flow on one edge: sum over players and routes containing it.
double edge_flow(const Network& net, const FlowProfile& profile, const std::string& edge_id);

/// Aggregate flow on every edge, indexed like net.edges().
std::vector<double> edge_flows(const Network& net, const FlowProfile& profile);

/// The all-on-first-route allocation (x̄, 0, ..., 0).
std::vector<double> feasible_point(const PlayerSpec& spec, std::size_t n_routes);

/// Euclidean projection onto {x >= 0, sum x = demand}.
std::vector<double> project_to_action_set(const std::vector<double>& v, double demand);

/// Checks nonnegativity and per-player demand sums against tol (1e-9 default).
ValidationReport validate_profile(const Network& net, const FlowProfile& profile,
                                  const std::vector<PlayerSpec>& players, double tol = 1e-9);

/// Rescales each player's route flows to sum exactly to their demand.
/// Throws std::invalid_argument when a player has positive demand but a
/// zero-sum flow vector.
FlowProfile normalize_profile(const FlowProfile& profile, const std::vector<PlayerSpec>& players);

}  // namespace ptroute
