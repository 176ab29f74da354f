#include "ptroute/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace ptroute {

Network::Network(std::vector<std::string> nodes, std::vector<Edge> edges,
                 std::pair<std::string, std::string> od, std::vector<Route> routes)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), od_(std::move(od)),
      routes_(std::move(routes)) {
    edge_by_id_.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) edge_by_id_.emplace(edges_[e].id, e);

    multiplicity_.assign(edges_.size(), 0);
    route_edge_idx_.resize(routes_.size());
    std::unordered_set<std::string> seen_dangling;
    for (std::size_t r = 0; r < routes_.size(); ++r) {
        route_edge_idx_[r].reserve(routes_[r].edge_ids.size());
        for (const auto& id : routes_[r].edge_ids) {
            auto it = edge_by_id_.find(id);
            if (it == edge_by_id_.end()) {
                if (seen_dangling.insert(id).second) dangling_.push_back(id);
                continue;
            }
            route_edge_idx_[r].push_back(it->second);
            ++multiplicity_[it->second];
        }
    }
}

std::optional<std::size_t> Network::edge_index(const std::string& id) const {
    auto it = edge_by_id_.find(id);
    if (it == edge_by_id_.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::size_t>& Network::route_edges(std::size_t r) const {
    if (r >= routes_.size()) throw std::out_of_range("route index out of range");
    if (!dangling_.empty() && route_edge_idx_[r].size() != routes_[r].edge_ids.size())
        throw std::invalid_argument("route " + std::to_string(r) +
                                    " references unknown edge ids");
    return route_edge_idx_[r];
}

int Network::edge_route_multiplicity(std::size_t e) const {
    if (e >= edges_.size()) throw std::out_of_range("edge index out of range");
    return multiplicity_[e];
}

ValidationReport validate_network(const Network& net) {
    ValidationReport rep;
    for (const auto& id : net.dangling_edge_ids())
        rep.violations.push_back("route references missing edge id '" + id + "'");
    if (net.routes().empty()) rep.violations.push_back("route set is empty");

    std::unordered_set<std::string> ids;
    for (const auto& e : net.edges()) {
        if (!ids.insert(e.id).second)
            rep.violations.push_back("duplicate edge id '" + e.id + "'");
        if (!(e.free_flow_time > 0.0))
            rep.violations.push_back("edge '" + e.id + "': free_flow_time must be > 0");
        if (!(e.critical_flow > 0.0))
            rep.violations.push_back("edge '" + e.id + "': critical_flow must be > 0");
        if (!(e.critical_flow < e.max_flow))
            rep.violations.push_back("edge '" + e.id + "': requires critical_flow < max_flow");
        if (!(e.congestion_prob >= 0.0 && e.congestion_prob <= 1.0))
            rep.violations.push_back("edge '" + e.id + "': congestion_prob outside [0, 1]");
        if (e.reference && !(*e.reference > 0.0))
            rep.violations.push_back("edge '" + e.id + "': reference must be > 0");
    }

    // Path connectivity is only checkable when edges carry endpoints.
    for (std::size_t r = 0; r < net.routes().size(); ++r) {
        const auto& ids_r = net.routes()[r].edge_ids;
        if (ids_r.empty()) {
            rep.violations.push_back("route " + std::to_string(r) + " is empty");
            continue;
        }
        std::string cursor = net.od_pair().first;
        bool traceable = true;
        for (const auto& id : ids_r) {
            auto idx = net.edge_index(id);
            if (!idx) { traceable = false; break; }
            const Edge& e = net.edges()[*idx];
            if (!e.from || !e.to) { traceable = false; break; }
            if (*e.from != cursor) {
                rep.violations.push_back("route " + std::to_string(r) + ": edge '" + id +
                                         "' starts at '" + *e.from + "', expected '" + cursor +
                                         "'");
                traceable = false;
                break;
            }
            cursor = *e.to;
        }
        if (traceable && cursor != net.od_pair().second)
            rep.violations.push_back("route " + std::to_string(r) + " ends at '" + cursor +
                                     "', not the destination");
    }
    return rep;
}

double edge_flow(const Network& net, const FlowProfile& profile, const std::string& edge_id) {
    auto idx = net.edge_index(edge_id);
    if (!idx) throw std::invalid_argument("unknown edge id '" + edge_id + "'");
    return edge_flows(net, profile)[*idx];
}

std::vector<double> edge_flows(const Network& net, const FlowProfile& profile) {
    std::vector<double> f(net.edge_count(), 0.0);
    for (const auto& per_player : profile.flows) {
        if (per_player.size() != net.route_count())
            throw std::invalid_argument("flow profile has wrong route dimension");
        for (std::size_t r = 0; r < per_player.size(); ++r) {
            if (per_player[r] == 0.0) continue;
            for (std::size_t e : net.route_edges(r)) f[e] += per_player[r];
        }
    }
    return f;
}

std::vector<double> feasible_point(const PlayerSpec& spec, std::size_t n_routes) {
    if (n_routes == 0) throw std::invalid_argument("feasible_point requires n_routes >= 1");
    std::vector<double> x(n_routes, 0.0);
    x[0] = spec.total_demand;
    return x;
}

// Euclidean projection onto {x >= 0, sum x = demand}: sort-based threshold
// search (the classic O(n log n) simplex projection).
std::vector<double> project_to_action_set(const std::vector<double>& v, double demand) {
    if (demand < 0.0) throw std::invalid_argument("demand must be >= 0");
    const std::size_t n = v.size();
    if (n == 0) return {};
    if (demand == 0.0) return std::vector<double>(n, 0.0);

    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cum += u[i];
        const double t = (cum - demand) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;  // demand > 0 keeps this reachable at i = 0
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);

    // One exact renormalization pass soaks up the last few ulps so the
    // simplex constraint holds to ~1e-12 even after clipping.
    double s = std::accumulate(out.begin(), out.end(), 0.0);
    if (s > 0.0 && demand > 0.0) {
        const double scale = demand / s;
        for (auto& x : out) x *= scale;
    } else if (demand > 0.0) {
        out.assign(n, demand / static_cast<double>(n));
    }
    return out;
}

ValidationReport validate_profile(const Network& net, const FlowProfile& profile,
                                  const std::vector<PlayerSpec>& players, double tol) {
    ValidationReport rep;
    if (profile.flows.size() != players.size()) {
        rep.violations.push_back("profile has " + std::to_string(profile.flows.size()) +
                                 " players, expected " + std::to_string(players.size()));
        return rep;
    }
    for (std::size_t i = 0; i < players.size(); ++i) {
        const auto& x = profile.flows[i];
        if (x.size() != net.route_count()) {
            rep.violations.push_back("player '" + players[i].id + "': wrong route dimension");
            continue;
        }
        double sum = 0.0;
        for (double xi : x) {
            if (xi < -tol)
                rep.violations.push_back("player '" + players[i].id + "': negative route flow");
            sum += xi;
        }
        if (std::abs(sum - players[i].total_demand) > tol)
            rep.violations.push_back("player '" + players[i].id + "': route flows sum to " +
                                     std::to_string(sum) + ", demand is " +
                                     std::to_string(players[i].total_demand));
    }
    return rep;
}

FlowProfile normalize_profile(const FlowProfile& profile, const std::vector<PlayerSpec>& players) {
    FlowProfile out = profile;
    for (std::size_t i = 0; i < out.flows.size() && i < players.size(); ++i) {
        auto& x = out.flows[i];
        for (auto& xi : x) xi = std::max(xi, 0.0);
        const double sum = std::accumulate(x.begin(), x.end(), 0.0);
        const double demand = players[i].total_demand;
        if (demand == 0.0) {
            std::fill(x.begin(), x.end(), 0.0);
            continue;
        }
        if (sum <= 0.0)
            throw std::invalid_argument("player '" + players[i].id +
                                        "' has positive demand but zero flow mass");
        const double scale = demand / sum;
        for (auto& xi : x) xi *= scale;
    }
    return out;
}

}  // namespace ptroute
