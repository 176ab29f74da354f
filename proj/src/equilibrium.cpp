#include "ptroute/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ptroute {

namespace {

// Edge-indexed view of the sigmoid map plus multiplicities, resolved once so
// the solver's inner loops touch no hash tables.
struct Resolved {
    std::vector<SigmoidParams> sp;
    std::vector<double> mult;
};

Resolved resolve(const Network& net, const SigmoidMap& sigmoids) {
    Resolved ctx;
    ctx.sp.reserve(net.edge_count());
    ctx.mult.reserve(net.edge_count());
    for (std::size_t e = 0; e < net.edge_count(); ++e) {
        const auto& edge = net.edges()[e];
        auto it = sigmoids.find(edge.id);
        if (it == sigmoids.end())
            throw std::invalid_argument("no fitted sigmoid for edge '" + edge.id + "'");
        ctx.sp.push_back(it->second);
        ctx.mult.push_back(static_cast<double>(net.edge_route_multiplicity(e)));
    }
    return ctx;
}

double sigma_prime(const SigmoidParams& p, double f) {
    const double u = (p.d2 - f) / p.d3;
    if (u > 40.0 || u < -40.0) return 0.0;
    const double e = std::exp(u);
    return p.d1 * e / (p.d3 * (1.0 + e) * (1.0 + e));
}

double w_of_flows(const Resolved& ctx, const std::vector<double>& f) {
    double w = 0.0;
    for (std::size_t e = 0; e < f.size(); ++e) {
        if (ctx.mult[e] == 0.0) continue;
        const auto& p = ctx.sp[e];
        w += ctx.mult[e] * detail::sigmoid_core(p.d1, p.d2, p.d3, p.d4, f[e]);
    }
    return w;
}

void gradient_of_flows(const Network& net, const Resolved& ctx, const std::vector<double>& f,
                       std::vector<double>& g) {
    g.assign(net.route_count(), 0.0);
    for (std::size_t r = 0; r < net.route_count(); ++r)
        for (std::size_t e : net.route_edges(r))
            g[r] += ctx.mult[e] * sigma_prime(ctx.sp[e], f[e]);
}

// Flows of everyone but `player`, the fixed background of a best response.
std::vector<double> background_flows(const Network& net, const FlowProfile& profile,
                                     std::size_t player) {
    std::vector<double> f(net.edge_count(), 0.0);
    for (std::size_t i = 0; i < profile.flows.size(); ++i) {
        if (i == player) continue;
        for (std::size_t r = 0; r < net.route_count(); ++r) {
            if (profile.flows[i][r] == 0.0) continue;
            for (std::size_t e : net.route_edges(r)) f[e] += profile.flows[i][r];
        }
    }
    return f;
}

void add_own_flows(const Network& net, const std::vector<double>& base,
                   const std::vector<double>& x, std::vector<double>& f) {
    f = base;
    for (std::size_t r = 0; r < x.size(); ++r) {
        if (x[r] == 0.0) continue;
        for (std::size_t e : net.route_edges(r)) f[e] += x[r];
    }
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

BestResponseResult best_response_impl(const Network& net, const Resolved& ctx,
                                      const FlowProfile& profile, std::size_t player,
                                      double demand, const SolverConfig& config) {
    constexpr int kInnerCap = 2000;
    const std::vector<double> base = background_flows(net, profile, player);
    std::vector<double> x = profile.flows[player];
    std::vector<double> f, g, trial, xn, fn_flows;

    bool reached_tol = false;
    for (int it = 0; it < kInnerCap; ++it) {
        add_own_flows(net, base, x, f);
        gradient_of_flows(net, ctx, f, g);
        const double f0 = w_of_flows(ctx, f);

        // Ascent with backtracking; projection keeps the iterate feasible.
        double t = config.step_size;
        bool accepted = false;
        for (int b = 0; b < 40; ++b) {
            trial.resize(x.size());
            for (std::size_t r = 0; r < x.size(); ++r) trial[r] = x[r] + t * g[r];
            xn = project_to_action_set(trial, demand);
            add_own_flows(net, base, xn, fn_flows);
            const double fn = w_of_flows(ctx, fn_flows);
            double gain = 0.0;
            for (std::size_t r = 0; r < x.size(); ++r) gain += g[r] * (xn[r] - x[r]);
            if (fn >= f0 + 1e-4 * gain - 1e-15) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }

        // Projected-gradient norm at the base step decides optimality.
        trial.resize(x.size());
        for (std::size_t r = 0; r < x.size(); ++r) trial[r] = x[r] + config.step_size * g[r];
        const auto px = project_to_action_set(trial, demand);
        double pg = 0.0;
        for (std::size_t r = 0; r < x.size(); ++r) {
            const double d = (x[r] - px[r]) / config.step_size;
            pg += d * d;
        }
        if (std::sqrt(pg) < config.convergence_tol) {
            reached_tol = true;
            break;
        }
        if (!accepted) break;
        x = xn;
    }
    return {x, reached_tol};
}

}  // namespace

double smoothed_value(const Network& net, const SigmoidMap& sigmoids,
                      const FlowProfile& profile) {
    const Resolved ctx = resolve(net, sigmoids);
    return w_of_flows(ctx, edge_flows(net, profile));
}

std::vector<double> player_gradient(const Network& net, const SigmoidMap& sigmoids,
                                    const FlowProfile& profile, std::size_t player) {
    if (player >= profile.flows.size()) throw std::invalid_argument("player index out of range");
    const Resolved ctx = resolve(net, sigmoids);
    std::vector<double> g;
    gradient_of_flows(net, ctx, edge_flows(net, profile), g);
    return g;
}

BestResponseResult best_response(const Network& net, const SigmoidMap& sigmoids,
                                 const FlowProfile& profile, std::size_t player, double demand,
                                 const SolverConfig& config) {
    if (player >= profile.flows.size()) throw std::invalid_argument("player index out of range");
    return best_response_impl(net, resolve(net, sigmoids), profile, player, demand, config);
}

EquilibriumResult solve_nash(const Network& net, const std::vector<PlayerSpec>& players,
                             const SigmoidMap& sigmoids, const SolverConfig& config) {
    const Resolved ctx = resolve(net, sigmoids);

    FlowProfile prof;
    prof.flows.reserve(players.size());
    for (const auto& p : players) prof.flows.push_back(feasible_point(p, net.route_count()));

    SolverConfig inner = config;
    inner.convergence_tol = config.convergence_tol * 0.1;

    EquilibriumResult res;
    res.converged = false;
    int it = 0;
    for (; it < config.max_outer_iterations; ++it) {
        double delta = 0.0;
        for (std::size_t i = 0; i < players.size(); ++i) {
            auto br = best_response_impl(net, ctx, prof, i, players[i].total_demand, inner);
            delta = std::max(delta, max_abs_diff(br.x, prof.flows[i]));
            prof.flows[i] = std::move(br.x);
        }
        if (delta < config.convergence_tol) {
            res.converged = true;
            ++it;
            break;
        }
    }

    res.profile = prof;
    res.iterations = it;
    res.vi_residual = vi_certificate(net, sigmoids, prof, players, config);
    const double w = w_of_flows(ctx, edge_flows(net, prof));
    res.per_player_values.assign(players.size(), w);
    return res;
}

double vi_certificate(const Network& net, const SigmoidMap& sigmoids, const FlowProfile& profile,
                      const std::vector<PlayerSpec>& players, const SolverConfig& config) {
    const Resolved ctx = resolve(net, sigmoids);
    const auto flows = edge_flows(net, profile);
    const std::size_t n_routes = net.route_count();
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> g;
    for (std::size_t i = 0; i < players.size(); ++i) {
        gradient_of_flows(net, ctx, flows, g);
        const auto& x = profile.flows[i];
        const double demand = players[i].total_demand;

        auto consider = [&](const std::vector<double>& dev) {
            double inner = 0.0;
            for (std::size_t r = 0; r < n_routes; ++r) inner += -g[r] * (dev[r] - x[r]);
            residual = std::min(residual, inner);
        };

        // Extreme deviations: all demand on a single route.
        for (std::size_t r = 0; r < n_routes; ++r) {
            std::vector<double> v(n_routes, 0.0);
            v[r] = demand;
            consider(v);
        }
        // Uniform interior samples of the scaled simplex.
        for (int s = 0; s < config.deviation_samples; ++s) {
            std::vector<double> v(n_routes);
            double sum = 0.0;
            for (auto& vr : v) {
                vr = -std::log(1.0 - uni(rng));
                sum += vr;
            }
            for (auto& vr : v) vr = demand * vr / sum;
            consider(v);
        }
    }
    return residual;
}

std::vector<FlowProfile> brute_force_nash(const Network& net,
                                          const std::vector<PlayerSpec>& players,
                                          const SigmoidMap& sigmoids, double resolution,
                                          double tol) {
    const std::size_t n = players.size();
    const std::size_t n_routes = net.route_count();
    if (n == 0 || n > 2 || n_routes == 0 || n_routes > 3)
        throw std::invalid_argument("brute force handles n <= 2 players and |R| <= 3 routes");
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");

    const Resolved ctx = resolve(net, sigmoids);

    auto grid_points = [&](double d) {
        std::vector<std::vector<double>> pts;
        const int steps = static_cast<int>(std::llround(d / resolution));
        if (n_routes == 1) {
            pts.push_back({d});
        } else if (n_routes == 2) {
            if (steps == 0) {
                pts.push_back({0.0, d});
            } else {
                for (int k = 0; k <= steps; ++k) {
                    const double a = static_cast<double>(k) * d / static_cast<double>(steps);
                    pts.push_back({a, d - a});
                }
            }
        } else {
            // The last coordinate absorbs any remainder of d / resolution.
            for (int a = 0; a <= steps; ++a)
                for (int b = 0; b <= steps - a; ++b)
                    pts.push_back({static_cast<double>(a) * resolution,
                                   static_cast<double>(b) * resolution,
                                   std::max(d - static_cast<double>(a + b) * resolution, 0.0)});
        }
        return pts;
    };

    std::vector<double> f;
    auto value_of = [&](const std::vector<double>& a, const std::vector<double>* b) {
        f.assign(net.edge_count(), 0.0);
        for (std::size_t r = 0; r < n_routes; ++r) {
            double xr = a[r] + (b ? (*b)[r] : 0.0);
            if (xr == 0.0) continue;
            for (std::size_t e : net.route_edges(r)) f[e] += xr;
        }
        return w_of_flows(ctx, f);
    };

    std::vector<FlowProfile> found;
    if (n == 1) {
        const auto pts = grid_points(players[0].total_demand);
        std::vector<double> vals(pts.size());
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts.size(); ++k) {
            vals[k] = value_of(pts[k], nullptr);
            mx = std::max(mx, vals[k]);
        }
        for (std::size_t k = 0; k < pts.size(); ++k)
            if (vals[k] >= mx - tol) found.push_back(FlowProfile{{pts[k]}});
        return found;
    }

    const auto pa = grid_points(players[0].total_demand);
    const auto pb = grid_points(players[1].total_demand);
    std::vector<double> vals(pa.size() * pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j)
            vals[i * pb.size() + j] = value_of(pa[i], &pb[j]);

    // Player 1 deviates over i at fixed j; player 2 over j at fixed i.
    std::vector<double> best_given_b(pb.size(), -std::numeric_limits<double>::infinity());
    std::vector<double> best_given_a(pa.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j) {
            const double v = vals[i * pb.size() + j];
            best_given_b[j] = std::max(best_given_b[j], v);
            best_given_a[i] = std::max(best_given_a[i], v);
        }
    for (std::size_t i = 0; i < pa.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j) {
            const double v = vals[i * pb.size() + j];
            if (v >= best_given_b[j] - tol && v >= best_given_a[i] - tol)
                found.push_back(FlowProfile{{pa[i], pb[j]}});
        }
    return found;
}

}  // namespace ptroute
