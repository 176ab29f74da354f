#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ptroute/network.hpp"
#include "ptroute/sigmoid.hpp"

namespace ptroute {

/// Fitted sigmoid per edge id.
using SigmoidMap = std::unordered_map<std::string, SigmoidParams>;

struct SolverConfig {
    int max_outer_iterations = 500;
    double step_size = 0.5;        // initial projected-gradient step
    double convergence_tol = 1e-9; // profile-change max norm / inner gradient norm
    int deviation_samples = 64;    // random interior deviations per player
    std::uint64_t seed = 42;       // for the VI certificate sampling
};

struct EquilibriumResult {
    FlowProfile profile;
    double vi_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> per_player_values;
};

/// The smoothed common objective W(x) = sum over routes, edges of
/// sigma_e(f_e) — every player maximizes the same function, so an edge
/// contributes once per route occurrence.
double smoothed_value(const Network& net, const SigmoidMap& sigmoids, const FlowProfile& profile);

/// dW/dx_i^r = sum over occurrences e in r of m_e * sigma_e'(f_e), where
/// m_e is the edge's route multiplicity. Identical for all players (the
/// objective is common); matches finite differences of smoothed_value.
/// Throws std::invalid_argument when an edge lacks fitted params.
std::vector<double> player_gradient(const Network& net, const SigmoidMap& sigmoids,
                                    const FlowProfile& profile, std::size_t player);

struct BestResponseResult {
    std::vector<double> x;
    bool converged = false;  // projected-gradient norm reached convergence_tol
};

/// Best response of one player with opponents fixed: projected gradient
/// ascent on the scaled simplex from the player's current allocation,
/// stopping when the projected-gradient norm drops below convergence_tol.
/// Non-convergence is flagged, with the best iterate kept.
BestResponseResult best_response(const Network& net, const SigmoidMap& sigmoids,
                                 const FlowProfile& profile, std::size_t player, double demand,
                                 const SolverConfig& config);

/// Gauss–Seidel iterated best response in ascending player order, starting
/// from each player's feasible_point. Converged when the profile change
/// (max norm) falls below convergence_tol; the VI certificate is attached
/// either way.
EquilibriumResult solve_nash(const Network& net, const std::vector<PlayerSpec>& players,
                             const SigmoidMap& sigmoids, const SolverConfig& config);

/// Variational-inequality certificate under the maximization convention: residual is
/// the minimum of <-grad_i, d - x_i> over sampled feasible deviations d
/// (simplex vertices + seeded uniform interior points). Nonnegative means no
/// sampled deviation improves any player.
double vi_certificate(const Network& net, const SigmoidMap& sigmoids, const FlowProfile& profile,
                      const std::vector<PlayerSpec>& players, const SolverConfig& config);

/// Exhaustive grid oracle for small instances (n <= 2 players, |R| <= 3
/// routes — throws std::invalid_argument beyond). Returns every profile on
/// the lattice where no player improves by more than `tol` by moving to any
/// other of their grid points.
std::vector<FlowProfile> brute_force_nash(const Network& net,
                                          const std::vector<PlayerSpec>& players,
                                          const SigmoidMap& sigmoids, double resolution,
                                          double tol = 1e-9);

}  // namespace ptroute
