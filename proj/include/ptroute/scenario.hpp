#pragma once

#include <string>
#include <vector>

#include "ptroute/behavior.hpp"
#include "ptroute/equilibrium.hpp"
#include "ptroute/fit.hpp"
#include "ptroute/network.hpp"

namespace ptroute {

/// Everything one run needs, loaded from a single JSON scenario file.
struct ScenarioConfig {
    Network network;
    std::vector<PlayerSpec> players;
    BehaviorParams behavior;
    FitConfig fit;
    SolverConfig solver;
    std::string out_dir = ".";
};

/// Parse a scenario from JSON text. Field names are the file contract:
/// nodes, edges[{id, free_flow_time, critical_flow, max_flow,
/// congestion_prob, reference?, from?, to?}], od, routes, players[{id,
/// demand}], behavior{beta, lambda, beta3, weighting}, plus optional fit /
/// solver / outputs blocks. Throws std::runtime_error with a diagnostic on
/// malformed input.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario(const std::string& path);

/// Structural + domain checks across the whole config (network validation,
/// parameter domains, kappa vs max_flow, solver positivity).
ValidationReport validate_scenario(const ScenarioConfig& sc);

/// The embedded single-edge setup behind the golden reproduction: free flow
/// 13, critical flow 1, reference 14.95, beta 0.5, lambda 2, unit weighting,
/// fit on [0, 1.5].
ScenarioConfig golden_scenario();

/// Published coefficients and error statistics the golden fit is compared
/// against.
struct GoldenTargets {
    SigmoidParams params;
    double max_error = 0.0;
    double min_error = 0.0;
    double mean_error = 0.0;
};
GoldenTargets golden_targets();

/// The PT cost curve of one edge under a scenario's behavior parameters.
TargetFn pt_target(const Edge& edge, const BehaviorParams& params);

struct ReproduceReport {
    FitResult fit;
    GoldenTargets target;
    BoundCheckReport bound;      // epsilon 0.1 at the edge's critical flow
    EquilibriumResult eq;
    double objective_cost = 0.0; // BPR player cost at equilibrium
    double perceived_cost = 0.0; // PT player cost at equilibrium
    bool params_within = false;  // each delta within 25% of the target
    bool errors_within = false;  // max/mean within 15%, min below 0.01
    bool pass = false;           // either criterion

    double fit_seconds = 0.0;    // reported to stderr only, never in files
};

/// Fit + solve + compare for the golden scenario (or any single-run config).
ReproduceReport run_reproduce(const ScenarioConfig& sc);

// --- serialization used by the CLI (stable field names, stable layout) ---
std::string fit_result_json(const FitResult& fr);
std::string profile_csv(const std::vector<ProfileRow>& rows);
std::string equilibrium_json(const ScenarioConfig& sc, const EquilibriumResult& eq);
std::string reproduce_json(const ReproduceReport& rep);
std::string reproduce_text(const ReproduceReport& rep);

}  // namespace ptroute
