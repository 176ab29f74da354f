#pragma once

#include <functional>
#include <vector>

#include "ptroute/sigmoid.hpp"

namespace ptroute {

using TargetFn = std::function<double(double)>;

struct FitConfig {
    double domain_end = 1.5;       // kappa: fit interval is [0, kappa]
    int grid_size = 301;           // uniform quadrature of the Phi integral
    int max_iterations = 500;      // per start
    double gradient_tol = 1e-8;    // BFGS stop on gradient norm
    double fd_step = 1e-7;         // forward-difference step scale (relative)
};

struct FitResult {
    SigmoidParams params;
    double max_error = 0.0;
    double min_error = 0.0;
    double mean_error = 0.0;
    int grid_size = 0;
    bool converged = false;
    int iterations = 0;
    double objective = 0.0;  // Phi at the returned params
};

/// Least-squares fit of the four deltas to `target` on a uniform grid over
/// [0, kappa]: BFGS with numerical gradients from 8 deterministic starts
/// (both d1 signs x d2 in {k/4, k/2, 3k/4, k}), best objective wins, ties by
/// lowest start index. The result is canonicalized to the d3 > 0 gauge.
/// Throws std::invalid_argument on kappa <= 0, std::domain_error when the
/// target is non-finite on the grid.
FitResult fit_sigmoid(const TargetFn& target, double domain_end, const FitConfig& config);

struct ProfileRow {
    double f = 0.0;
    double pt_cost = 0.0;
    double sigma = 0.0;
    double abs_error = 0.0;
};

/// Per-point comparison table on a uniform grid over [0, kappa] — the data
/// behind the error plots. Statistics of column 4 reproduce FitResult's
/// errors exactly when grid sizes match.
std::vector<ProfileRow> error_profile(const TargetFn& target, const SigmoidParams& params,
                                      double domain_end, int grid_size);

struct ErrorBound {
    double gamma = 0.0;
    double epsilon = 0.0;
};

struct BoundCheckReport {
    ErrorBound bound;            // gamma evaluated at the params as given
    double gamma_mirrored = 0.0; // gamma of the equivalent opposite gauge
    double gamma_used = 0.0;     // the positive-gauge constant the bound tests
    double max_signed_error = 0.0;
    double margin = 0.0;         // gamma_used + epsilon - max_signed_error
    bool gamma_positive = false; // sign flag for the literal evaluation
    bool pass = false;
};

/// Analytic error-bound check: gamma = d1 / (1 + exp((d2 - f_crt)/d3))
/// evaluated at the critical flow, then max signed error of (target - sigma)
/// on the grid is compared against gamma + epsilon. gamma flips sign between
/// the two equivalent gauges of sigma; the check uses whichever is positive
/// and flags the literal sign.
BoundCheckReport check_error_bound(const TargetFn& target, const SigmoidParams& params,
                                   double epsilon, double critical_flow, double domain_end,
                                   int grid_size);

}  // namespace ptroute
