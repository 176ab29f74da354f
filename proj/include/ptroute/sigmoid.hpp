#pragma once

#include <cmath>
#include <string>
#include <utility>

namespace ptroute {

/// The four-coefficient logistic approximating the perceived edge cost on
/// [0, domain_end]:  sigma(f) = d1 / (1 + exp((d2 - f)/d3)) + d4.
///
/// The parameterization is redundant: (d1, d2, d3, d4) and
/// (-d1, d2, -d3, d4 + d1) describe the identical curve. mirrored() maps
/// between the two gauges; the fitter always reports the d3 > 0 gauge.
struct SigmoidParams {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 1.0;
    double d4 = 0.0;
    double domain_end = 1.0;

    SigmoidParams mirrored() const { return {-d1, d2, -d3, d4 + d1, domain_end}; }
};

namespace detail {

// Shared scalar core, also the reference the SIMD kernels are checked
// against. Past |u| = 40 the logistic saturates; the asymptotic values keep
// exp() from overflowing.
inline double sigmoid_core(double d1, double d2, double d3, double d4, double f) {
    const double u = (d2 - f) / d3;
    if (u > 40.0) return d4;
    if (u < -40.0) return d1 + d4;
    return d1 / (1.0 + std::exp(u)) + d4;
}

}  // namespace detail

/// Evaluate sigma(f). Throws std::invalid_argument when d3 = 0.
double sigmoid(const SigmoidParams& params, double f);

/// First and second derivatives in f. With s = 1/(1 + e^u), u = (d2 - f)/d3:
///   sigma'  = d1 * s(1-s) / d3
///   sigma'' = d1 * s(1-s)(1-2s) / d3^2
/// Both vanish in the saturated |u| > 40 regime.
std::pair<double, double> sigmoid_derivatives(const SigmoidParams& params, double f);

struct ConcavityCertificate {
    bool concave = false;
    std::string condition;  // "case_i", "case_ii", or "none"
};

/// Strict-concavity check for sigma on [lo, hi]. sigma'' has the sign of
/// d1 * (1 - 2s), so concavity requires the inflection d2 to clear the
/// interval on the correct side:
///   d3 > 0:  case i  d1 > 0 and d2 <= lo;  case ii  d1 < 0 and d2 >= hi
///   d3 < 0:  mirrored (equivalent gauge of the same curve)
/// The certificate agrees with the sampled sign of sigma'' by construction.
ConcavityCertificate concavity_certificate(const SigmoidParams& params, double lo, double hi);

}  // namespace ptroute
