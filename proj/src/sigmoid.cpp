#include "ptroute/sigmoid.hpp"

#include <stdexcept>

namespace ptroute {

namespace {

void require_slope(const SigmoidParams& p) {
    if (p.d3 == 0.0) throw std::invalid_argument("sigmoid requires d3 != 0");
}

}  // namespace

double sigmoid(const SigmoidParams& params, double f) {
    require_slope(params);
    return detail::sigmoid_core(params.d1, params.d2, params.d3, params.d4, f);
}

std::pair<double, double> sigmoid_derivatives(const SigmoidParams& params, double f) {
    require_slope(params);
    const double u = (params.d2 - f) / params.d3;
    if (u > 40.0 || u < -40.0) return {0.0, 0.0};  // saturated tails
    const double s = 1.0 / (1.0 + std::exp(u));
    const double s1 = s * (1.0 - s);
    const double first = params.d1 * s1 / params.d3;
    const double second = params.d1 * s1 * (1.0 - 2.0 * s) / (params.d3 * params.d3);
    return {first, second};
}

ConcavityCertificate concavity_certificate(const SigmoidParams& params, double lo, double hi) {
    require_slope(params);
    if (!(lo < hi) || lo < 0.0)
        throw std::invalid_argument("concavity interval requires 0 <= lo < hi");
    if (params.d1 == 0.0) return {false, "none"};  // constant curve, not strictly concave

    // Work in the d3 > 0 gauge; the mirrored parameters describe the same
    // curve, so its certificate is this curve's certificate.
    const SigmoidParams p = params.d3 > 0.0 ? params : params.mirrored();

    // sign(sigma'') = sign(d1) * sign(1 - 2s); with d3 > 0, s < 1/2 left of
    // the inflection d2. Concavity on [lo, hi] therefore needs d2 outside
    // the interval, on the side matching d1's sign.
    if (p.d1 > 0.0 && p.d2 <= lo) return {true, "case_i"};
    if (p.d1 < 0.0 && p.d2 >= hi) return {true, "case_ii"};
    return {false, "none"};
}

}  // namespace ptroute
