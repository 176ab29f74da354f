#include "ptroute/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptroute/kernels.hpp"

namespace ptroute {

namespace {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double norm2(const Vec4& a) { return std::sqrt(dot(a, a)); }

Mat4 identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

struct GridObjective {
    const std::vector<double>& grid;
    const std::vector<double>& target;
    double domain_end;

    double operator()(const Vec4& x) const {
        const SigmoidParams p{x[0], x[1], x[2], x[3], domain_end};
        return kernels::sigmoid_mse(p, grid.data(), target.data(), grid.size());
    }
};

// Forward differences with a step relative to the coordinate scale; a flat
// absolute step would drown the 1e-6-level identifiability the self-fit
// property needs.
Vec4 gradient(const GridObjective& phi, const Vec4& x, double f0, double step_scale) {
    Vec4 g{};
    for (int i = 0; i < 4; ++i) {
        const double h = step_scale * std::max(std::abs(x[i]), 1e-3);
        Vec4 xp = x;
        xp[i] += h;
        g[i] = (phi(xp) - f0) / h;
    }
    return g;
}

struct StartOutcome {
    Vec4 x{};
    double phi = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

StartOutcome bfgs_minimize(const GridObjective& phi, Vec4 x, const FitConfig& cfg) {
    double f = phi(x);
    Vec4 g = gradient(phi, x, f, cfg.fd_step);
    Mat4 h = identity();
    bool first = true;  // Shanno–Phua sizing precedes the first update

    bool converged = norm2(g) < cfg.gradient_tol;
    int it = 0;
    while (it < cfg.max_iterations && !converged) {
        ++it;
        Vec4 p{};
        for (int i = 0; i < 4; ++i)
            p[i] = -(h[i][0] * g[0] + h[i][1] * g[1] + h[i][2] * g[2] + h[i][3] * g[3]);
        double gp = dot(g, p);
        if (gp >= 0.0) {  // curvature lost; restart from steepest descent
            h = identity();
            for (int i = 0; i < 4; ++i) p[i] = -g[i];
            gp = dot(g, p);
            if (gp >= 0.0) break;
        }

        // Armijo backtracking with quadratic interpolation of the step.
        double t = 1.0;
        double fn = 0.0;
        bool ok = false;
        Vec4 xn{};
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < 4; ++i) xn[i] = x[i] + t * p[i];
            fn = phi(xn);
            if (fn <= f + 1e-4 * t * gp) {
                ok = true;
                break;
            }
            const double denom = 2.0 * (fn - f - gp * t);
            const double tq = denom > 0.0 ? -gp * t * t / denom : 0.5 * t;
            t = std::min(std::max(tq, 0.1 * t), 0.5 * t);
        }
        if (!ok) break;  // no descent left at this resolution

        const Vec4 gn = gradient(phi, xn, fn, cfg.fd_step);
        Vec4 s{}, y{};
        for (int i = 0; i < 4; ++i) {
            s[i] = t * p[i];
            y[i] = gn[i] - g[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * norm2(s) * norm2(y)) {
            if (first) {
                const double tau = sy / dot(y, y);
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) h[i][j] = (i == j) ? tau : 0.0;
                first = false;
            }
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T
            const double r = 1.0 / sy;
            Vec4 hy{};
            for (int i = 0; i < 4; ++i)
                hy[i] = h[i][0] * y[0] + h[i][1] * y[1] + h[i][2] * y[2] + h[i][3] * y[3];
            const double yhy = dot(y, hy);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    h[i][j] += -r * (s[i] * hy[j] + hy[i] * s[j]) +
                               r * (1.0 + r * yhy) * s[i] * s[j];
        }
        x = xn;
        f = fn;
        g = gn;
        converged = norm2(g) < cfg.gradient_tol;
    }

    StartOutcome out;
    out.x = x;
    out.phi = f;
    out.iterations = it;
    out.converged = converged;
    return out;
}

std::vector<double> uniform_grid(double domain_end, int grid_size) {
    std::vector<double> grid(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i)
        grid[static_cast<std::size_t>(i)] =
            domain_end * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    return grid;
}

}  // namespace

FitResult fit_sigmoid(const TargetFn& target, double domain_end, const FitConfig& config) {
    if (!(domain_end > 0.0)) throw std::invalid_argument("fit requires domain_end > 0");
    if (config.grid_size < 2) throw std::invalid_argument("fit requires grid_size >= 2");

    const int n = config.grid_size;
    const std::vector<double> grid = uniform_grid(domain_end, n);
    std::vector<double> tv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        tv[i] = target(grid[i]);
        if (!std::isfinite(tv[i]))
            throw std::domain_error("target is not finite at f = " + std::to_string(grid[i]));
    }

    const GridObjective phi{grid, tv, domain_end};

    // 8 deterministic starts: both d1 orientations x four inflection guesses.
    const double mag = std::abs(tv.back() - tv.front());
    StartOutcome best;
    int best_index = -1;
    int index = 0;
    for (double sign : {1.0, -1.0}) {
        for (double q : {0.25, 0.5, 0.75, 1.0}) {
            const double d1 = sign * mag;
            const Vec4 x0{d1, q * domain_end, domain_end / 10.0, tv.front() - d1};
            StartOutcome o = bfgs_minimize(phi, x0, config);
            if (best_index < 0 || o.phi < best.phi) {
                best = o;
                best_index = index;
            }
            ++index;
        }
    }

    SigmoidParams params{best.x[0], best.x[1], best.x[2], best.x[3], domain_end};
    if (params.d3 < 0.0) params = params.mirrored();  // canonical gauge

    FitResult res;
    res.params = params;
    res.grid_size = n;
    res.converged = best.converged;
    res.iterations = best.iterations;
    res.objective = kernels::sigmoid_mse(params, grid.data(), tv.data(), grid.size());

    std::vector<double> sv(grid.size());
    kernels::sigmoid_eval(params, grid.data(), sv.data(), grid.size());
    double mx = 0.0, mn = std::numeric_limits<double>::infinity(), acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double err = std::abs(tv[i] - sv[i]);
        mx = std::max(mx, err);
        mn = std::min(mn, err);
        acc += err;
    }
    res.max_error = mx;
    res.min_error = mn;
    res.mean_error = acc / static_cast<double>(grid.size());
    return res;
}

std::vector<ProfileRow> error_profile(const TargetFn& target, const SigmoidParams& params,
                                      double domain_end, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("error_profile requires grid_size >= 2");
    const std::vector<double> grid = uniform_grid(domain_end, grid_size);
    std::vector<double> sv(grid.size());
    kernels::sigmoid_eval(params, grid.data(), sv.data(), grid.size());

    std::vector<ProfileRow> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = target(grid[i]);
        rows[i] = {grid[i], t, sv[i], std::abs(t - sv[i])};
    }
    return rows;
}

BoundCheckReport check_error_bound(const TargetFn& target, const SigmoidParams& params,
                                   double epsilon, double critical_flow, double domain_end,
                                   int grid_size) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");

    BoundCheckReport rep;
    rep.bound.gamma = detail::sigmoid_core(params.d1, params.d2, params.d3, 0.0, critical_flow);
    rep.bound.epsilon = epsilon;
    const SigmoidParams m = params.mirrored();
    rep.gamma_mirrored = detail::sigmoid_core(m.d1, m.d2, m.d3, 0.0, critical_flow);
    rep.gamma_positive = rep.bound.gamma > 0.0;
    // The two gauges of sigma carry opposite-sign constants for the same
    // curve; the bound is meaningful for the positive one.
    rep.gamma_used = std::max(rep.bound.gamma, rep.gamma_mirrored);

    const std::vector<double> grid = uniform_grid(domain_end, grid_size);
    std::vector<double> sv(grid.size());
    kernels::sigmoid_eval(params, grid.data(), sv.data(), grid.size());
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, target(grid[i]) - sv[i]);
    rep.max_signed_error = worst;
    rep.margin = rep.gamma_used + epsilon - worst;
    rep.pass = worst <= rep.gamma_used + epsilon;
    return rep;
}

}  // namespace ptroute
