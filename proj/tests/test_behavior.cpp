#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ptroute/behavior.hpp"

using namespace ptroute;

namespace {

const Edge kGoldenEdge{"e1", 13.0, 1.0, 2.0, 0.5, {}, {}, {}};

Edge random_edge(std::mt19937& rng) {
    std::uniform_real_distribution<double> c0(1.0, 30.0);
    std::uniform_real_distribution<double> crt(0.2, 3.0);
    Edge e;
    e.id = "r";
    e.free_flow_time = c0(rng);
    e.critical_flow = crt(rng);
    e.max_flow = e.critical_flow * 2.5;
    e.congestion_prob = 0.5;
    return e;
}

}  // namespace

TEST_CASE("bpr cost hits the published anchor points") {
    CHECK(bpr_cost(kGoldenEdge, 1.0) == doctest::Approx(14.95));
    CHECK(bpr_cost(kGoldenEdge, 0.0) == doctest::Approx(13.0));
    CHECK(bpr_cost(kGoldenEdge, 2.0) == doctest::Approx(44.2));
    CHECK_THROWS_AS(bpr_cost(kGoldenEdge, -0.1), std::invalid_argument);
}

TEST_CASE("bpr derivative: anchors and finite differences") {
    CHECK(bpr_cost_derivative(kGoldenEdge, 0.0) == 0.0);
    CHECK(bpr_cost_derivative(kGoldenEdge, 1.0) == doctest::Approx(7.8));
    CHECK_THROWS_AS(bpr_cost_derivative(kGoldenEdge, -1.0), std::invalid_argument);

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> flow(0.1, 2.5);
    for (int i = 0; i < 200; ++i) {
        const Edge e = random_edge(rng);
        const double f = flow(rng);
        const double h = 1e-5 * std::max(f, 1.0);
        const double fd = (bpr_cost(e, f + h) - bpr_cost(e, f - h)) / (2.0 * h);
        const double an = bpr_cost_derivative(e, f);
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("bpr cost is strictly increasing and midpoint convex") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> flow(0.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const Edge e = random_edge(rng);
        double a = flow(rng), b = flow(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-9) b += 1e-3;
        CHECK(bpr_cost(e, a) < bpr_cost(e, b));
        const double mid = bpr_cost(e, 0.5 * (a + b));
        CHECK(mid <= 0.5 * (bpr_cost(e, a) + bpr_cost(e, b)) + 1e-12);
    }
}

TEST_CASE("prelec weighting: fixed points and overweighting") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> bd(0.02, 0.98);
    for (int i = 0; i < 50; ++i) {
        const double b3 = bd(rng);
        CHECK(prelec_weight(0.0, b3) == 0.0);
        CHECK(prelec_weight(1.0, b3) == 1.0);
        CHECK(std::abs(prelec_weight(1.0 / std::exp(1.0), b3) - 1.0 / std::exp(1.0)) <= 1e-12);
    }
    // Independently computed scalar value at p = 1/2, beta3 = 0.65.
    CHECK(prelec_weight(0.5, 0.65) == doctest::Approx(0.454744867835472).epsilon(1e-12));

    // Overweights small probabilities, underweights large ones (beta3 = 0.5).
    const double inv_e = 1.0 / std::exp(1.0);
    for (int k = 1; k <= 40; ++k) {
        const double p = k / 41.0;
        if (p < inv_e - 1e-9) CHECK(prelec_weight(p, 0.5) > p);
        if (p > inv_e + 1e-9) CHECK(prelec_weight(p, 0.5) < p);
    }
    CHECK_THROWS_AS(prelec_weight(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(prelec_weight(1.1, 0.5), std::invalid_argument);

    // Strictly increasing on a grid.
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double w = prelec_weight(k / 100.0, 0.65);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("value function: reference point, unit steps, curvature") {
    CHECK(value_function(5.0, 5.0, 0.5, 2.0) == 0.0);
    CHECK(value_function(6.0, 5.0, 0.77, 2.0) == doctest::Approx(1.0));
    CHECK(value_function(4.0, 5.0, 0.5, 2.0) == doctest::Approx(-2.0));

    // Continuity at z0: a step of 1e-12 can grow to (1e-12)^beta, so the
    // envelope is 1e-6 for beta = 0.5 (times lambda on the loss side).
    CHECK(std::abs(value_function(5.0 + 1e-12, 5.0, 0.5, 2.0)) <= 1.1e-6);
    CHECK(std::abs(value_function(5.0 - 1e-12, 5.0, 0.5, 2.0)) <= 2.2e-6);

    // Concave above the reference, convex below (midpoint tests).
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> dz(0.1, 4.0);
    for (int i = 0; i < 200; ++i) {
        const double a = dz(rng), b = dz(rng);
        const double va = value_function(5.0 + a, 5.0, 0.6, 2.0);
        const double vb = value_function(5.0 + b, 5.0, 0.6, 2.0);
        const double vm = value_function(5.0 + 0.5 * (a + b), 5.0, 0.6, 2.0);
        CHECK(vm >= 0.5 * (va + vb) - 1e-12);
        const double wa = value_function(5.0 - a, 5.0, 0.6, 2.0);
        const double wb = value_function(5.0 - b, 5.0, 0.6, 2.0);
        const double wm = value_function(5.0 - 0.5 * (a + b), 5.0, 0.6, 2.0);
        CHECK(wm <= 0.5 * (wa + wb) + 1e-12);
    }
}

TEST_CASE("reference-relative cost tags the branch") {
    const ReferencePoint ref = default_reference(kGoldenEdge);
    CHECK(ref.value == doctest::Approx(14.95));

    const auto at_crt = reference_relative_cost(kGoldenEdge, ref, 1.0);
    CHECK(at_crt.magnitude == doctest::Approx(0.0));
    CHECK(at_crt.branch == Branch::zero);

    const auto at_zero = reference_relative_cost(kGoldenEdge, ref, 0.0);
    CHECK(at_zero.magnitude == doctest::Approx(1.95));
    CHECK(at_zero.branch == Branch::gain);

    const auto at_two = reference_relative_cost(kGoldenEdge, ref, 2.0);
    CHECK(at_two.magnitude == doctest::Approx(29.25));
    CHECK(at_two.branch == Branch::loss);
}

TEST_CASE("per-edge reference override is honored") {
    Edge e = kGoldenEdge;
    e.reference = 20.0;
    CHECK(default_reference(e).value == doctest::Approx(20.0));
}

TEST_CASE("pt edge cost: golden anchors under unit weighting") {
    const ReferencePoint ref = default_reference(kGoldenEdge);
    const BehaviorParams params{0.5, 2.0, 0.65, WeightingMode::unit};

    CHECK(pt_edge_cost(kGoldenEdge, ref, params, 1.0) == 0.0);
    CHECK(pt_edge_cost(kGoldenEdge, ref, params, 0.0) ==
          doctest::Approx(2.792848008753788).epsilon(1e-12));
    CHECK(pt_edge_cost(kGoldenEdge, ref, params, 2.0) ==
          doctest::Approx(-5.408326913195984).epsilon(1e-12));
}

TEST_CASE("pt edge cost: prelec weights scale the branches") {
    const ReferencePoint ref = default_reference(kGoldenEdge);
    BehaviorParams params{0.5, 2.0, 0.65, WeightingMode::prelec};
    const double wg = prelec_weight(0.5, 0.65);
    const double wl = prelec_weight(0.5, 0.65);
    CHECK(pt_edge_cost(kGoldenEdge, ref, params, 0.0) ==
          doctest::Approx(wg * 2.0 * std::sqrt(1.95)).epsilon(1e-12));
    CHECK(pt_edge_cost(kGoldenEdge, ref, params, 2.0) ==
          doctest::Approx(-wl * std::sqrt(29.25)).epsilon(1e-12));
}

TEST_CASE("pt edge cost: continuity and monotonicity near the reference") {
    const ReferencePoint gref = default_reference(kGoldenEdge);
    const BehaviorParams gparams{0.5, 2.0, 0.65, WeightingMode::unit};
    CHECK(std::abs(pt_edge_cost(kGoldenEdge, gref, gparams, 1.0 + 1e-6)) < 1e-2);
    CHECK(std::abs(pt_edge_cost(kGoldenEdge, gref, gparams, 1.0 - 1e-6)) < 1e-2);

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> bd(0.1, 0.9);
    std::uniform_real_distribution<double> ld(1.0, 3.0);
    std::uniform_real_distribution<double> pd(0.05, 0.95);
    for (int i = 0; i < 100; ++i) {
        Edge e = random_edge(rng);
        e.congestion_prob = pd(rng);
        const BehaviorParams params{bd(rng), ld(rng), bd(rng),
                                    i % 2 ? WeightingMode::prelec : WeightingMode::unit};
        const ReferencePoint ref = default_reference(e);
        const double fc = e.critical_flow;
        CHECK(pt_edge_cost(e, ref, params, fc) == 0.0);
        // Envelope |pt| <= lambda * (2 c'(fc) h)^beta vanishes with h, so this
        // is a continuity statement scaled to each draw's parameters.
        const double h = 1e-6 * fc;
        const double env =
            params.lambda * std::pow(2.0 * bpr_cost_derivative(e, fc) * h, params.beta);
        CHECK(std::abs(pt_edge_cost(e, ref, params, fc + h)) <= env);
        CHECK(std::abs(pt_edge_cost(e, ref, params, fc - h)) <= env);
        CHECK(pt_edge_cost(e, ref, params, fc * 0.5) > 0.0);
        CHECK(pt_edge_cost(e, ref, params, fc * 1.5) < 0.0);
    }

    // Decreasing in f on a grid (gains shrink, losses grow).
    const ReferencePoint ref = default_reference(kGoldenEdge);
    const BehaviorParams params{0.5, 2.0, 0.65, WeightingMode::unit};
    double prev = pt_edge_cost(kGoldenEdge, ref, params, 0.0);
    for (int k = 1; k <= 60; ++k) {
        const double cur = pt_edge_cost(kGoldenEdge, ref, params, k * 2.0 / 60.0);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("route and player costs: additivity over the route set") {
    Edge a = kGoldenEdge;
    Edge b = kGoldenEdge;
    a.id = "a";
    b.id = "b";
    const Network net({"o", "d"}, {a, b}, {"o", "d"}, {Route{{"a"}}, Route{{"b"}}});
    const auto refs = default_references(net);
    const BehaviorParams params{0.5, 2.0, 0.65, WeightingMode::unit};

    FlowProfile p;
    p.flows = {{0.0, 0.0}};
    const double edge_at_zero = pt_edge_cost(a, refs[0], params, 0.0);
    CHECK(pt_route_cost(net, refs, params, p, 0) == doctest::Approx(edge_at_zero));
    CHECK(pt_player_cost(net, refs, params, p, 0) == doctest::Approx(2.0 * edge_at_zero));
    CHECK_THROWS_AS(pt_route_cost(net, refs, params, p, 5), std::invalid_argument);

    // Two-edge route = 2x the single edge at equal flows.
    const Network chain({"o", "m", "d"}, {a, b}, {"o", "d"}, {Route{{"a", "b"}}});
    const auto crefs = default_references(chain);
    FlowProfile q;
    q.flows = {{0.4}};
    const double per_edge = pt_edge_cost(a, crefs[0], params, 0.4);
    CHECK(pt_route_cost(chain, crefs, params, q, 0) == doctest::Approx(2.0 * per_edge));
}

TEST_CASE("player cost matches a direct summation oracle on a braess layout") {
    Edge oa{"oa", 10.0, 0.8, 2.0, 0.6, {}, {}, {}};
    Edge ad{"ad", 12.0, 0.7, 2.0, 0.5, {}, {}, {}};
    Edge ob{"ob", 12.0, 0.7, 2.0, 0.5, {}, {}, {}};
    Edge bd{"bd", 10.0, 0.8, 2.0, 0.6, {}, {}, {}};
    Edge ab{"ab", 4.0, 0.5, 2.0, 0.7, {}, {}, {}};
    const Network net({"o", "a", "b", "d"}, {oa, ad, ob, bd, ab}, {"o", "d"},
                      {Route{{"oa", "ad"}}, Route{{"ob", "bd"}}, Route{{"oa", "ab", "bd"}}});
    const auto refs = default_references(net);
    const BehaviorParams params{0.5, 2.0, 0.65, WeightingMode::prelec};

    FlowProfile p;
    p.flows = {{0.2, 0.1, 0.2}, {0.3, 0.2, 0.0}};
    const auto f = edge_flows(net, p);

    double expect = 0.0;
    for (std::size_t r = 0; r < net.route_count(); ++r)
        for (std::size_t e : net.route_edges(r))
            expect += pt_edge_cost(net.edges()[e], refs[e], params, f[e]);
    CHECK(pt_player_cost(net, refs, params, p, 0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(pt_player_cost(net, refs, params, p, 1) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("objective player cost sums bpr over all routes") {
    Edge a = kGoldenEdge;
    Edge b = kGoldenEdge;
    a.id = "a";
    b.id = "b";
    const Network net({"o", "d"}, {a, b}, {"o", "d"}, {Route{{"a"}}, Route{{"b"}}});

    FlowProfile zero;
    zero.flows = {{0.0, 0.0}};
    CHECK(objective_player_cost(net, zero, 0) == doctest::Approx(26.0));

    FlowProfile one_route;
    one_route.flows = {{1.0, 0.0}};
    CHECK(objective_player_cost(net, one_route, 0) == doctest::Approx(27.95));

    // Doubling free-flow times doubles the whole objective.
    Edge a2 = a, b2 = b;
    a2.free_flow_time *= 2.0;
    b2.free_flow_time *= 2.0;
    const Network dbl({"o", "d"}, {a2, b2}, {"o", "d"}, {Route{{"a"}}, Route{{"b"}}});
    CHECK(objective_player_cost(dbl, one_route, 0) ==
          doctest::Approx(2.0 * objective_player_cost(net, one_route, 0)));
}
