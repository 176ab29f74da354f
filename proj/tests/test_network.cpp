#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ptroute/network.hpp"

using namespace ptroute;

namespace {

Network two_parallel() {
    Edge e1{"e1", 10.0, 1.0, 2.0, 0.5, {}, "o", "d"};
    Edge e2{"e2", 12.0, 1.0, 2.0, 0.5, {}, "o", "d"};
    return Network({"o", "d"}, {e1, e2}, {"o", "d"}, {Route{{"e1"}}, Route{{"e2"}}});
}

}  // namespace

TEST_CASE("minimal two-edge network validates clean") {
    const Network net = two_parallel();
    CHECK(validate_network(net).ok());
    CHECK(net.edge_count() == 2);
    CHECK(net.route_count() == 2);
    CHECK(net.routes_resolved());
}

TEST_CASE("dangling route reference is reported") {
    Edge e1{"e1", 10.0, 1.0, 2.0, 0.5, {}, {}, {}};
    const Network net({"o", "d"}, {e1}, {"o", "d"}, {Route{{"e1"}}, Route{{"ghost"}}});
    const auto rep = validate_network(net);
    CHECK_FALSE(rep.ok());
    bool mentions_ghost = false;
    for (const auto& v : rep.violations) mentions_ghost |= v.find("ghost") != std::string::npos;
    CHECK(mentions_ghost);
    CHECK_FALSE(net.routes_resolved());
    CHECK_THROWS_AS((void)net.route_edges(1), std::invalid_argument);
}

TEST_CASE("critical_flow must stay strictly below max_flow") {
    Edge e1{"e1", 10.0, 2.0, 2.0, 0.5, {}, {}, {}};
    const Network net({"o", "d"}, {e1}, {"o", "d"}, {Route{{"e1"}}});
    CHECK_FALSE(validate_network(net).ok());
}

TEST_CASE("route endpoint mismatches are caught when endpoints are present") {
    Edge oa{"oa", 10.0, 1.0, 2.0, 0.5, {}, "o", "a"};
    Edge bd{"bd", 10.0, 1.0, 2.0, 0.5, {}, "b", "d"};
    const Network net({"o", "a", "b", "d"}, {oa, bd}, {"o", "d"}, {Route{{"oa", "bd"}}});
    const auto rep = validate_network(net);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("edge_flow aggregates single allocations and shared routes") {
    const Network net = two_parallel();
    FlowProfile one;
    one.flows = {{1.0, 0.0}};
    CHECK(edge_flow(net, one, "e1") == doctest::Approx(1.0));
    CHECK(edge_flow(net, one, "e2") == doctest::Approx(0.0));

    FlowProfile shared;
    shared.flows = {{0.5, 0.0}, {0.5, 0.0}};
    CHECK(edge_flow(net, shared, "e1") == doctest::Approx(1.0));

    FlowProfile zero;
    zero.flows = {{0.0, 0.0}};
    for (const auto& e : net.edges()) CHECK(edge_flow(net, zero, e.id) == 0.0);

    CHECK_THROWS_AS(edge_flow(net, one, "nope"), std::invalid_argument);
    FlowProfile bad;
    bad.flows = {{1.0}};
    CHECK_THROWS_AS(edge_flows(net, bad), std::invalid_argument);
}

TEST_CASE("edge multiplicity counts route occurrences") {
    Edge a{"a", 10.0, 1.0, 2.0, 0.5, {}, {}, {}};
    Edge b{"b", 10.0, 1.0, 2.0, 0.5, {}, {}, {}};
    const Network net({"o", "d"}, {a, b}, {"o", "d"},
                      {Route{{"a"}}, Route{{"a", "b"}}, Route{{"b"}}});
    CHECK(net.edge_route_multiplicity(0) == 2);
    CHECK(net.edge_route_multiplicity(1) == 2);
}

TEST_CASE("feasible_point piles all demand on the first route") {
    CHECK(feasible_point({"p", 2.0}, 3) == std::vector<double>{2.0, 0.0, 0.0});
    CHECK(feasible_point({"p", 0.0}, 2) == std::vector<double>{0.0, 0.0});
    CHECK(feasible_point({"p", 1.0}, 1) == std::vector<double>{1.0});
    CHECK_THROWS_AS(feasible_point({"p", 1.0}, 0), std::invalid_argument);
}

TEST_CASE("simplex projection: fixed points, clipping, symmetry") {
    const auto keep = project_to_action_set({0.5, 0.5}, 1.0);
    CHECK(keep[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(keep[1] == doctest::Approx(0.5).epsilon(1e-12));

    // Oracle: exhaustive scan of the 1-simplex at 1e-3 resolution.
    const std::vector<double> v{2.0, 0.0};
    const auto got = project_to_action_set(v, 1.0);
    double best_a = -1.0, best_d = 1e300;
    for (int k = 0; k <= 1000; ++k) {
        const double a = k / 1000.0;
        const double d = (v[0] - a) * (v[0] - a) + (v[1] - (1.0 - a)) * (v[1] - (1.0 - a));
        if (d < best_d) {
            best_d = d;
            best_a = a;
        }
    }
    CHECK(got[0] == doctest::Approx(best_a).epsilon(2e-3));
    CHECK(got[0] == doctest::Approx(1.0));
    CHECK(got[1] == doctest::Approx(0.0));

    const auto sym = project_to_action_set({-1.0, -1.0}, 1.0);
    CHECK(sym[0] == doctest::Approx(0.5));
    CHECK(sym[1] == doctest::Approx(0.5));
}

TEST_CASE("simplex projection properties on random draws") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    std::uniform_real_distribution<double> dem(0.0, 4.0);
    std::uniform_int_distribution<int> dims(1, 6);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = dims(rng);
        std::vector<double> v(n);
        for (auto& x : v) x = coord(rng);
        const double d = dem(rng);
        const auto p = project_to_action_set(v, d);

        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - d) <= 1e-12 * std::max(1.0, d));

        const auto pp = project_to_action_set(p, d);
        for (int i = 0; i < n; ++i) CHECK(std::abs(pp[i] - p[i]) <= 1e-12);
    }
}

TEST_CASE("edge_flow is additive across profiles") {
    const Network net = two_parallel();
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        FlowProfile a, b, s;
        a.flows = {{u(rng), u(rng)}, {u(rng), u(rng)}};
        b.flows = {{u(rng), u(rng)}, {u(rng), u(rng)}};
        s.flows = a.flows;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t r = 0; r < 2; ++r) s.flows[i][r] += b.flows[i][r];
        for (const auto& e : net.edges())
            CHECK(edge_flow(net, s, e.id) ==
                  doctest::Approx(edge_flow(net, a, e.id) + edge_flow(net, b, e.id)));
    }
}

TEST_CASE("conservation on single-edge routes") {
    const Network net = two_parallel();
    FlowProfile p;
    p.flows = {{0.3, 0.7}, {0.9, 0.1}};
    const auto f = edge_flows(net, p);
    CHECK(std::accumulate(f.begin(), f.end(), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("profile validation and renormalization") {
    const Network net = two_parallel();
    const std::vector<PlayerSpec> players{{"p1", 1.0}};

    FlowProfile good;
    good.flows = {{0.4, 0.6}};
    CHECK(validate_profile(net, good, players).ok());

    FlowProfile off;
    off.flows = {{0.4, 0.7}};
    CHECK_FALSE(validate_profile(net, off, players).ok());
    const auto fixed = normalize_profile(off, players);
    CHECK(fixed.flows[0][0] + fixed.flows[0][1] == doctest::Approx(1.0).epsilon(1e-14));

    FlowProfile neg;
    neg.flows = {{-0.1, 1.1}};
    CHECK_FALSE(validate_profile(net, neg, players).ok());

    FlowProfile empty_mass;
    empty_mass.flows = {{0.0, 0.0}};
    CHECK_THROWS_AS(normalize_profile(empty_mass, players), std::invalid_argument);
}
