#include "adfit/graph.hpp"

#include "adfit/errors.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace adfit;

TEST_SUITE("graph") {

TEST_CASE("first append returns id 0") {
    ModelGraph g;
    g.add_param("x");
    CHECK(g.param(0) == NodeId{0});
    CHECK(g.size() == 1);
}

TEST_CASE("broadcast shapes") {
    ModelGraph g;
    g.add_param("x");
    const NodeId s = g.param(0);
    const NodeId v = g.constant_vector({1.0, 2.0, 3.0});

    const NodeId bcast = g.add(s, v);
    CHECK(g.node(bcast).shape == Shape::vector(3));

    const NodeId vv = g.mul(v, v);
    CHECK(g.node(vv).shape == Shape::vector(3));

    const NodeId ss = g.mul(s, s);
    CHECK(g.node(ss).shape == Shape::scalar());
}

TEST_CASE("construction errors") {
    ModelGraph g;
    g.add_param("x");
    const NodeId a = g.param(0);
    const NodeId b = g.constant(2.0);

    CHECK_THROWS_AS(g.add_node(NodeKind::Log, {a, b}), InvalidModelError); // unary arity
    CHECK_THROWS_AS(g.add_node(NodeKind::Add, {a}), InvalidModelError);    // binary arity
    CHECK_THROWS_AS(g.add_node(NodeKind::Add, {a, NodeId{99}}), InvalidModelError);
    CHECK_THROWS_AS(g.sum(a), InvalidModelError); // sum of a scalar
    CHECK_THROWS_AS(g.constant_vector({}), InvalidModelError);
    CHECK_THROWS_AS(g.param_vector({}), InvalidModelError);
    CHECK_THROWS_AS(g.param(7), InvalidModelError); // unregistered parameter

    const NodeId v2 = g.constant_vector({1.0, 2.0});
    const NodeId v3 = g.constant_vector({1.0, 2.0, 3.0});
    CHECK_THROWS_AS(g.add(v2, v3), InvalidModelError); // length mismatch
}

TEST_CASE("topo order basics") {
    ModelGraph g;
    g.add_param("x");

    SUBCASE("single leaf") {
        const NodeId p = g.param(0);
        const auto order = topo_order(g, p);
        REQUIRE(order.size() == 1);
        CHECK(order[0] == p);
    }

    SUBCASE("post-order") {
        const NodeId a = g.param(0);
        const NodeId b = g.constant(2.0);
        const NodeId root = g.add(a, b);
        const auto order = topo_order(g, root);
        REQUIRE(order.size() == 3);
        CHECK(order[0] == a);
        CHECK(order[1] == b);
        CHECK(order[2] == root);
    }

    SUBCASE("diamond visits shared child once") {
        const NodeId p = g.param(0);
        const NodeId s1 = g.log(g.exp(p)); // keep log in-domain
        const NodeId s2 = g.exp(p);
        const NodeId root = g.mul(s1, s2);
        const auto order = topo_order(g, root);
        CHECK(std::count(order.begin(), order.end(), p) == 1);
        const auto pos = [&](NodeId id) {
            return std::find(order.begin(), order.end(), id) - order.begin();
        };
        CHECK(pos(p) < pos(s1));
        CHECK(pos(p) < pos(s2));
    }

    SUBCASE("invalid root") {
        CHECK_THROWS_AS(topo_order(g, NodeId{42}), InvalidModelError);
    }
}

TEST_CASE("topo order properties on random graphs") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        NodeId root{};
        const ModelGraph g = testing::random_graph(rng, 4, root);

        // Append-only acyclicity: children always precede parents.
        for (std::size_t i = 0; i < g.size(); ++i)
            for (NodeId c : g.node(NodeId{i}).children)
                CHECK(c.index < i);

        const auto order = topo_order(g, root);

        std::vector<std::size_t> position(g.size(), g.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            CHECK(position[order[k].index] == g.size()); // no duplicates
            position[order[k].index] = k;
        }
        for (NodeId id : order)
            for (NodeId c : g.node(id).children) {
                CHECK(position[c.index] < position[id.index]);
            }
    }
}

TEST_CASE("eval basics") {
    ModelGraph g;
    g.add_param("x");

    SUBCASE("add with constant") {
        const NodeId root = g.add(g.param(0), g.constant(2.0));
        const std::vector<double> params{1.0};
        CHECK(eval_graph(g, root, params).scalar() == 3.0);
    }

    SUBCASE("sum of a constant vector") {
        const NodeId root = g.sum(g.constant_vector({1.0, 2.0, 3.0}));
        const std::vector<double> params{0.0};
        CHECK(eval_graph(g, root, params).scalar() == 6.0);
    }

    SUBCASE("log domain error carries the node id") {
        const NodeId root = g.log(g.constant(0.0));
        const std::vector<double> params{0.0};
        CHECK_THROWS_AS((void)eval_graph(g, root, params), NumericalDomainError);
        try {
            (void)eval_graph(g, root, params);
        } catch (const NumericalDomainError& e) {
            CHECK(e.index() == root.index);
        }
    }

    SUBCASE("division by zero") {
        const NodeId root = g.div(g.param(0), g.constant(0.0));
        const std::vector<double> params{1.0};
        CHECK_THROWS_AS((void)eval_graph(g, root, params), NumericalDomainError);
    }

    SUBCASE("wrong parameter count") {
        const NodeId root = g.param(0);
        const std::vector<double> params{1.0, 2.0};
        CHECK_THROWS_AS((void)eval_graph(g, root, params), InvalidModelError);
    }
}

TEST_CASE("eval is deterministic") {
    std::mt19937_64 rng(7);
    NodeId root{};
    const ModelGraph g = testing::random_graph(rng, 3, root);
    const auto x = testing::random_point(rng, 3);
    const Value a = eval_graph(g, root, x);
    const Value b = eval_graph(g, root, x);
    REQUIRE(a.data.size() == b.data.size());
    for (std::size_t i = 0; i < a.data.size(); ++i)
        CHECK(a.data[i] == b.data[i]); // bit-identical
}

TEST_CASE("unreferenced parameters are reported") {
    ModelGraph g;
    g.add_param("used");
    g.add_param("unused");
    (void)g.param(0);
    const auto missing = g.unreferenced_params();
    REQUIRE(missing.size() == 1);
    CHECK(missing[0] == 1);
}

} // TEST_SUITE
