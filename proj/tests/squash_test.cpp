#include "adfit/squash.hpp"

#include "adfit/errors.hpp"
#include "adfit/histfactory.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace adfit;

namespace {

// Expected statement count: every reachable elementwise node of length L
// lowers to L statements, a sum over L elements to L-1, leaves to none.
std::size_t expected_statement_count(const ModelGraph& g, NodeId root) {
    std::size_t count = 0;
    for (NodeId id : topo_order(g, root)) {
        const Node& n = g.node(id);
        switch (n.kind) {
        case NodeKind::Param:
        case NodeKind::ParamVector:
        case NodeKind::ConstScalar:
        case NodeKind::ConstVector:
            break;
        case NodeKind::Sum:
            count += g.node(n.children[0]).shape.len - 1;
            break;
        default:
            count += n.shape.len;
            break;
        }
    }
    return count;
}

std::size_t line_count(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text)
        lines += c == '\n';
    return lines;
}

} // namespace

TEST_SUITE("squash") {

TEST_CASE("scalar add lowers to one statement") {
    ModelGraph g;
    g.add_param("x");
    const NodeId root = g.add(g.param(0), g.constant(2.0));
    const Program p = squash(g, root);
    CHECK(p.statements.size() == 1);
    CHECK(validate(p).empty());
    const std::vector<double> params{1.0};
    CHECK(interpret(p, params) == std::vector<double>{3.0});
}

TEST_CASE("sum unrolls to an add chain") {
    ModelGraph g;
    const NodeId root = g.sum(g.constant_vector({1.0, 2.0, 3.0}));
    const Program p = squash(g, root);
    CHECK(p.statements.size() == 2);
    CHECK(program_stats(p).count(Op::Add) == 2);
    CHECK(interpret(p, {}) == std::vector<double>{6.0});
}

TEST_CASE("one-bin model matches the hand-computed value") {
    const BuiltModel built = build_model(testing::one_bin_spec(), testing::one_bin_asimov());
    const Program p = squash(built.graph, built.root);
    REQUIRE(validate(p).empty());
    const std::vector<double> nominal = built.layout.nominal();
    const double nll = interpret(p, nominal)[0];
    CHECK(std::abs(nll - testing::kOneBinNominalNll) <=
          1e-12 * std::abs(testing::kOneBinNominalNll));
}

TEST_CASE("vector-shaped root is rejected") {
    ModelGraph g;
    const NodeId v = g.constant_vector({1.0, 2.0});
    CHECK_THROWS_AS((void)squash(g, v), InvalidModelError);
    CHECK_THROWS_AS((void)squash(g, NodeId{9}), InvalidModelError);
}

TEST_CASE("fidelity against the graph evaluator") {
    std::mt19937_64 rng(314);

    SUBCASE("random graphs") {
        for (int trial = 0; trial < 40; ++trial) {
            NodeId root{};
            const ModelGraph g = testing::random_graph(rng, 4, root);
            if (!g.node(root).shape.is_scalar())
                continue;
            const Program p = squash(g, root);
            REQUIRE(validate(p).empty());
            for (int pt = 0; pt < 10; ++pt) {
                const auto x = testing::random_point(rng, 4);
                const double direct = eval_graph(g, root, x).scalar();
                const double lowered = interpret(p, x)[0];
                CHECK(std::abs(direct - lowered) <= 1e-12 * std::max(1.0, std::abs(direct)));
            }
        }
    }

    SUBCASE("histfactory models") {
        for (std::size_t bins : {std::size_t{1}, std::size_t{7}, std::size_t{50}}) {
            const HistFactorySpec spec = default_spec(bins);
            const ParamLayout layout{bins};
            const Dataset data = asimov_dataset(spec, layout.nominal());
            const BuiltModel built = build_model(spec, data);
            const Program p = squash(built.graph, built.root);
            for (int pt = 0; pt < 100; ++pt) {
                const auto x = testing::random_point(rng, layout.n_params());
                const double direct = eval_graph(built.graph, built.root, x).scalar();
                const double lowered = interpret(p, x)[0];
                CHECK(std::abs(direct - lowered) <= 1e-12 * std::abs(direct));
            }
        }
    }
}

TEST_CASE("each reachable node is lowered exactly once") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        NodeId root{};
        const ModelGraph g = testing::random_graph(rng, 4, root);
        const Program p = squash(g, root);
        CHECK(p.statements.size() == expected_statement_count(g, root));
    }

    const BuiltModel built = build_model(default_spec(5), Dataset{{1, 2, 3, 4, 5}});
    const Program p = squash(built.graph, built.root);
    CHECK(p.statements.size() == expected_statement_count(built.graph, built.root));
}

TEST_CASE("squash is deterministic") {
    const BuiltModel built = build_model(testing::one_bin_spec(), testing::one_bin_asimov());
    CHECK(squash(built.graph, built.root) == squash(built.graph, built.root));
}

TEST_CASE("emit_source") {
    SUBCASE("single-statement program has exactly one arithmetic line") {
        ModelGraph g;
        g.add_param("x");
        const Program p = squash(g, g.add(g.param(0), g.constant(2.0)));
        const std::string text = emit_source(p, "f");
        CHECK(line_count(text) == p.statements.size() + 3);
        CHECK(text.find("t0 = add p0 2") != std::string::npos);
        CHECK(text.find("return t0") != std::string::npos);
    }

    SUBCASE("identical programs render identically") {
        const BuiltModel built =
            build_model(testing::one_bin_spec(), testing::one_bin_asimov());
        const Program p = squash(built.graph, built.root);
        CHECK(emit_source(p, "nll") == emit_source(p, "nll"));
    }

    SUBCASE("line count tracks statement count") {
        const HistFactorySpec spec = default_spec(2);
        const ParamLayout layout{2};
        const BuiltModel built = build_model(spec, asimov_dataset(spec, layout.nominal()));
        const Program p = squash(built.graph, built.root);
        CHECK(line_count(emit_source(p, "nll")) == p.statements.size() + 3);
    }
}

} // TEST_SUITE
