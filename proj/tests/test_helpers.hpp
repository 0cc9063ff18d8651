#pragma once

#include "adfit/graph.hpp"
#include "adfit/histfactory.hpp"
#include "adfit/random.hpp"

#include <random>
#include <vector>

namespace adfit::testing {

// The 1-bin reference model used throughout: S=[5], B1=[10], B2=[20],
// tau=100, sigma_alpha=0.1. Its Asimov dataset at nominal truth is [35]
// and the NLL there is 235 - 35*ln(35) = 110.56281784787053.
inline HistFactorySpec one_bin_spec() {
    HistFactorySpec spec;
    spec.n_bins = 1;
    spec.signal = {5.0};
    spec.background1 = {10.0};
    spec.background2 = {20.0};
    spec.sigma_alpha = 0.1;
    spec.tau = 100.0;
    return spec;
}

inline Dataset one_bin_asimov() { return Dataset{{35.0}}; }

constexpr double kOneBinNominalNll = 110.56281784787053;

// Parameter points in the model's valid domain (everything positive, near
// nominal).
inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> x(n);
    for (double& v : x)
        v = uniform(rng, 0.5, 1.5);
    return x;
}

// Small random scalar-rooted graph exercising every node kind. Log/Exp/Div
// are applied in forms that keep evaluation in-domain for positive
// parameters: log(exp(x)) stays safe via exp, division adds a positive
// offset to the divisor.
inline ModelGraph random_graph(std::mt19937_64& rng, std::size_t n_params, NodeId& root) {
    ModelGraph g;
    for (std::size_t i = 0; i < n_params; ++i)
        g.add_param("p" + std::to_string(i));

    std::vector<NodeId> scalars;
    for (std::size_t i = 0; i < n_params; ++i)
        scalars.push_back(g.param(i));
    scalars.push_back(g.constant(uniform(rng, 0.5, 2.0)));

    const std::size_t vec_len = 2 + static_cast<std::size_t>(rng() % 4);
    std::vector<double> consts;
    for (std::size_t i = 0; i < vec_len; ++i)
        consts.push_back(uniform(rng, 0.5, 2.0));
    std::vector<NodeId> vectors{g.constant_vector(consts)};
    if (n_params >= vec_len) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < vec_len; ++i)
            idx.push_back(i);
        vectors.push_back(g.param_vector(idx));
    }

    auto pick = [&](std::vector<NodeId>& pool) { return pool[rng() % pool.size()]; };

    for (int step = 0; step < 12; ++step) {
        switch (rng() % 6) {
        case 0: scalars.push_back(g.add(pick(scalars), pick(scalars))); break;
        case 1: scalars.push_back(g.mul(pick(scalars), pick(scalars))); break;
        case 2: scalars.push_back(g.neg(pick(scalars))); break;
        case 3: scalars.push_back(g.log(g.exp(pick(scalars)))); break;
        case 4: {
            // keep the divisor away from zero
            NodeId denom = g.add(g.exp(pick(scalars)), g.constant(0.5));
            scalars.push_back(g.div(pick(scalars), denom));
            break;
        }
        default: vectors.push_back(g.add(pick(vectors), pick(scalars))); break;
        }
    }

    root = g.add(g.sum(g.mul(pick(vectors), pick(vectors))), pick(scalars));
    return g;
}

} // namespace adfit::testing
