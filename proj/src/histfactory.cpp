#include "adfit/histfactory.hpp"

#include "adfit/errors.hpp"
#include "adfit/random.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace adfit {

void HistFactorySpec::check() const {
    if (n_bins < 1)
        throw InvalidModelError("model spec: n_bins must be at least 1");
    auto check_template = [&](const std::vector<double>& t, const char* name) {
        if (t.size() != n_bins)
            throw InvalidModelError(std::string("model spec: ") + name + " has " +
                                    std::to_string(t.size()) + " entries, expected " +
                                    std::to_string(n_bins));
        for (double v : t)
            if (!(v > 0.0))
                throw InvalidModelError(std::string("model spec: ") + name +
                                        " entries must be strictly positive");
    };
    check_template(signal, "signal");
    check_template(background1, "background1");
    check_template(background2, "background2");
    if (!(sigma_alpha > 0.0))
        throw InvalidModelError("model spec: sigma_alpha must be positive");
    if (!(tau > 0.0))
        throw InvalidModelError("model spec: tau must be positive");
}

std::vector<std::string> ParamLayout::names() const {
    std::vector<std::string> names;
    names.reserve(n_params());
    names.emplace_back("mu");
    names.emplace_back("alpha");
    for (std::size_t i = 0; i < n_bins; ++i)
        names.push_back("gamma1_" + std::to_string(i));
    for (std::size_t i = 0; i < n_bins; ++i)
        names.push_back("gamma2_" + std::to_string(i));
    return names;
}

namespace {

void check_data(const HistFactorySpec& spec, const Dataset& data) {
    if (data.observed.size() != spec.n_bins)
        throw InvalidModelError("dataset has " + std::to_string(data.observed.size()) +
                                " bins, model spec has " + std::to_string(spec.n_bins));
    for (double v : data.observed)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw InvalidModelError("dataset: observed counts must be non-negative");
}

void check_params(const ParamLayout& layout, std::span<const double> params,
                  const char* who) {
    if (params.size() != layout.n_params())
        throw InvalidModelError(std::string(who) + ": expected " +
                                std::to_string(layout.n_params()) + " parameters, got " +
                                std::to_string(params.size()));
}

std::vector<double> expected_counts(const HistFactorySpec& spec,
                                    std::span<const double> params) {
    const ParamLayout layout{spec.n_bins};
    const double mu = params[ParamLayout::mu];
    const double alpha = params[ParamLayout::alpha];
    std::vector<double> counts(spec.n_bins);
    for (std::size_t i = 0; i < spec.n_bins; ++i) {
        const double nu = mu * spec.signal[i] + params[layout.gamma1(i)] * spec.background1[i] +
                          params[layout.gamma2(i)] * spec.background2[i];
        counts[i] = alpha * nu;
    }
    return counts;
}

} // namespace

BuiltModel build_model(const HistFactorySpec& spec, const Dataset& data) {
    spec.check();
    check_data(spec, data);

    const ParamLayout layout{spec.n_bins};
    ModelGraph g;
    for (const std::string& name : layout.names())
        g.add_param(name);

    std::vector<std::size_t> g1_idx(spec.n_bins), g2_idx(spec.n_bins);
    for (std::size_t i = 0; i < spec.n_bins; ++i) {
        g1_idx[i] = layout.gamma1(i);
        g2_idx[i] = layout.gamma2(i);
    }

    const NodeId mu = g.param(ParamLayout::mu);
    const NodeId alpha = g.param(ParamLayout::alpha);
    const NodeId gamma1 = g.param_vector(g1_idx);
    const NodeId gamma2 = g.param_vector(g2_idx);
    const NodeId S = g.constant_vector(spec.signal);
    const NodeId B1 = g.constant_vector(spec.background1);
    const NodeId B2 = g.constant_vector(spec.background2);
    const NodeId n_obs = g.constant_vector(data.observed);

    const NodeId nu =
        g.add(g.add(g.mul(mu, S), g.mul(gamma1, B1)), g.mul(gamma2, B2));

    // The expected count alpha*nu appears in both the linear and the log
    // term, exactly as in the formula; the CSE pass merges the two.
    const NodeId poisson =
        g.sum(g.sub(g.mul(alpha, nu), g.mul(n_obs, g.log(g.mul(alpha, nu)))));

    const NodeId alpha_dev = g.sub(alpha, g.constant(1.0));
    const NodeId alpha_constraint =
        g.div(g.mul(alpha_dev, alpha_dev),
              g.constant(2.0 * spec.sigma_alpha * spec.sigma_alpha));

    const NodeId tau = g.constant(spec.tau);
    const NodeId gamma1_constraint = g.sum(g.mul(tau, g.sub(gamma1, g.log(gamma1))));
    const NodeId gamma2_constraint = g.sum(g.mul(tau, g.sub(gamma2, g.log(gamma2))));

    const NodeId root =
        g.add(g.add(poisson, alpha_constraint), g.add(gamma1_constraint, gamma2_constraint));

    return {std::move(g), root, layout};
}

double reference_nll(const HistFactorySpec& spec, const Dataset& data,
                     std::span<const double> params) {
    spec.check();
    check_data(spec, data);
    const ParamLayout layout{spec.n_bins};
    check_params(layout, params, "reference_nll");

    const double mu = params[ParamLayout::mu];
    const double alpha = params[ParamLayout::alpha];

    double nll = 0.0;
    for (std::size_t i = 0; i < spec.n_bins; ++i) {
        const double expected = alpha * (mu * spec.signal[i] +
                                         params[layout.gamma1(i)] * spec.background1[i] +
                                         params[layout.gamma2(i)] * spec.background2[i]);
        if (!(expected > 0.0))
            throw NumericalDomainError(
                "expected count non-positive in bin " + std::to_string(i), i);
        nll += expected - data.observed[i] * std::log(expected);
    }

    const double dev = alpha - 1.0;
    nll += dev * dev / (2.0 * spec.sigma_alpha * spec.sigma_alpha);

    for (std::size_t i = 0; i < spec.n_bins; ++i) {
        for (std::size_t p : {layout.gamma1(i), layout.gamma2(i)}) {
            const double gamma = params[p];
            if (!(gamma > 0.0))
                throw NumericalDomainError(
                    "parameter " + std::to_string(p) + " (gamma) must be positive", p);
            nll += spec.tau * (gamma - std::log(gamma));
        }
    }
    return nll;
}

Dataset asimov_dataset(const HistFactorySpec& spec, std::span<const double> truth) {
    spec.check();
    check_params(ParamLayout{spec.n_bins}, truth, "asimov_dataset");
    return Dataset{expected_counts(spec, truth)};
}

namespace {

// Knuth's multiplication method. Exact and portable; fine for the template
// scales used here (exp(-lambda) stays representable up to lambda ~ 700).
std::uint64_t poisson_sample(std::mt19937_64& rng, double lambda) {
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform01(rng);
    } while (p > limit);
    return k - 1;
}

} // namespace

Dataset toy_dataset(const HistFactorySpec& spec, std::span<const double> truth,
                    std::uint64_t seed) {
    spec.check();
    check_params(ParamLayout{spec.n_bins}, truth, "toy_dataset");
    const std::vector<double> counts = expected_counts(spec, truth);
    std::mt19937_64 rng(seed);
    Dataset data;
    data.observed.reserve(spec.n_bins);
    for (double lambda : counts)
        data.observed.push_back(static_cast<double>(poisson_sample(rng, lambda)));
    return data;
}

Templates default_templates(std::size_t n_bins) {
    if (n_bins < 1)
        throw InvalidModelError("default_templates: n_bins must be at least 1");
    Templates t;
    t.signal.resize(n_bins);
    t.background1.resize(n_bins);
    t.background2.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        const double c = (static_cast<double>(i) + 0.5) / static_cast<double>(n_bins);
        const double z = (c - 0.5) / 0.1;
        t.signal[i] = 20.0 * std::exp(-0.5 * z * z);
        t.background1[i] = 100.0 * std::exp(-3.0 * c);
        t.background2[i] = 50.0;
    }
    return t;
}

HistFactorySpec default_spec(std::size_t n_bins, double sigma_alpha, double tau) {
    Templates t = default_templates(n_bins);
    HistFactorySpec spec;
    spec.n_bins = n_bins;
    spec.signal = std::move(t.signal);
    spec.background1 = std::move(t.background1);
    spec.background2 = std::move(t.background2);
    spec.sigma_alpha = sigma_alpha;
    spec.tau = tau;
    return spec;
}

Dataset ModelFile::dataset() const {
    if (observed)
        return *observed;
    const ParamLayout layout{spec.n_bins};
    return asimov_dataset(spec, layout.nominal());
}

namespace {

using nlohmann::json;

std::vector<double> number_array(const json& j, const std::string& key) {
    const json& a = j.at(key);
    if (!a.is_array())
        throw Error("model spec: '" + key + "' must be an array of numbers");
    std::vector<double> values;
    values.reserve(a.size());
    for (const json& v : a) {
        if (!v.is_number())
            throw Error("model spec: '" + key + "' must contain only numbers");
        values.push_back(v.get<double>());
    }
    return values;
}

} // namespace

ModelFile parse_model_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("model spec: ") + e.what());
    }
    if (!j.is_object())
        throw Error("model spec: top-level JSON value must be an object");

    static const char* known[] = {"n_bins",      "signal", "background1", "background2",
                                  "sigma_alpha", "tau",    "observed"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || item.key() == k;
        if (!ok)
            throw Error("model spec: unknown key '" + item.key() + "'");
    }
    for (const char* k : {"n_bins", "signal", "background1", "background2", "sigma_alpha",
                          "tau"})
        if (!j.contains(k))
            throw Error("model spec: missing key '" + std::string(k) + "'");

    ModelFile file;
    if (!j["n_bins"].is_number_integer() || j["n_bins"].get<long>() < 1)
        throw Error("model spec: 'n_bins' must be a positive integer");
    file.spec.n_bins = j["n_bins"].get<std::size_t>();
    file.spec.signal = number_array(j, "signal");
    file.spec.background1 = number_array(j, "background1");
    file.spec.background2 = number_array(j, "background2");
    if (!j["sigma_alpha"].is_number() || !j["tau"].is_number())
        throw Error("model spec: 'sigma_alpha' and 'tau' must be numbers");
    file.spec.sigma_alpha = j["sigma_alpha"].get<double>();
    file.spec.tau = j["tau"].get<double>();
    file.spec.check();

    if (j.contains("observed")) {
        Dataset data{number_array(j, "observed")};
        check_data(file.spec, data);
        file.observed = std::move(data);
    }
    return file;
}

std::string model_file_to_json(const ModelFile& file) {
    json j;
    j["n_bins"] = file.spec.n_bins;
    j["signal"] = file.spec.signal;
    j["background1"] = file.spec.background1;
    j["background2"] = file.spec.background2;
    j["sigma_alpha"] = file.spec.sigma_alpha;
    j["tau"] = file.spec.tau;
    if (file.observed)
        j["observed"] = file.observed->observed;
    return j.dump(2) + "\n";
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open model file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_model_json(text.str());
}

void save_model_file(const ModelFile& file, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write model file '" + path + "'");
    out << model_file_to_json(file);
    if (!out)
        throw Error("failed while writing model file '" + path + "'");
}

} // namespace adfit
