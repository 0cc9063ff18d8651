#pragma once

#include "adfit/graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adfit {

/// Binned template model: expected counts are nu_i = mu*S_i + gamma1_i*B1_i
/// + gamma2_i*B2_i, scaled by a global luminosity factor alpha. alpha is
/// Gaussian-constrained with width sigma_alpha; each gamma carries a Poisson
/// constraint of strength tau (an auxiliary measurement of tau*gamma events
/// per bin and background).
struct HistFactorySpec {
    std::size_t n_bins = 0;
    std::vector<double> signal;
    std::vector<double> background1;
    std::vector<double> background2;
    double sigma_alpha = 0.1;
    double tau = 100.0;

    /// Throws InvalidModelError if any invariant is violated (positive
    /// templates of matching length, positive constraint strengths).
    void check() const;
};

struct Dataset {
    std::vector<double> observed;
};

/// Fixed parameter order: [mu, alpha, gamma1_0..gamma1_{n-1},
/// gamma2_0..gamma2_{n-1}]. All nominal values are 1.
struct ParamLayout {
    std::size_t n_bins = 0;

    static constexpr std::size_t mu = 0;
    static constexpr std::size_t alpha = 1;
    std::size_t gamma1(std::size_t bin) const { return 2 + bin; }
    std::size_t gamma2(std::size_t bin) const { return 2 + n_bins + bin; }

    std::size_t n_params() const { return 2 + 2 * n_bins; }
    std::vector<std::string> names() const;
    std::vector<double> nominal() const { return std::vector<double>(n_params(), 1.0); }
};

struct BuiltModel {
    ModelGraph graph;
    NodeId root;
    ParamLayout layout;
};

/// Builds the negative log-likelihood graph
///   l = sum_i [a*nu_i - n_i*log(a*nu_i)] + (a-1)^2/(2*sigma_a^2)
///       + sum_b sum_i tau*(gamma_{b,i} - log gamma_{b,i})
/// with all parameter-independent additive constants dropped. The expected
/// count a*nu_i is built once per occurrence in the formula (it appears in
/// both the linear and the log term), leaving the redundancy for the CSE
/// pass to clean up, as a hand-written transcription would.
BuiltModel build_model(const HistFactorySpec& spec, const Dataset& data);

/// Closed-form NLL computed by a plain loop, with no graph or program
/// involvement. Serves as the independent oracle for everything else in
/// this library. Throws NumericalDomainError naming the parameter/bin on a
/// domain violation (gamma <= 0 or non-positive expected count).
double reference_nll(const HistFactorySpec& spec, const Dataset& data,
                     std::span<const double> params);

/// Dataset with observed counts equal to the expected counts at the given
/// truth parameters: n_i = alpha * nu_i(truth), real-valued. The truth is
/// then an exact stationary point of the NLL.
Dataset asimov_dataset(const HistFactorySpec& spec, std::span<const double> truth);

/// Poisson-fluctuated dataset around the expected counts. Sampling uses
/// mt19937_64 and Knuth's multiplication method, so identical seeds give
/// identical datasets on every platform.
Dataset toy_dataset(const HistFactorySpec& spec, std::span<const double> truth,
                    std::uint64_t seed);

struct Templates {
    std::vector<double> signal;
    std::vector<double> background1;
    std::vector<double> background2;
};

/// Deterministic template shapes over bin centers c_i = (i + 0.5)/n_bins:
/// a Gaussian signal peak S_i = 20*exp(-((c_i-0.5)/0.1)^2/2), a falling
/// background B1_i = 100*exp(-3*c_i), and a flat background B2_i = 50.
Templates default_templates(std::size_t n_bins);

/// Spec with default_templates shapes and the given constraint strengths.
HistFactorySpec default_spec(std::size_t n_bins, double sigma_alpha = 0.1,
                             double tau = 100.0);

/// Model-spec JSON document: keys n_bins, signal, background1, background2,
/// sigma_alpha, tau, and optionally observed. Unknown keys are rejected.
/// An absent observed array means "use the Asimov dataset at nominal truth".
struct ModelFile {
    HistFactorySpec spec;
    std::optional<Dataset> observed;

    /// The stored dataset, or the nominal-truth Asimov dataset if absent.
    Dataset dataset() const;
};

ModelFile parse_model_json(const std::string& text);
std::string model_file_to_json(const ModelFile& file);

ModelFile load_model_file(const std::string& path);
void save_model_file(const ModelFile& file, const std::string& path);

} // namespace adfit
