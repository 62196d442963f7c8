#pragma once

#include <span>
#include <string>
#include <vector>

#include "craft/dataset.hpp"
#include "craft/matrix.hpp"
#include "craft/nn.hpp"

namespace craft {

/// One mixture component: an isotropic Gaussian source cluster and the
/// affine conditional map t | s ~ Normal(map*s + offset, noise_sigma^2 I).
struct MixtureComponent {
    double weight = 0.0;
    std::vector<double> source_center;  // d_s
    double source_spread = 1.0;
    Matrix map;                  // d_t x d_s
    std::vector<double> offset;  // d_t
    double noise_sigma = 1.0;
};

/// Generative description of a ground-truth joint distribution with a
/// closed-form conditional oracle.
struct SyntheticSpec {
    std::size_t d_s = 0;
    std::size_t d_t = 0;
    std::vector<MixtureComponent> components;

    /// Throws ValidationError naming the offending field.
    void validate() const;

    /// Posterior component probabilities given a source vector (exact
    /// Gaussian densities of the source marginal).
    std::vector<double> responsibilities(std::span<const double> s) const;
    /// E[t | s]: responsibility-weighted affine maps.
    std::vector<double> conditional_mean(std::span<const double> s) const;
    /// Scalar conditional scale: sqrt(mean over target coordinates of the
    /// conditional covariance diagonal). Reduces to noise_sigma for a
    /// single component.
    double conditional_std(std::span<const double> s) const;

    /// Draw a source vector from the marginal.
    std::vector<double> sample_source(Rng& rng) const;
};

/// n i.i.d. pairs; item_ids are row indices. Deterministic in the rng state.
PairDataset synth_generate(const SyntheticSpec& spec, std::size_t n, Rng& rng);

/// Built-in specs used by the CLI and the acceptance runs:
/// "two-cluster-2d", "five-cluster-8d", "density-gradient".
SyntheticSpec synthetic_preset(const std::string& name);
std::vector<std::string> synthetic_preset_names();

SyntheticSpec spec_from_json(const std::string& text);
SyntheticSpec spec_load(const std::string& path);
std::string spec_to_json(const SyntheticSpec& spec);

}  // namespace craft
