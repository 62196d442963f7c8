#pragma once

#include <span>
#include <vector>

#include "craft/matrix.hpp"
#include "craft/nn.hpp"

namespace craft {

inline constexpr std::size_t kHiddenWidth = 256;
inline constexpr double kScoreClamp = 1e-7;  // D outputs clamped to [eps, 1-eps] before log

/// Conditional feature transformer T(s, z) -> t_hat. Three dense layers
/// (256, 256, d_t); batch norm + leaky ReLU on the first two, linear output.
struct TransformerParams {
    std::size_t d_s = 0;
    std::size_t d_z = 0;
    std::size_t d_t = 0;
    Mlp net;
};

/// Pair discriminator D(s, t) -> [0,1]. Three dense layers (256, 256, 1);
/// batch norm + leaky ReLU on the first two, linear output + sigmoid.
struct DiscriminatorParams {
    std::size_t d_s = 0;
    std::size_t d_t = 0;
    Mlp net;
};

TransformerParams make_transformer(std::size_t d_s, std::size_t d_z, std::size_t d_t,
                                   double leaky_alpha, Rng& rng);
DiscriminatorParams make_discriminator(std::size_t d_s, std::size_t d_t, double leaky_alpha,
                                       Rng& rng);

/// Draw a noise vector uniformly from the unit sphere in R^d_z.
std::vector<double> sample_noise(Rng& rng, std::size_t d_z);

/// Synthesize a target feature for one (s, z); inference-mode batch norm.
std::vector<double> transform(const TransformerParams& phi, std::span<const double> s,
                              std::span<const double> z);
/// Batch synthesis with an explicit mode. Rows of `sources` pair with rows
/// of `noise`. Training modes mutate (or read) batch statistics.
Matrix transform_batch(TransformerParams& phi, const Matrix& sources, const Matrix& noise,
                       Mode mode, Mlp::Cache* cache = nullptr);
/// Inference-mode batch synthesis on a frozen model.
Matrix transform_batch(const TransformerParams& phi, const Matrix& sources, const Matrix& noise);

/// Compatibility score in [0,1] for one pair; inference-mode batch norm.
double discriminate(const DiscriminatorParams& theta, std::span<const double> s,
                    std::span<const double> t);
/// Pre-sigmoid logits for a batch of pairs (one column).
Matrix discriminator_logits(DiscriminatorParams& theta, const Matrix& sources,
                            const Matrix& targets, Mode mode, Mlp::Cache* cache = nullptr);
/// Scores in [0,1] for a batch of pairs on a frozen model.
std::vector<double> discriminate_batch(const DiscriminatorParams& theta, const Matrix& sources,
                                       const Matrix& targets);

/// Mean over pairs of real_label*log(p) + (1-real_label)*log(1-p), the
/// one-sided label-smoothed real term of the adversarial objective.
double d_loss_real_term(DiscriminatorParams& theta, const Matrix& sources, const Matrix& targets,
                        double real_label, Mode mode = Mode::infer);
/// Mean over pairs of log(1 - p): the fake term, shared verbatim with t_loss.
double d_loss_fake_term(DiscriminatorParams& theta, const Matrix& sources, const Matrix& targets,
                        Mode mode = Mode::infer);

/// Value of the discriminator objective (the quantity the D-step ascends):
/// real term + fake term, each sub-batch evaluated in its own forward pass.
double d_loss(DiscriminatorParams& theta, const Matrix& real_sources, const Matrix& real_targets,
              const Matrix& fake_sources, const Matrix& fake_targets, double real_label,
              Mode mode = Mode::infer);

/// Value of the transformer objective (the quantity the T-step descends):
/// mean log(1 - D(s, T(s, z))).
double t_loss(DiscriminatorParams& theta, TransformerParams& phi, const Matrix& sources,
              const Matrix& noise, Mode t_mode = Mode::infer, Mode d_mode = Mode::infer);

/// log of a probability clamped into [kScoreClamp, 1-kScoreClamp].
double clamped_log(double p);

}  // namespace craft
