#include "craft/model.hpp"

#include <algorithm>
#include <cmath>

#include "craft/error.hpp"

namespace craft {

TransformerParams make_transformer(std::size_t d_s, std::size_t d_z, std::size_t d_t,
                                   double leaky_alpha, Rng& rng) {
    if (d_s == 0 || d_z == 0 || d_t == 0)
        throw ValidationError("make_transformer: dimensions must be >= 1");
    TransformerParams phi;
    phi.d_s = d_s;
    phi.d_z = d_z;
    phi.d_t = d_t;
    phi.net = Mlp(d_s + d_z, {kHiddenWidth, kHiddenWidth}, d_t, leaky_alpha, rng);
    return phi;
}

DiscriminatorParams make_discriminator(std::size_t d_s, std::size_t d_t, double leaky_alpha,
                                       Rng& rng) {
    if (d_s == 0 || d_t == 0) throw ValidationError("make_discriminator: dimensions must be >= 1");
    DiscriminatorParams theta;
    theta.d_s = d_s;
    theta.d_t = d_t;
    theta.net = Mlp(d_s + d_t, {kHiddenWidth, kHiddenWidth}, 1, leaky_alpha, rng);
    return theta;
}

std::vector<double> sample_noise(Rng& rng, std::size_t d_z) { return sample_unit_sphere(rng, d_z); }

namespace {

Matrix concat_checked(const Matrix& a, const Matrix& b, std::size_t want_a, std::size_t want_b,
                      const char* who) {
    if (a.cols() != want_a || b.cols() != want_b)
        throw DimensionError(std::string(who) + ": got (" + std::to_string(a.cols()) + ", " +
                             std::to_string(b.cols()) + "), want (" + std::to_string(want_a) +
                             ", " + std::to_string(want_b) + ")");
    if (a.rows() != b.rows()) throw DimensionError(std::string(who) + ": batch size mismatch");
    return hstack(a, b);
}

}  // namespace

std::vector<double> transform(const TransformerParams& phi, std::span<const double> s,
                              std::span<const double> z) {
    if (s.size() != phi.d_s || z.size() != phi.d_z)
        throw DimensionError("transform: source/noise dims do not match the model");
    Matrix in(1, phi.d_s + phi.d_z);
    std::copy(s.begin(), s.end(), in.data());
    std::copy(z.begin(), z.end(), in.data() + phi.d_s);
    Matrix out = phi.net.infer(in);
    return {out.data(), out.data() + out.cols()};
}

Matrix transform_batch(TransformerParams& phi, const Matrix& sources, const Matrix& noise,
                       Mode mode, Mlp::Cache* cache) {
    Matrix in = concat_checked(sources, noise, phi.d_s, phi.d_z, "transform_batch");
    return phi.net.forward(in, mode, cache);
}

Matrix transform_batch(const TransformerParams& phi, const Matrix& sources, const Matrix& noise) {
    Matrix in = concat_checked(sources, noise, phi.d_s, phi.d_z, "transform_batch");
    return phi.net.infer(in);
}

double discriminate(const DiscriminatorParams& theta, std::span<const double> s,
                    std::span<const double> t) {
    if (s.size() != theta.d_s || t.size() != theta.d_t)
        throw DimensionError("discriminate: pair dims do not match the model");
    Matrix in(1, theta.d_s + theta.d_t);
    std::copy(s.begin(), s.end(), in.data());
    std::copy(t.begin(), t.end(), in.data() + theta.d_s);
    return sigmoid(theta.net.infer(in)(0, 0));
}

Matrix discriminator_logits(DiscriminatorParams& theta, const Matrix& sources,
                            const Matrix& targets, Mode mode, Mlp::Cache* cache) {
    Matrix in = concat_checked(sources, targets, theta.d_s, theta.d_t, "discriminator_logits");
    return theta.net.forward(in, mode, cache);
}

std::vector<double> discriminate_batch(const DiscriminatorParams& theta, const Matrix& sources,
                                       const Matrix& targets) {
    Matrix in = concat_checked(sources, targets, theta.d_s, theta.d_t, "discriminate_batch");
    Matrix u = theta.net.infer(in);
    std::vector<double> p(u.rows());
    for (std::size_t r = 0; r < u.rows(); ++r) p[r] = sigmoid(u(r, 0));
    return p;
}

double clamped_log(double p) {
    return std::log(std::clamp(p, kScoreClamp, 1.0 - kScoreClamp));
}

double d_loss_real_term(DiscriminatorParams& theta, const Matrix& sources, const Matrix& targets,
                        double real_label, Mode mode) {
    if (sources.rows() == 0) throw ValidationError("d_loss: empty real batch");
    Matrix u = discriminator_logits(theta, sources, targets, mode);
    double acc = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) {
        const double p = sigmoid(u(r, 0));
        acc += real_label * clamped_log(p) + (1.0 - real_label) * clamped_log(1.0 - p);
    }
    return acc / static_cast<double>(u.rows());
}

double d_loss_fake_term(DiscriminatorParams& theta, const Matrix& sources, const Matrix& targets,
                        Mode mode) {
    if (sources.rows() == 0) throw ValidationError("d_loss: empty fake batch");
    Matrix u = discriminator_logits(theta, sources, targets, mode);
    double acc = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r) acc += clamped_log(1.0 - sigmoid(u(r, 0)));
    return acc / static_cast<double>(u.rows());
}

double d_loss(DiscriminatorParams& theta, const Matrix& real_sources, const Matrix& real_targets,
              const Matrix& fake_sources, const Matrix& fake_targets, double real_label,
              Mode mode) {
    return d_loss_real_term(theta, real_sources, real_targets, real_label, mode) +
           d_loss_fake_term(theta, fake_sources, fake_targets, mode);
}

double t_loss(DiscriminatorParams& theta, TransformerParams& phi, const Matrix& sources,
              const Matrix& noise, Mode t_mode, Mode d_mode) {
    if (sources.rows() != noise.rows()) throw DimensionError("t_loss: batch size mismatch");
    Matrix t_hat = transform_batch(phi, sources, noise, t_mode);
    return d_loss_fake_term(theta, sources, t_hat, d_mode);
}

}  // namespace craft
