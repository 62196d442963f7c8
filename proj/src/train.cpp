#include "craft/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "craft/error.hpp"

namespace craft {

void TrainConfig::validate() const {
    if (batch_size < 2 || batch_size % 2 != 0)
        throw ValidationError("TrainConfig: batch_size must be even and >= 2");
    if (d_z < 1) throw ValidationError("TrainConfig: d_z must be >= 1");
    if (leaky_alpha < 0.0 || leaky_alpha >= 1.0)
        throw ValidationError("TrainConfig: leaky_alpha must be in [0,1)");
    if (real_label <= 0.5 || real_label > 1.0)
        throw ValidationError("TrainConfig: real_label must be in (0.5, 1]");
    if (learning_rate < 0.0) throw ValidationError("TrainConfig: learning_rate must be >= 0");
    if (d_steps_per_t_step < 1)
        throw ValidationError("TrainConfig: d_steps_per_t_step must be >= 1");
    if (lr_hold_fraction < 0.0 || lr_hold_fraction > 1.0)
        throw ValidationError("TrainConfig: lr_hold_fraction must be in [0,1]");
}

GanTrainer::GanTrainer(const PairDataset& data, const TrainConfig& config)
    : data_(data), config_(config), rng_(config.rng_seed) {
    config_.validate();
    data_.validate();
    phi_ = make_transformer(data.d_s(), config_.d_z, data.d_t(), config_.leaky_alpha, rng_);
    theta_ = make_discriminator(data.d_s(), data.d_t(), config_.leaky_alpha, rng_);
    AdamConfig adam;
    adam.learning_rate = config_.learning_rate;
    opt_phi_ = AdamState(phi_.net.param_views(), adam);
    opt_theta_ = AdamState(theta_.net.param_views(), adam);
}

double GanTrainer::current_lr_scale() const {
    if (schedule_steps_ == 0) return 1.0;
    const double x = static_cast<double>(steps_done_) / static_cast<double>(schedule_steps_);
    const double hold = config_.lr_hold_fraction;
    if (x < hold || hold >= 1.0) return 1.0;
    return (1.0 - x) / (1.0 - hold);
}

namespace {

void check_finite(double value, const char* what, std::size_t step) {
    if (!std::isfinite(value))
        throw NumericError(std::string(what) + " became non-finite at step " +
                           std::to_string(step));
}

}  // namespace

void GanTrainer::d_step(const Matrix& real_s, const Matrix& real_t, const Matrix& fake_src,
                        double* objective_value) {
    const std::size_t n_real = real_s.rows();
    const std::size_t n_fake = fake_src.rows();

    Matrix noise = sample_unit_sphere_rows(rng_, n_fake, config_.d_z);
    // The transformer only synthesizes here; its stats stay frozen.
    Matrix t_hat = transform_batch(phi_, fake_src, noise, Mode::train_frozen);

    // Joint real+synthetic batch: one forward, shared batch statistics.
    Matrix s_all = vstack(real_s, fake_src);
    Matrix t_all = vstack(real_t, t_hat);

    Mlp::Cache cache;
    Matrix u = discriminator_logits(theta_, s_all, t_all, Mode::train, &cache);

    const double alpha = config_.real_label;
    double value = 0.0;
    Matrix du(u.rows(), 1);
    for (std::size_t r = 0; r < n_real; ++r) {
        const double p = sigmoid(u(r, 0));
        value += (alpha * clamped_log(p) + (1.0 - alpha) * clamped_log(1.0 - p)) /
                 static_cast<double>(n_real);
        du(r, 0) = (p - alpha) / static_cast<double>(n_real);
    }
    for (std::size_t r = n_real; r < u.rows(); ++r) {
        const double p = sigmoid(u(r, 0));
        value += clamped_log(1.0 - p) / static_cast<double>(n_fake);
        du(r, 0) = p / static_cast<double>(n_fake);
    }

    Mlp::Grads grads;
    theta_.net.backward(cache, du, grads);
    opt_theta_.step(theta_.net.param_views(), Mlp::grad_views(grads), current_lr_scale());
    *objective_value = value;
}

void GanTrainer::t_step(const Matrix& sources, double* objective_value) {
    const std::size_t n = sources.rows();
    Matrix noise = sample_unit_sphere_rows(rng_, n, config_.d_z);

    Mlp::Cache t_cache;
    Matrix t_hat = transform_batch(phi_, sources, noise, Mode::train, &t_cache);

    // The discriminator is queried with its running statistics: that is the
    // decision function the joint-batch D-step actually trains. Its
    // parameters and stats stay untouched.
    Mlp::Cache d_cache;
    Matrix u = discriminator_logits(theta_, sources, t_hat, Mode::infer, &d_cache);

    double value = 0.0;
    Matrix du(n, 1);
    for (std::size_t r = 0; r < n; ++r) {
        const double p = sigmoid(u(r, 0));
        value += clamped_log(1.0 - p) / static_cast<double>(n);
        if (config_.non_saturating_t_loss) {
            du(r, 0) = (p - 1.0) / static_cast<double>(n);  // descend -log p
        } else {
            du(r, 0) = -p / static_cast<double>(n);  // descend log(1 - p)
        }
    }

    Mlp::Grads d_grads;  // computed for the chain rule, never applied
    Matrix d_input = theta_.net.backward(d_cache, du, d_grads);
    Matrix d_that = slice_cols(d_input, theta_.d_s, theta_.d_s + theta_.d_t);

    Mlp::Grads t_grads;
    phi_.net.backward(t_cache, d_that, t_grads);
    opt_phi_.step(phi_.net.param_views(), Mlp::grad_views(t_grads), current_lr_scale());
    *objective_value = value;
}

StepLosses GanTrainer::train_step(const Matrix& batch_sources, const Matrix& batch_targets) {
    if (batch_sources.rows() != config_.batch_size ||
        batch_targets.rows() != config_.batch_size)
        throw DimensionError("train_step: minibatch size must equal batch_size");
    const std::size_t half = config_.batch_size / 2;

    Matrix real_s = slice_rows(batch_sources, 0, half);
    Matrix real_t = slice_rows(batch_targets, 0, half);
    Matrix fake_src = slice_rows(batch_sources, half, config_.batch_size);

    StepLosses losses;
    for (std::size_t i = 0; i < config_.d_steps_per_t_step; ++i)
        d_step(real_s, real_t, fake_src, &losses.d_value);

    // T-step sources resampled independently from the whole dataset.
    const std::size_t n_q = config_.batch_size;
    std::uniform_int_distribution<std::size_t> pick(0, data_.n() - 1);
    Matrix q(n_q, data_.d_s());
    for (std::size_t r = 0; r < n_q; ++r) {
        auto src = data_.sources.row(pick(rng_));
        std::copy(src.begin(), src.end(), q.data() + r * q.cols());
    }
    t_step(q, &losses.t_value);

    ++steps_done_;
    check_finite(losses.d_value, "d_loss", steps_done_);
    check_finite(losses.t_value, "t_loss", steps_done_);
    return losses;
}

double GanTrainer::d_objective_on_batch(const Matrix& batch_sources, const Matrix& batch_targets,
                                        const Matrix& noise) {
    const std::size_t half = config_.batch_size / 2;
    Matrix real_s = slice_rows(batch_sources, 0, half);
    Matrix real_t = slice_rows(batch_targets, 0, half);
    Matrix fake_src = slice_rows(batch_sources, half, config_.batch_size);

    Matrix t_hat = transform_batch(phi_, fake_src, noise, Mode::train_frozen);
    Matrix s_all = vstack(real_s, fake_src);
    Matrix t_all = vstack(real_t, t_hat);
    Matrix u = discriminator_logits(theta_, s_all, t_all, Mode::train_frozen);

    const double alpha = config_.real_label;
    double value = 0.0;
    for (std::size_t r = 0; r < half; ++r) {
        const double p = sigmoid(u(r, 0));
        value += (alpha * clamped_log(p) + (1.0 - alpha) * clamped_log(1.0 - p)) /
                 static_cast<double>(half);
    }
    for (std::size_t r = half; r < u.rows(); ++r)
        value += clamped_log(1.0 - sigmoid(u(r, 0))) / static_cast<double>(half);
    return value;
}

LossHistory GanTrainer::run() {
    const std::size_t n = data_.n();
    const std::size_t steps_per_epoch = n / config_.batch_size;
    if (config_.epochs > 0 && steps_per_epoch == 0)
        throw ValidationError("train: dataset smaller than one minibatch");
    set_schedule_steps(config_.epochs * steps_per_epoch);

    LossHistory history;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config_.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng_);
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            Matrix bs(config_.batch_size, data_.d_s());
            Matrix bt(config_.batch_size, data_.d_t());
            for (std::size_t r = 0; r < config_.batch_size; ++r) {
                const std::size_t row = order[s * config_.batch_size + r];
                auto sv = data_.sources.row(row);
                auto tv = data_.targets.row(row);
                std::copy(sv.begin(), sv.end(), bs.data() + r * bs.cols());
                std::copy(tv.begin(), tv.end(), bt.data() + r * bt.cols());
            }
            StepLosses losses = train_step(bs, bt);
            history.d_values.push_back(losses.d_value);
            history.t_values.push_back(losses.t_value);
        }
    }
    return history;
}

TrainResult train(const PairDataset& data, const TrainConfig& config) {
    GanTrainer trainer(data, config);
    LossHistory history = trainer.run();
    return {std::move(trainer.transformer()), std::move(trainer.discriminator()),
            std::move(history)};
}

}  // namespace craft
