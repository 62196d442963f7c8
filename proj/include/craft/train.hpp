#pragma once

#include <cstdint>
#include <vector>

#include "craft/dataset.hpp"
#include "craft/model.hpp"

namespace craft {

struct TrainConfig {
    double learning_rate = 2e-4;
    std::size_t batch_size = 128;  // must be even: equal real/synthetic split
    std::size_t epochs = 0;
    std::size_t d_z = 128;
    double leaky_alpha = 0.2;
    double real_label = 0.9;  // one-sided label smoothing of the real target
    std::uint64_t rng_seed = 0;
    std::size_t d_steps_per_t_step = 1;
    bool non_saturating_t_loss = false;
    // Learning-rate schedule: constant for lr_hold_fraction of the total
    // step budget, then linear decay to zero ("starting learning rate").
    // 1.0 keeps the rate constant throughout.
    double lr_hold_fraction = 0.0;

    void validate() const;
};

struct LossHistory {
    std::vector<double> d_values;  // discriminator objective value per step (maximized)
    std::vector<double> t_values;  // transformer objective value per step (minimized)
};

struct StepLosses {
    double d_value = 0.0;
    double t_value = 0.0;
};

/// One adversarial training session: owns both players, their optimizer
/// states and the RNG. Single-threaded mutation.
class GanTrainer {
public:
    GanTrainer(const PairDataset& data, const TrainConfig& config);

    /// d_steps_per_t_step discriminator updates followed by one transformer
    /// update on a minibatch of real pairs (batch_size rows). The first half
    /// of the minibatch is the real sub-batch; the sources of the second
    /// half condition the synthetic sub-batch.
    StepLosses train_step(const Matrix& batch_sources, const Matrix& batch_targets);

    /// epochs * floor(N / batch_size) steps over reshuffled minibatches.
    LossHistory run();

    /// Discriminator objective value on a minibatch under the joint-batch
    /// normalization regime of the D-step, without touching any state.
    double d_objective_on_batch(const Matrix& batch_sources, const Matrix& batch_targets,
                                const Matrix& noise);

    TransformerParams& transformer() { return phi_; }
    DiscriminatorParams& discriminator() { return theta_; }
    const TransformerParams& transformer() const { return phi_; }
    const DiscriminatorParams& discriminator() const { return theta_; }
    Rng& rng() { return rng_; }
    const TrainConfig& config() const { return config_; }

    /// Total steps the schedule spans; run() sets this from the dataset.
    void set_schedule_steps(std::size_t total_steps) { schedule_steps_ = total_steps; }

private:
    double current_lr_scale() const;
    void d_step(const Matrix& real_s, const Matrix& real_t, const Matrix& fake_src,
                double* objective_value);
    void t_step(const Matrix& sources, double* objective_value);

    const PairDataset& data_;
    TrainConfig config_;
    Rng rng_;
    TransformerParams phi_;
    DiscriminatorParams theta_;
    AdamState opt_phi_;
    AdamState opt_theta_;
    std::size_t steps_done_ = 0;
    std::size_t schedule_steps_ = 0;
};

struct TrainResult {
    TransformerParams phi;
    DiscriminatorParams theta;
    LossHistory history;
};

/// Train on shuffled minibatches per the config; deterministic in rng_seed.
TrainResult train(const PairDataset& data, const TrainConfig& config);

}  // namespace craft
