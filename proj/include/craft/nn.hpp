#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "craft/matrix.hpp"

namespace craft {

using Rng = std::mt19937_64;

/// How a forward pass treats batch normalization statistics.
///  train:        normalize with batch statistics, update the running EMA.
///  train_frozen: normalize with batch statistics, leave running stats alone
///                (used when the *other* player drives the forward pass).
///  infer:        normalize with the stored running statistics.
enum class Mode { train, train_frozen, infer };

// ---------------------------------------------------------------- dense ----

struct DenseLayer {
    Matrix weight;             // out x in
    std::vector<double> bias;  // out

    std::size_t in_dim() const { return weight.cols(); }
    std::size_t out_dim() const { return weight.rows(); }
};

/// y = x W^T + b for a batch x (n x in).
Matrix dense_forward(const DenseLayer& layer, const Matrix& x);

struct DenseGrad {
    Matrix weight;
    std::vector<double> bias;
};

/// Given the forward input x and upstream dL/dy, fills the parameter gradient
/// and returns dL/dx.
Matrix dense_backward(const DenseLayer& layer, const Matrix& x, const Matrix& dy,
                      DenseGrad& grad);

// ----------------------------------------------------------- batch norm ----

struct BatchNormLayer {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double momentum = 0.9;   // running <- momentum*running + (1-momentum)*batch
    double epsilon = 1e-5;

    static BatchNormLayer make(std::size_t width);
    std::size_t width() const { return gamma.size(); }
};

struct BnCache {
    Matrix xhat;
    Matrix centered;
    std::vector<double> inv_std;  // 1/sqrt(var + eps) per channel
    bool batch_stats = false;     // true when normalized with batch statistics
    bool valid = false;
};

/// Batch statistics use the biased (1/n) variance. Training with batch
/// size < 2 is an error. `cache`, when given, records what backward needs.
Matrix batchnorm_forward(BatchNormLayer& layer, const Matrix& x, Mode mode,
                         BnCache* cache = nullptr);
/// Inference-only forward on a const layer.
Matrix batchnorm_infer(const BatchNormLayer& layer, const Matrix& x);

struct BnGrad {
    std::vector<double> gamma;
    std::vector<double> beta;
};

Matrix batchnorm_backward(const BatchNormLayer& layer, const BnCache& cache, const Matrix& dy,
                          BnGrad& grad);

// ---------------------------------------------------------- activations ----

/// Elementwise x >= 0 ? x : alpha*x. Requires alpha in [0, 1).
Matrix leaky_relu(const Matrix& x, double alpha);
/// dL/dx given the forward input and upstream dL/dy.
Matrix leaky_relu_backward(const Matrix& x, const Matrix& dy, double alpha);

double sigmoid(double u);

// ------------------------------------------------------------------ mlp ----

/// Stack of fully-connected layers; every layer except the last is followed
/// by batch normalization and a leaky ReLU. The final layer is linear.
class Mlp {
public:
    Mlp() = default;
    /// Xavier-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
    Mlp(std::size_t in_dim, const std::vector<std::size_t>& hidden, std::size_t out_dim,
        double leaky_alpha, Rng& rng);

    struct Cache {
        std::vector<Matrix> dense_in;   // input to dense layer i
        std::vector<BnCache> bn;        // per hidden block
        std::vector<Matrix> act_in;     // input to leaky relu (bn output)
        bool valid = false;
    };

    /// Forward pass; records intermediates into `cache` when given.
    Matrix forward(const Matrix& x, Mode mode, Cache* cache = nullptr);
    /// Inference forward (running BN statistics), usable on a frozen model.
    Matrix infer(const Matrix& x) const;

    struct Grads {
        std::vector<DenseGrad> dense;
        std::vector<BnGrad> bn;
    };

    /// Exact gradients of the scalar loss whose upstream dL/dy is `dy`,
    /// for every parameter and for the input. Requires a forward pass
    /// recorded into `cache`; throws StateError otherwise.
    Matrix backward(const Cache& cache, const Matrix& dy, Grads& grads) const;

    Grads zero_grads() const;

    std::size_t in_dim() const { return dense_.front().in_dim(); }
    std::size_t out_dim() const { return dense_.back().out_dim(); }
    double leaky_alpha() const { return leaky_alpha_; }

    std::vector<DenseLayer>& dense_layers() { return dense_; }
    const std::vector<DenseLayer>& dense_layers() const { return dense_; }
    std::vector<BatchNormLayer>& bn_layers() { return bn_; }
    const std::vector<BatchNormLayer>& bn_layers() const { return bn_; }

    /// Named views over every learnable tensor, in a fixed order matching
    /// grad_views(). BN running statistics are excluded (not learnable).
    struct TensorView {
        std::string name;
        std::span<double> data;
    };
    std::vector<TensorView> param_views();
    static std::vector<TensorView> grad_views(Grads& grads);

private:
    std::vector<DenseLayer> dense_;
    std::vector<BatchNormLayer> bn_;
    double leaky_alpha_ = 0.2;
};

// ----------------------------------------------------------------- adam ----

struct AdamConfig {
    double learning_rate = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam over a fixed set of named tensors.
class AdamState {
public:
    AdamState() = default;
    AdamState(const std::vector<Mlp::TensorView>& params, AdamConfig config);

    /// One update. Shapes must match the registered tensors; a non-finite
    /// gradient raises NumericError naming the parameter. `lr_scale`
    /// multiplies the configured learning rate (for decay schedules).
    void step(std::vector<Mlp::TensorView> params, const std::vector<Mlp::TensorView>& grads,
              double lr_scale = 1.0);

    std::int64_t step_count() const { return step_count_; }
    const AdamConfig& config() const { return config_; }

private:
    struct Slot {
        std::string name;
        std::vector<double> m;
        std::vector<double> v;
    };
    std::vector<Slot> slots_;
    std::int64_t step_count_ = 0;
    AdamConfig config_;
};

/// Xavier-uniform dense layer.
DenseLayer make_dense(std::size_t out_dim, std::size_t in_dim, Rng& rng);

/// Unit-norm direction drawn uniformly from the (d-1)-sphere.
std::vector<double> sample_unit_sphere(Rng& rng, std::size_t d);
/// n independent unit-sphere rows.
Matrix sample_unit_sphere_rows(Rng& rng, std::size_t n, std::size_t d);

}  // namespace craft
