#include "craft/nn.hpp"

#include <cmath>
#include <cstring>

#include "craft/error.hpp"

namespace craft {

// ---------------------------------------------------------------- dense ----

Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
    if (x.cols() != layer.in_dim()) {
        throw DimensionError("dense_forward: input width " + std::to_string(x.cols()) +
                             " vs layer width " + std::to_string(layer.in_dim()));
    }
    if (layer.bias.size() != layer.out_dim())
        throw DimensionError("dense_forward: bias length vs weight rows");
    Matrix y = matmul_nt(x, layer.weight);
    for (std::size_t r = 0; r < y.rows(); ++r)
        for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += layer.bias[c];
    return y;
}

Matrix dense_backward(const DenseLayer& layer, const Matrix& x, const Matrix& dy,
                      DenseGrad& grad) {
    if (dy.rows() != x.rows() || dy.cols() != layer.out_dim())
        throw DimensionError("dense_backward: upstream shape mismatch");
    grad.weight = matmul_tn(dy, x);  // (out x in)
    grad.bias.assign(layer.out_dim(), 0.0);
    for (std::size_t r = 0; r < dy.rows(); ++r)
        for (std::size_t c = 0; c < dy.cols(); ++c) grad.bias[c] += dy(r, c);
    return matmul(dy, layer.weight);  // (n x in)
}

// ----------------------------------------------------------- batch norm ----

BatchNormLayer BatchNormLayer::make(std::size_t width) {
    BatchNormLayer l;
    l.gamma.assign(width, 1.0);
    l.beta.assign(width, 0.0);
    l.running_mean.assign(width, 0.0);
    l.running_var.assign(width, 1.0);
    return l;
}

Matrix batchnorm_forward(BatchNormLayer& layer, const Matrix& x, Mode mode, BnCache* cache) {
    const std::size_t c = layer.width();
    if (x.cols() != c) throw DimensionError("batchnorm_forward: channel mismatch");

    if (mode == Mode::infer) {
        Matrix y = batchnorm_infer(layer, x);
        if (cache) {
            // xhat is still needed for exact gamma/beta gradients.
            cache->xhat = Matrix(x.rows(), c);
            cache->inv_std.assign(c, 0.0);
            for (std::size_t j = 0; j < c; ++j) {
                cache->inv_std[j] = 1.0 / std::sqrt(layer.running_var[j] + layer.epsilon);
                for (std::size_t r = 0; r < x.rows(); ++r)
                    cache->xhat(r, j) = (x(r, j) - layer.running_mean[j]) * cache->inv_std[j];
            }
            cache->centered = Matrix();
            cache->batch_stats = false;
            cache->valid = true;
        }
        return y;
    }

    const std::size_t n = x.rows();
    if (n < 2)
        throw ValidationError("batchnorm_forward: training mode needs batch size >= 2, got " +
                              std::to_string(n));

    std::vector<double> mean(c, 0.0), var(c, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < c; ++j) mean[j] += x(r, j);
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < c; ++j) {
            const double d = x(r, j) - mean[j];
            var[j] += d * d;
        }
    for (double& v : var) v /= static_cast<double>(n);  // biased

    std::vector<double> inv_std(c);
    for (std::size_t j = 0; j < c; ++j) inv_std[j] = 1.0 / std::sqrt(var[j] + layer.epsilon);

    Matrix centered(n, c), xhat(n, c), y(n, c);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < c; ++j) {
            centered(r, j) = x(r, j) - mean[j];
            xhat(r, j) = centered(r, j) * inv_std[j];
            y(r, j) = layer.gamma[j] * xhat(r, j) + layer.beta[j];
        }

    if (mode == Mode::train) {
        const double m = layer.momentum;
        for (std::size_t j = 0; j < c; ++j) {
            layer.running_mean[j] = m * layer.running_mean[j] + (1.0 - m) * mean[j];
            layer.running_var[j] = m * layer.running_var[j] + (1.0 - m) * var[j];
        }
    }

    if (cache) {
        cache->xhat = std::move(xhat);
        cache->centered = std::move(centered);
        cache->inv_std = std::move(inv_std);
        cache->batch_stats = true;
        cache->valid = true;
    }
    return y;
}

Matrix batchnorm_infer(const BatchNormLayer& layer, const Matrix& x) {
    const std::size_t c = layer.width();
    if (x.cols() != c) throw DimensionError("batchnorm_infer: channel mismatch");
    Matrix y(x.rows(), c);
    for (std::size_t j = 0; j < c; ++j) {
        const double inv = 1.0 / std::sqrt(layer.running_var[j] + layer.epsilon);
        const double g = layer.gamma[j] * inv;
        const double b = layer.beta[j] - layer.gamma[j] * layer.running_mean[j] * inv;
        for (std::size_t r = 0; r < x.rows(); ++r) y(r, j) = g * x(r, j) + b;
    }
    return y;
}

Matrix batchnorm_backward(const BatchNormLayer& layer, const BnCache& cache, const Matrix& dy,
                          BnGrad& grad) {
    if (!cache.valid) throw StateError("batchnorm_backward: no recorded forward pass");
    const std::size_t c = layer.width();
    if (dy.cols() != c) throw DimensionError("batchnorm_backward: channel mismatch");

    if (!cache.batch_stats) {
        // Normalized with fixed running statistics: an affine map per channel.
        grad.gamma.assign(c, 0.0);
        grad.beta.assign(c, 0.0);
        Matrix dx(dy.rows(), c);
        for (std::size_t r = 0; r < dy.rows(); ++r)
            for (std::size_t j = 0; j < c; ++j) {
                const double g = dy(r, j);
                grad.beta[j] += g;
                grad.gamma[j] += g * cache.xhat(r, j);
                dx(r, j) = g * layer.gamma[j] * cache.inv_std[j];
            }
        return dx;
    }

    const std::size_t n = dy.rows();
    if (cache.xhat.rows() != n) throw StateError("batchnorm_backward: cache batch mismatch");

    grad.gamma.assign(c, 0.0);
    grad.beta.assign(c, 0.0);
    std::vector<double> sum_dxhat(c, 0.0), sum_dxhat_xhat(c, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < c; ++j) {
            const double g = dy(r, j);
            grad.beta[j] += g;
            grad.gamma[j] += g * cache.xhat(r, j);
        }
    // dxhat = dy * gamma; accumulate its channel sums for the mean/var terms.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < c; ++j) {
            const double dxh = dy(r, j) * layer.gamma[j];
            sum_dxhat[j] += dxh;
            sum_dxhat_xhat[j] += dxh * cache.xhat(r, j);
        }

    // dx_i = inv_std/n * (n*dxhat_i - sum(dxhat) - xhat_i * sum(dxhat*xhat))
    Matrix dx(n, c);
    const double dn = static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < c; ++j) {
            const double dxh = dy(r, j) * layer.gamma[j];
            dx(r, j) = cache.inv_std[j] / dn *
                       (dn * dxh - sum_dxhat[j] - cache.xhat(r, j) * sum_dxhat_xhat[j]);
        }
    return dx;
}

// ---------------------------------------------------------- activations ----

Matrix leaky_relu(const Matrix& x, double alpha) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw ValidationError("leaky_relu: alpha must be in [0,1), got " + std::to_string(alpha));
    Matrix y = x;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y.data()[i] < 0.0) y.data()[i] *= alpha;
    return y;
}

Matrix leaky_relu_backward(const Matrix& x, const Matrix& dy, double alpha) {
    if (x.rows() != dy.rows() || x.cols() != dy.cols())
        throw DimensionError("leaky_relu_backward: shape mismatch");
    Matrix dx = dy;
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (x.data()[i] < 0.0) dx.data()[i] *= alpha;
    return dx;
}

double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

// ------------------------------------------------------------------ mlp ----

DenseLayer make_dense(std::size_t out_dim, std::size_t in_dim, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weight = Matrix(out_dim, in_dim);
    for (std::size_t i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = dist(rng);
    layer.bias.assign(out_dim, 0.0);
    return layer;
}

Mlp::Mlp(std::size_t in_dim, const std::vector<std::size_t>& hidden, std::size_t out_dim,
         double leaky_alpha, Rng& rng)
    : leaky_alpha_(leaky_alpha) {
    std::size_t prev = in_dim;
    for (std::size_t h : hidden) {
        dense_.push_back(make_dense(h, prev, rng));
        bn_.push_back(BatchNormLayer::make(h));
        prev = h;
    }
    dense_.push_back(make_dense(out_dim, prev, rng));
}

Matrix Mlp::forward(const Matrix& x, Mode mode, Cache* cache) {
    if (cache) {
        cache->dense_in.clear();
        cache->bn.assign(bn_.size(), BnCache{});
        cache->act_in.clear();
        cache->valid = false;
    }
    Matrix h = x;
    for (std::size_t i = 0; i < bn_.size(); ++i) {
        if (cache) cache->dense_in.push_back(h);
        Matrix a = dense_forward(dense_[i], h);
        Matrix norm = batchnorm_forward(bn_[i], a, mode, cache ? &cache->bn[i] : nullptr);
        if (cache) cache->act_in.push_back(norm);
        h = leaky_relu(norm, leaky_alpha_);
    }
    if (cache) cache->dense_in.push_back(h);
    Matrix y = dense_forward(dense_.back(), h);
    if (cache) cache->valid = true;
    return y;
}

Matrix Mlp::infer(const Matrix& x) const {
    Matrix h = x;
    for (std::size_t i = 0; i < bn_.size(); ++i) {
        Matrix a = dense_forward(dense_[i], h);
        h = leaky_relu(batchnorm_infer(bn_[i], a), leaky_alpha_);
    }
    return dense_forward(dense_.back(), h);
}

Matrix Mlp::backward(const Cache& cache, const Matrix& dy, Grads& grads) const {
    if (!cache.valid) throw StateError("Mlp::backward: no recorded forward pass");
    if (cache.dense_in.size() != dense_.size())
        throw StateError("Mlp::backward: cache does not match network depth");

    grads.dense.assign(dense_.size(), DenseGrad{});
    grads.bn.assign(bn_.size(), BnGrad{});

    Matrix d = dense_backward(dense_.back(), cache.dense_in.back(), dy, grads.dense.back());
    for (std::size_t i = bn_.size(); i-- > 0;) {
        d = leaky_relu_backward(cache.act_in[i], d, leaky_alpha_);
        d = batchnorm_backward(bn_[i], cache.bn[i], d, grads.bn[i]);
        d = dense_backward(dense_[i], cache.dense_in[i], d, grads.dense[i]);
    }
    return d;
}

Mlp::Grads Mlp::zero_grads() const {
    Grads g;
    g.dense.resize(dense_.size());
    for (std::size_t i = 0; i < dense_.size(); ++i) {
        g.dense[i].weight = Matrix(dense_[i].out_dim(), dense_[i].in_dim());
        g.dense[i].bias.assign(dense_[i].out_dim(), 0.0);
    }
    g.bn.resize(bn_.size());
    for (std::size_t i = 0; i < bn_.size(); ++i) {
        g.bn[i].gamma.assign(bn_[i].width(), 0.0);
        g.bn[i].beta.assign(bn_[i].width(), 0.0);
    }
    return g;
}

std::vector<Mlp::TensorView> Mlp::param_views() {
    std::vector<TensorView> v;
    for (std::size_t i = 0; i < dense_.size(); ++i) {
        const std::string tag = std::to_string(i);
        v.push_back({"dense" + tag + ".weight",
                     {dense_[i].weight.data(), dense_[i].weight.size()}});
        v.push_back({"dense" + tag + ".bias", {dense_[i].bias.data(), dense_[i].bias.size()}});
        if (i < bn_.size()) {
            v.push_back({"bn" + tag + ".gamma", {bn_[i].gamma.data(), bn_[i].gamma.size()}});
            v.push_back({"bn" + tag + ".beta", {bn_[i].beta.data(), bn_[i].beta.size()}});
        }
    }
    return v;
}

std::vector<Mlp::TensorView> Mlp::grad_views(Grads& grads) {
    std::vector<TensorView> v;
    for (std::size_t i = 0; i < grads.dense.size(); ++i) {
        const std::string tag = std::to_string(i);
        v.push_back({"dense" + tag + ".weight",
                     {grads.dense[i].weight.data(), grads.dense[i].weight.size()}});
        v.push_back(
            {"dense" + tag + ".bias", {grads.dense[i].bias.data(), grads.dense[i].bias.size()}});
        if (i < grads.bn.size()) {
            v.push_back(
                {"bn" + tag + ".gamma", {grads.bn[i].gamma.data(), grads.bn[i].gamma.size()}});
            v.push_back(
                {"bn" + tag + ".beta", {grads.bn[i].beta.data(), grads.bn[i].beta.size()}});
        }
    }
    return v;
}

// ----------------------------------------------------------------- adam ----

AdamState::AdamState(const std::vector<Mlp::TensorView>& params, AdamConfig config)
    : config_(config) {
    for (const auto& p : params) {
        Slot s;
        s.name = p.name;
        s.m.assign(p.data.size(), 0.0);
        s.v.assign(p.data.size(), 0.0);
        slots_.push_back(std::move(s));
    }
}

void AdamState::step(std::vector<Mlp::TensorView> params,
                     const std::vector<Mlp::TensorView>& grads, double lr_scale) {
    if (params.size() != slots_.size() || grads.size() != slots_.size())
        throw DimensionError("AdamState::step: tensor count mismatch");

    ++step_count_;
    const double t = static_cast<double>(step_count_);
    const double bc1 = 1.0 - std::pow(config_.beta1, t);
    const double bc2 = 1.0 - std::pow(config_.beta2, t);
    const double lr = config_.learning_rate * lr_scale;

    for (std::size_t i = 0; i < slots_.size(); ++i) {
        Slot& slot = slots_[i];
        auto p = params[i].data;
        auto g = grads[i].data;
        if (p.size() != slot.m.size() || g.size() != slot.m.size())
            throw DimensionError("AdamState::step: shape mismatch for " + slot.name);
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double gj = g[j];
            if (!std::isfinite(gj))
                throw NumericError("adam_step: non-finite gradient for parameter " + slot.name);
            slot.m[j] = config_.beta1 * slot.m[j] + (1.0 - config_.beta1) * gj;
            slot.v[j] = config_.beta2 * slot.v[j] + (1.0 - config_.beta2) * gj * gj;
            const double mhat = slot.m[j] / bc1;
            const double vhat = slot.v[j] / bc2;
            p[j] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
        }
    }
}

// ---------------------------------------------------------------- noise ----

std::vector<double> sample_unit_sphere(Rng& rng, std::size_t d) {
    if (d == 0) throw ValidationError("sample_unit_sphere: dimension must be >= 1");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& v : z) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (double& v : z) v /= norm;
    return z;
}

Matrix sample_unit_sphere_rows(Rng& rng, std::size_t n, std::size_t d) {
    Matrix z(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = sample_unit_sphere(rng, d);
        std::memcpy(z.data() + r * d, row.data(), d * sizeof(double));
    }
    return z;
}

}  // namespace craft
