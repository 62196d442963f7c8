#include "craft/checkpoint.hpp"

#include "craft/error.hpp"
#include "io_util.hpp"

namespace craft {

namespace {

constexpr char kMagic[9] = "CRAFTCK1";
constexpr std::uint32_t kVersion = 1;

void write_mlp(std::ostream& out, const Mlp& net) {
    io::write_f64(out, net.leaky_alpha());
    io::write_u32(out, static_cast<std::uint32_t>(net.dense_layers().size()));
    for (const auto& layer : net.dense_layers()) {
        io::write_matrix(out, layer.weight);
        io::write_f64_vector(out, layer.bias);
    }
    io::write_u32(out, static_cast<std::uint32_t>(net.bn_layers().size()));
    for (const auto& layer : net.bn_layers()) {
        io::write_f64_vector(out, layer.gamma);
        io::write_f64_vector(out, layer.beta);
        io::write_f64_vector(out, layer.running_mean);
        io::write_f64_vector(out, layer.running_var);
        io::write_f64(out, layer.momentum);
        io::write_f64(out, layer.epsilon);
    }
}

Mlp read_mlp(io::Reader& r) {
    Mlp net;
    const double alpha = r.f64();
    const std::uint32_t n_dense = r.u32();
    std::vector<DenseLayer> dense(n_dense);
    for (auto& layer : dense) {
        layer.weight = r.matrix();
        layer.bias = r.f64_vector();
        if (layer.bias.size() != layer.weight.rows())
            throw IoError("checkpoint: bias length disagrees with weight rows");
    }
    const std::uint32_t n_bn = r.u32();
    if (n_dense == 0 || n_bn + 1 != n_dense)
        throw IoError("checkpoint: layer counts are inconsistent");
    std::vector<BatchNormLayer> bn(n_bn);
    for (auto& layer : bn) {
        layer.gamma = r.f64_vector();
        layer.beta = r.f64_vector();
        layer.running_mean = r.f64_vector();
        layer.running_var = r.f64_vector();
        layer.momentum = r.f64();
        layer.epsilon = r.f64();
        if (layer.beta.size() != layer.width() || layer.running_mean.size() != layer.width() ||
            layer.running_var.size() != layer.width())
            throw IoError("checkpoint: batch-norm vector lengths disagree");
    }
    // rebuild through a scratch net to keep Mlp construction in one place
    Rng scratch_rng(0);
    std::vector<std::size_t> hidden;
    for (std::size_t i = 0; i + 1 < dense.size(); ++i) hidden.push_back(dense[i].out_dim());
    net = Mlp(dense.front().in_dim(), hidden, dense.back().out_dim(), alpha, scratch_rng);
    net.dense_layers() = std::move(dense);
    net.bn_layers() = std::move(bn);
    return net;
}

}  // namespace

void checkpoint_save(const Checkpoint& ckpt, const std::string& path) {
    auto out = io::open_out(path, "checkpoint_save");
    out.write(kMagic, 8);
    io::write_u32(out, kVersion);
    io::write_u64(out, ckpt.phi.d_s);
    io::write_u64(out, ckpt.phi.d_z);
    io::write_u64(out, ckpt.phi.d_t);
    io::write_string(out, ckpt.config_echo);
    write_mlp(out, ckpt.phi.net);
    write_mlp(out, ckpt.theta.net);
    if (!out) throw IoError("checkpoint_save: write failed for " + path);
}

Checkpoint checkpoint_load(const std::string& path) {
    auto in = io::open_in(path, "checkpoint_load");
    io::Reader r(in, "checkpoint");
    r.expect_magic(kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw IoError("checkpoint: unsupported version " + std::to_string(version));

    Checkpoint ckpt;
    ckpt.phi.d_s = r.u64();
    ckpt.phi.d_z = r.u64();
    ckpt.phi.d_t = r.u64();
    ckpt.config_echo = r.string();
    ckpt.phi.net = read_mlp(r);
    ckpt.theta.net = read_mlp(r);
    r.expect_eof();

    ckpt.theta.d_s = ckpt.phi.d_s;
    ckpt.theta.d_t = ckpt.phi.d_t;
    if (ckpt.phi.net.in_dim() != ckpt.phi.d_s + ckpt.phi.d_z ||
        ckpt.phi.net.out_dim() != ckpt.phi.d_t)
        throw IoError("checkpoint: transformer shape disagrees with header dims");
    if (ckpt.theta.net.in_dim() != ckpt.theta.d_s + ckpt.theta.d_t ||
        ckpt.theta.net.out_dim() != 1)
        throw IoError("checkpoint: discriminator shape disagrees with header dims");
    return ckpt;
}

}  // namespace craft
