#include "craft/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "craft/error.hpp"

namespace craft {

void SyntheticSpec::validate() const {
    if (d_s == 0) throw ValidationError("SyntheticSpec.d_s: must be >= 1");
    if (d_t == 0) throw ValidationError("SyntheticSpec.d_t: must be >= 1");
    if (components.empty()) throw ValidationError("SyntheticSpec.components: empty");
    double weight_sum = 0.0;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& c = components[k];
        const std::string tag = "SyntheticSpec.components[" + std::to_string(k) + "].";
        if (c.weight <= 0.0) throw ValidationError(tag + "weight: must be > 0");
        if (c.source_center.size() != d_s)
            throw ValidationError(tag + "source_center: length != d_s");
        if (c.source_spread <= 0.0) throw ValidationError(tag + "source_spread: must be > 0");
        if (c.map.rows() != d_t || c.map.cols() != d_s)
            throw ValidationError(tag + "map: shape must be d_t x d_s");
        if (c.offset.size() != d_t) throw ValidationError(tag + "offset: length != d_t");
        if (c.noise_sigma <= 0.0) throw ValidationError(tag + "noise_sigma: must be > 0");
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9)
        throw ValidationError("SyntheticSpec.components: weights sum to " +
                              std::to_string(weight_sum) + ", want 1");
}

std::vector<double> SyntheticSpec::responsibilities(std::span<const double> s) const {
    if (s.size() != d_s) throw DimensionError("responsibilities: source dim mismatch");
    // log w_k + log N(s; mu_k, spread_k^2 I), normalized via log-sum-exp
    std::vector<double> logp(components.size());
    double max_lp = -1e300;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& c = components[k];
        double q = 0.0;
        for (std::size_t i = 0; i < d_s; ++i) {
            const double d = s[i] - c.source_center[i];
            q += d * d;
        }
        logp[k] = std::log(c.weight) - 0.5 * q / (c.source_spread * c.source_spread) -
                  static_cast<double>(d_s) * std::log(c.source_spread);
        max_lp = std::max(max_lp, logp[k]);
    }
    double z = 0.0;
    for (double& lp : logp) {
        lp = std::exp(lp - max_lp);
        z += lp;
    }
    for (double& lp : logp) lp /= z;
    return logp;
}

std::vector<double> SyntheticSpec::conditional_mean(std::span<const double> s) const {
    const auto resp = responsibilities(s);
    std::vector<double> mean(d_t, 0.0);
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& c = components[k];
        for (std::size_t i = 0; i < d_t; ++i) {
            double v = c.offset[i];
            for (std::size_t j = 0; j < d_s; ++j) v += c.map(i, j) * s[j];
            mean[i] += resp[k] * v;
        }
    }
    return mean;
}

double SyntheticSpec::conditional_std(std::span<const double> s) const {
    const auto resp = responsibilities(s);
    const auto mean = conditional_mean(s);
    double total = 0.0;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto& c = components[k];
        double dist2 = 0.0;
        for (std::size_t i = 0; i < d_t; ++i) {
            double v = c.offset[i];
            for (std::size_t j = 0; j < d_s; ++j) v += c.map(i, j) * s[j];
            const double d = v - mean[i];
            dist2 += d * d;
        }
        total += resp[k] * (c.noise_sigma * c.noise_sigma * static_cast<double>(d_t) + dist2);
    }
    return std::sqrt(total / static_cast<double>(d_t));
}

namespace {

std::size_t pick_component(const SyntheticSpec& spec, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng);
    for (std::size_t k = 0; k < spec.components.size(); ++k) {
        u -= spec.components[k].weight;
        if (u <= 0.0) return k;
    }
    return spec.components.size() - 1;
}

}  // namespace

std::vector<double> SyntheticSpec::sample_source(Rng& rng) const {
    const auto& c = components[pick_component(*this, rng)];
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> s(d_s);
    for (std::size_t i = 0; i < d_s; ++i)
        s[i] = c.source_center[i] + c.source_spread * gauss(rng);
    return s;
}

PairDataset synth_generate(const SyntheticSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    if (n == 0) throw ValidationError("synth_generate: n must be >= 1");

    std::normal_distribution<double> gauss(0.0, 1.0);
    PairDataset ds;
    ds.sources = Matrix(n, spec.d_s);
    ds.targets = Matrix(n, spec.d_t);
    ds.item_ids.reserve(n);

    for (std::size_t r = 0; r < n; ++r) {
        const auto& c = spec.components[pick_component(spec, rng)];
        auto s = ds.sources.row(r);
        for (std::size_t i = 0; i < spec.d_s; ++i)
            s[i] = c.source_center[i] + c.source_spread * gauss(rng);
        auto t = ds.targets.row(r);
        for (std::size_t i = 0; i < spec.d_t; ++i) {
            double v = c.offset[i];
            for (std::size_t j = 0; j < spec.d_s; ++j) v += c.map(i, j) * s[j];
            t[i] = v + c.noise_sigma * gauss(rng);
        }
        ds.item_ids.push_back(std::to_string(r));
    }
    ds.validate();
    return ds;
}

// ------------------------------------------------------------- presets ----

namespace {

MixtureComponent component(double weight, std::vector<double> center, double spread, Matrix map,
                           std::vector<double> offset, double sigma) {
    MixtureComponent c;
    c.weight = weight;
    c.source_center = std::move(center);
    c.source_spread = spread;
    c.map = std::move(map);
    c.offset = std::move(offset);
    c.noise_sigma = sigma;
    return c;
}

SyntheticSpec preset_two_cluster_2d() {
    SyntheticSpec spec;
    spec.d_s = 2;
    spec.d_t = 2;
    spec.components.push_back(component(0.5, {-2.0, -2.0}, 0.6,
                                        Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0}}), {4.0, 3.0},
                                        0.8));
    spec.components.push_back(component(0.5, {2.0, 2.0}, 0.6,
                                        Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}), {-4.0, -2.0},
                                        0.8));
    return spec;
}

SyntheticSpec preset_five_cluster_8d() {
    constexpr std::size_t d = 8;
    SyntheticSpec spec;
    spec.d_s = d;
    spec.d_t = d;
    for (std::size_t k = 0; k < 5; ++k) {
        Matrix shift(d, d);  // cyclic coordinate shift by k+1: distinct orthogonal maps
        for (std::size_t i = 0; i < d; ++i) shift(i, (i + k + 1) % d) = 1.0;
        std::vector<double> offset(d, 0.0);
        offset[(3 * k) % d] = 2.0 + static_cast<double>(k);
        std::vector<double> center(d, 0.0);
        center[k] = 4.0;
        center[(k + 4) % d] = -3.0;
        spec.components.push_back(
            component(0.2, std::move(center), 0.5, std::move(shift), std::move(offset), 0.4));
    }
    return spec;
}

SyntheticSpec preset_density_gradient() {
    // Shared conditional map; clusters differ only in population and spread,
    // giving high/medium/low source-density regions.
    SyntheticSpec spec;
    spec.d_s = 2;
    spec.d_t = 2;
    const Matrix map = Matrix::from_rows({{1.2, 0.0}, {0.0, 0.8}});
    const std::vector<double> offset = {3.0, -3.0};
    spec.components.push_back(component(0.6, {0.0, 0.0}, 0.3, map, offset, 0.25));
    spec.components.push_back(component(0.3, {5.0, 0.0}, 1.0, map, offset, 0.25));
    spec.components.push_back(component(0.1, {0.0, 9.0}, 2.8, map, offset, 0.25));
    return spec;
}

}  // namespace

SyntheticSpec synthetic_preset(const std::string& name) {
    SyntheticSpec spec;
    if (name == "two-cluster-2d") {
        spec = preset_two_cluster_2d();
    } else if (name == "five-cluster-8d") {
        spec = preset_five_cluster_8d();
    } else if (name == "density-gradient") {
        spec = preset_density_gradient();
    } else {
        throw ValidationError("unknown preset '" + name + "'; available: two-cluster-2d, "
                              "five-cluster-8d, density-gradient");
    }
    spec.validate();
    return spec;
}

std::vector<std::string> synthetic_preset_names() {
    return {"two-cluster-2d", "five-cluster-8d", "density-gradient"};
}

// ---------------------------------------------------------------- json ----

SyntheticSpec spec_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("spec json: ") + e.what());
    }
    SyntheticSpec spec;
    try {
        spec.d_s = j.at("d_s").get<std::size_t>();
        spec.d_t = j.at("d_t").get<std::size_t>();
        for (const auto& jc : j.at("components")) {
            MixtureComponent c;
            c.weight = jc.at("weight").get<double>();
            c.source_center = jc.at("source_center").get<std::vector<double>>();
            c.source_spread = jc.at("source_spread").get<double>();
            const auto rows = jc.at("map").get<std::vector<std::vector<double>>>();
            c.map = Matrix(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != c.map.cols())
                    throw ValidationError("spec json: ragged map rows");
                for (std::size_t cc = 0; cc < c.map.cols(); ++cc) c.map(r, cc) = rows[r][cc];
            }
            c.offset = jc.at("offset").get<std::vector<double>>();
            c.noise_sigma = jc.at("noise_sigma").get<double>();
            spec.components.push_back(std::move(c));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("spec json: ") + e.what());
    }
    spec.validate();
    return spec;
}

SyntheticSpec spec_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("spec_load: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return spec_from_json(buf.str());
}

std::string spec_to_json(const SyntheticSpec& spec) {
    nlohmann::json j;
    j["d_s"] = spec.d_s;
    j["d_t"] = spec.d_t;
    j["components"] = nlohmann::json::array();
    for (const auto& c : spec.components) {
        nlohmann::json jc;
        jc["weight"] = c.weight;
        jc["source_center"] = c.source_center;
        jc["source_spread"] = c.source_spread;
        std::vector<std::vector<double>> rows(c.map.rows());
        for (std::size_t r = 0; r < c.map.rows(); ++r)
            rows[r].assign(c.map.row(r).begin(), c.map.row(r).end());
        jc["map"] = rows;
        jc["offset"] = c.offset;
        jc["noise_sigma"] = c.noise_sigma;
        j["components"].push_back(std::move(jc));
    }
    return j.dump(2);
}

}  // namespace craft
