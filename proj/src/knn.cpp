#include "craft/knn.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "craft/error.hpp"
#include "io_util.hpp"

namespace craft {

namespace {
constexpr char kMagic[9] = "CRAFTIX1";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMetricL2 = 0;
}  // namespace

KnnIndex index_build(Matrix targets, std::vector<std::string> ids) {
    if (targets.rows() == 0) throw ValidationError("index_build: need at least one row");
    if (ids.size() != targets.rows())
        throw ValidationError("index_build: id count != row count");
    targets.require_finite("index_build targets");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids)
        if (!seen.insert(id).second)
            throw ValidationError("index_build: duplicate id '" + id + "'");
    return {std::move(targets), std::move(ids)};
}

std::vector<Neighbor> knn_query(const KnnIndex& index, std::span<const double> query,
                                std::size_t k) {
    if (query.size() != index.dim()) throw DimensionError("knn_query: query dim mismatch");
    if (k == 0 || k > index.size())
        throw ValidationError("knn_query: k must be in [1, index size], got " +
                              std::to_string(k));

    std::vector<Neighbor> all(index.size());
    for (std::size_t r = 0; r < index.size(); ++r) {
        all[r].row = r;
        all[r].distance = std::sqrt(squared_distance(index.features.row(r), query));
        all[r].id = index.ids[r];
    }
    auto closer = [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.id < b.id;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                      closer);
    all.resize(k);
    return all;
}

void index_save(const KnnIndex& index, const std::string& path) {
    if (index.size() == 0) throw ValidationError("index_save: empty index");
    auto out = io::open_out(path, "index_save");
    out.write(kMagic, 8);
    io::write_u32(out, kVersion);
    io::write_u32(out, kMetricL2);
    io::write_u64(out, index.size());
    io::write_u64(out, index.dim());
    io::write_string(out, index.config_echo);
    io::write_f64_block(out, index.features.data(), index.features.size());
    for (const auto& id : index.ids) io::write_string(out, id);
    if (!out) throw IoError("index_save: write failed for " + path);
}

KnnIndex index_load(const std::string& path) {
    auto in = io::open_in(path, "index_load");
    io::Reader r(in, "index");
    r.expect_magic(kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion) throw IoError("index: unsupported version " + std::to_string(version));
    const std::uint32_t metric = r.u32();
    if (metric != kMetricL2) throw IoError("index: unknown metric tag " + std::to_string(metric));
    const std::uint64_t m = r.u64();
    const std::uint64_t d = r.u64();
    if (m == 0 || d == 0) throw IoError("index: empty header dims");

    const std::string config_echo = r.string();
    std::vector<double> buf(m * d);
    for (double& v : buf) v = r.f64();
    std::vector<std::string> ids;
    ids.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) ids.push_back(r.string());
    r.expect_eof();
    KnnIndex index = index_build(Matrix(m, d, std::move(buf)), std::move(ids));
    index.config_echo = config_echo;
    return index;
}

}  // namespace craft
