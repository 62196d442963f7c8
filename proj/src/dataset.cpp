#include "craft/dataset.hpp"

#include <fstream>
#include <sstream>

#include "craft/error.hpp"
#include "io_util.hpp"

namespace craft {

namespace {
constexpr char kMagic[9] = "CRAFTDS1";
constexpr std::uint32_t kVersion = 1;
}  // namespace

void PairDataset::validate() const {
    if (n() == 0) throw ValidationError("PairDataset: N must be >= 1");
    if (targets.rows() != n() || item_ids.size() != n())
        throw ValidationError("PairDataset: sources/targets/item_ids row counts disagree");
    sources.require_finite("PairDataset.sources");
    targets.require_finite("PairDataset.targets");
}

void dataset_save(const PairDataset& ds, const std::string& path) {
    ds.validate();
    auto out = io::open_out(path, "dataset_save");
    out.write(kMagic, 8);
    io::write_u32(out, kVersion);
    io::write_u64(out, ds.n());
    io::write_u64(out, ds.d_s());
    io::write_u64(out, ds.d_t());
    io::write_string(out, ds.name);
    io::write_u64(out, ds.creation_seed);
    io::write_string(out, ds.config_echo);
    io::write_f64_block(out, ds.sources.data(), ds.sources.size());
    io::write_f64_block(out, ds.targets.data(), ds.targets.size());
    for (const auto& id : ds.item_ids) io::write_string(out, id);
    if (!out) throw IoError("dataset_save: write failed for " + path);
}

PairDataset dataset_load(const std::string& path) {
    auto in = io::open_in(path, "dataset_load");
    io::Reader r(in, "dataset");
    r.expect_magic(kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw IoError("dataset: unsupported version " + std::to_string(version));
    const std::uint64_t n = r.u64();
    const std::uint64_t d_s = r.u64();
    const std::uint64_t d_t = r.u64();
    if (n == 0) throw IoError("dataset: header declares N = 0");
    if (d_s == 0 || d_t == 0) throw IoError("dataset: header declares zero feature dimension");

    PairDataset ds;
    ds.name = r.string();
    ds.creation_seed = r.u64();
    ds.config_echo = r.string();
    {
        std::vector<double> buf(n * d_s);
        for (double& v : buf) v = r.f64();
        ds.sources = Matrix(n, d_s, std::move(buf));
    }
    {
        std::vector<double> buf(n * d_t);
        for (double& v : buf) v = r.f64();
        ds.targets = Matrix(n, d_t, std::move(buf));
    }
    ds.item_ids.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) ds.item_ids.push_back(r.string());
    r.expect_eof();
    ds.validate();
    return ds;
}

namespace {

bool parse_double(const std::string& field, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(field, &pos);
        while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
        return pos == field.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) fields.push_back(cur);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

PairDataset dataset_from_csv(const std::string& path, std::size_t d_s, std::size_t d_t) {
    if (d_s == 0 || d_t == 0) throw ValidationError("dataset_from_csv: dims must be >= 1");
    std::ifstream in(path);
    if (!in) throw IoError("dataset_from_csv: cannot open " + path);

    std::vector<double> src, tgt;
    std::vector<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 1 + d_s + d_t) {
            // a header row is allowed only at the top
            double probe;
            if (line_no == 1 && (fields.size() < 2 || !parse_double(fields[1], probe))) continue;
            throw IoError("dataset_from_csv: line " + std::to_string(line_no) + " has " +
                          std::to_string(fields.size()) + " fields, want " +
                          std::to_string(1 + d_s + d_t));
        }
        double probe;
        if (line_no == 1 && !parse_double(fields[1], probe)) continue;  // header
        ids.push_back(fields[0]);
        for (std::size_t i = 0; i < d_s + d_t; ++i) {
            double v;
            if (!parse_double(fields[1 + i], v))
                throw IoError("dataset_from_csv: line " + std::to_string(line_no) +
                              ": bad number '" + fields[1 + i] + "'");
            (i < d_s ? src : tgt).push_back(v);
        }
    }
    if (ids.empty()) throw IoError("dataset_from_csv: no data rows in " + path);

    PairDataset ds;
    ds.sources = Matrix(ids.size(), d_s, std::move(src));
    ds.targets = Matrix(ids.size(), d_t, std::move(tgt));
    ds.item_ids = std::move(ids);
    ds.name = path;
    ds.validate();
    return ds;
}

}  // namespace craft
