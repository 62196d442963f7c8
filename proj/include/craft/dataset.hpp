#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "craft/matrix.hpp"

namespace craft {

/// N co-occurring (source, target) feature pairs plus the identifiers of the
/// target items. Immutable after construction by convention.
struct PairDataset {
    Matrix sources;                     // N x d_s
    Matrix targets;                     // N x d_t
    std::vector<std::string> item_ids;  // N target-item identifiers
    std::string name;
    std::uint64_t creation_seed = 0;
    std::string config_echo;  // JSON of the generating run, may be empty

    std::size_t n() const { return sources.rows(); }
    std::size_t d_s() const { return sources.cols(); }
    std::size_t d_t() const { return targets.cols(); }

    /// N >= 1, consistent row counts, finite entries.
    void validate() const;
};

/// Versioned binary container; round-trips bitwise.
void dataset_save(const PairDataset& ds, const std::string& path);
PairDataset dataset_load(const std::string& path);

/// One pair per row: id, s..., t... An optional header row is skipped.
PairDataset dataset_from_csv(const std::string& path, std::size_t d_s, std::size_t d_t);

}  // namespace craft
