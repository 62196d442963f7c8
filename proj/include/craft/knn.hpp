#pragma once

#include <span>
#include <string>
#include <vector>

#include "craft/matrix.hpp"

namespace craft {

/// Pre-indexed target features with an item-identifier reverse lookup.
/// Exact brute-force L2 scan; immutable after build.
struct KnnIndex {
    Matrix features;              // M x d_t
    std::vector<std::string> ids; // M, unique
    std::string config_echo;      // JSON of the building run, may be empty

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
};

/// Builds a queryable index over exactly the given rows. Duplicate ids are
/// rejected.
KnnIndex index_build(Matrix targets, std::vector<std::string> ids);

struct Neighbor {
    std::string id;
    double distance = 0.0;
    std::size_t row = 0;  // row in the index, for feature lookback
};

/// The exact k nearest rows by L2 distance, ascending; ties broken by
/// ascending id. Requires k <= index size.
std::vector<Neighbor> knn_query(const KnnIndex& index, std::span<const double> query,
                                std::size_t k);

void index_save(const KnnIndex& index, const std::string& path);
KnnIndex index_load(const std::string& path);

}  // namespace craft
