#pragma once

#include <span>
#include <vector>

#include "craft/knn.hpp"
#include "craft/model.hpp"

namespace craft {

/// Synthesize n_samples target features for the query source, retrieve
/// k_per_sample nearest catalog items for each, and merge: one entry per
/// item id keeping its minimum distance, ranked ascending by that distance.
std::vector<Neighbor> recommend(const TransformerParams& phi, const KnnIndex& index,
                                std::span<const double> source, std::size_t n_samples,
                                std::size_t k_per_sample, Rng& rng);

}  // namespace craft
