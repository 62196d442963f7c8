#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "craft/dataset.hpp"
#include "craft/knn.hpp"
#include "craft/model.hpp"
#include "craft/pca.hpp"
#include "craft/synthetic.hpp"

namespace craft {

// ------------------------------------------------------------ baselines ----

/// n distinct ids drawn uniformly from the catalog.
std::vector<std::string> baseline_random(const KnnIndex& index, std::size_t n, Rng& rng);

/// Ids of the targets paired with the n nearest sources to the query,
/// ordered by source distance; duplicate target ids collapsed (nearest wins).
std::vector<std::string> baseline_nn_source(const PairDataset& data,
                                            std::span<const double> query_s, std::size_t n);

struct ScoredId {
    std::string id;
    double score = 0.0;
};

/// The n catalog items the discriminator scores lowest for this query,
/// ascending by score.
std::vector<ScoredId> baseline_incompatible(const DiscriminatorParams& theta,
                                            std::span<const double> query_s,
                                            const KnnIndex& index, std::size_t n);

// -------------------------------------------------------------- density ----

enum class DensityLabel { low, medium, high };
const char* to_string(DensityLabel label);

struct DensityBin {
    double mean_knn_distance = 0.0;  // larger = lower density
    DensityLabel label = DensityLabel::medium;
};

/// Mean distance to the K nearest dataset sources per query, split into
/// density terciles (smallest distances = high density). Requires K < N.
std::vector<DensityBin> density_bins(const Matrix& dataset_sources, const Matrix& queries,
                                     std::size_t k = 25);

// ------------------------------------------------------- oracle metrics ----

/// Mean over random oracle queries of
///   ||mean of n_samples synthesized targets - oracle conditional mean|| /
///   oracle conditional std.
double conditional_mean_error(const TransformerParams& phi, const SyntheticSpec& spec,
                              std::size_t n_queries, std::size_t n_samples, Rng& rng);

// ------------------------------------------------------------ score map ----

struct ScoreMapRow {
    std::string id;
    double x = 0.0;
    double y = 0.0;
    double score = 0.0;
};

/// Per-catalog-item discriminator score for the query plus 2-D coordinates
/// from the given projection, for external plotting.
std::vector<ScoreMapRow> score_map(const DiscriminatorParams& theta,
                                   std::span<const double> query_s, const KnnIndex& catalog,
                                   const PcaProjection& projection_2d);

// ----------------------------------------------------------- the report ----

struct EvalCell {
    std::string algorithm;
    std::string bin;
    double mean_oracle_error = 0.0;  // NaN when no oracle spec was given
    double mean_d_score = 0.0;
    std::size_t n_queries = 0;
};

struct EvalReport {
    std::vector<EvalCell> cells;  // 4 algorithms x 3 bins
    std::string config_echo;      // resolved configuration as JSON
    std::uint64_t seed = 0;
};

struct EvalOptions {
    std::size_t n_queries = 120;
    std::size_t density_k = 25;
    std::size_t n_recommend = 8;   // items scored per query per algorithm
    std::size_t n_samples = 17;    // noise draws for the craft algorithm
    std::uint64_t seed = 0;
};

/// Per-algorithm (craft, random, nn-source, incompatible), per-density-bin
/// table. Queries are drawn from the oracle spec when given; otherwise they
/// are resampled rows of the dataset and oracle columns are NaN.
EvalReport evaluate(const TransformerParams& phi, const DiscriminatorParams& theta,
                    const PairDataset& data, const std::optional<SyntheticSpec>& spec,
                    const EvalOptions& options);

std::string report_to_json(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);

}  // namespace craft
