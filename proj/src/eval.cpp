#include "craft/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "craft/error.hpp"
#include "craft/recommend.hpp"

namespace craft {

std::vector<std::string> baseline_random(const KnnIndex& index, std::size_t n, Rng& rng) {
    if (n == 0 || n > index.size())
        throw ValidationError("baseline_random: n must be in [1, catalog size]");
    // partial Fisher-Yates over row indices
    std::vector<std::size_t> rows(index.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
        std::swap(rows[i], rows[pick(rng)]);
        out.push_back(index.ids[rows[i]]);
    }
    return out;
}

std::vector<std::string> baseline_nn_source(const PairDataset& data,
                                            std::span<const double> query_s, std::size_t n) {
    if (query_s.size() != data.d_s())
        throw DimensionError("baseline_nn_source: query dim mismatch");
    if (n == 0 || n > data.n())
        throw ValidationError("baseline_nn_source: n must be in [1, N]");

    std::vector<std::size_t> order(data.n());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(data.n());
    for (std::size_t r = 0; r < data.n(); ++r)
        dist[r] = squared_distance(data.sources.row(r), query_s);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });

    std::vector<std::string> out;
    out.reserve(n);
    std::unordered_map<std::string, bool> seen;
    for (std::size_t r : order) {
        if (out.size() == n) break;
        const auto& id = data.item_ids[r];
        if (!seen.emplace(id, true).second) continue;
        out.push_back(id);
    }
    if (out.size() < n)
        throw ValidationError("baseline_nn_source: fewer than n distinct target ids");
    return out;
}

std::vector<ScoredId> baseline_incompatible(const DiscriminatorParams& theta,
                                            std::span<const double> query_s,
                                            const KnnIndex& index, std::size_t n) {
    if (query_s.size() != theta.d_s)
        throw DimensionError("baseline_incompatible: query dim does not match the model");
    if (index.dim() != theta.d_t)
        throw DimensionError("baseline_incompatible: catalog dim does not match the model");
    if (n == 0 || n > index.size())
        throw ValidationError("baseline_incompatible: n must be in [1, catalog size]");

    Matrix sources = tile_row(query_s, index.size());
    std::vector<double> scores = discriminate_batch(theta, sources, index.features);

    std::vector<std::size_t> order(index.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return index.ids[a] < index.ids[b];
    });

    std::vector<ScoredId> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({index.ids[order[i]], scores[order[i]]});
    return out;
}

const char* to_string(DensityLabel label) {
    switch (label) {
        case DensityLabel::low: return "low";
        case DensityLabel::medium: return "medium";
        case DensityLabel::high: return "high";
    }
    return "?";
}

std::vector<DensityBin> density_bins(const Matrix& dataset_sources, const Matrix& queries,
                                     std::size_t k) {
    const std::size_t n_data = dataset_sources.rows();
    const std::size_t n_q = queries.rows();
    if (k == 0 || k >= n_data)
        throw ValidationError("density_bins: K must satisfy 1 <= K < N");
    if (queries.cols() != dataset_sources.cols())
        throw DimensionError("density_bins: query dim mismatch");
    if (n_q < 3) throw ValidationError("density_bins: need at least 3 queries for terciles");

    std::vector<DensityBin> bins(n_q);
    std::vector<double> dist(n_data);
    for (std::size_t q = 0; q < n_q; ++q) {
        for (std::size_t r = 0; r < n_data; ++r)
            dist[r] = squared_distance(dataset_sources.row(r), queries.row(q));
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k),
                          dist.end());
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += std::sqrt(dist[i]);
        bins[q].mean_knn_distance = acc / static_cast<double>(k);
    }

    // terciles by rank: smallest mean distance = high density
    std::vector<std::size_t> order(n_q);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (bins[a].mean_knn_distance != bins[b].mean_knn_distance)
            return bins[a].mean_knn_distance < bins[b].mean_knn_distance;
        return a < b;
    });
    const std::size_t cut1 = n_q / 3;
    const std::size_t cut2 = 2 * n_q / 3;
    for (std::size_t rank = 0; rank < n_q; ++rank) {
        DensityLabel label = rank < cut1   ? DensityLabel::high
                             : rank < cut2 ? DensityLabel::medium
                                           : DensityLabel::low;
        bins[order[rank]].label = label;
    }
    return bins;
}

double conditional_mean_error(const TransformerParams& phi, const SyntheticSpec& spec,
                              std::size_t n_queries, std::size_t n_samples, Rng& rng) {
    if (n_queries == 0 || n_samples == 0)
        throw ValidationError("conditional_mean_error: counts must be >= 1");
    if (spec.d_s != phi.d_s || spec.d_t != phi.d_t)
        throw DimensionError("conditional_mean_error: spec dims do not match the model");

    double total = 0.0;
    for (std::size_t q = 0; q < n_queries; ++q) {
        const auto s = spec.sample_source(rng);
        Matrix noise = sample_unit_sphere_rows(rng, n_samples, phi.d_z);
        Matrix t_hat = transform_batch(phi, tile_row(s, n_samples), noise);
        std::vector<double> mean(phi.d_t, 0.0);
        for (std::size_t r = 0; r < t_hat.rows(); ++r)
            for (std::size_t c = 0; c < t_hat.cols(); ++c)
                mean[c] += t_hat(r, c) / static_cast<double>(n_samples);
        const auto oracle_mean = spec.conditional_mean(s);
        double err2 = 0.0;
        for (std::size_t c = 0; c < phi.d_t; ++c) {
            const double d = mean[c] - oracle_mean[c];
            err2 += d * d;
        }
        total += std::sqrt(err2) / spec.conditional_std(s);
    }
    return total / static_cast<double>(n_queries);
}

std::vector<ScoreMapRow> score_map(const DiscriminatorParams& theta,
                                   std::span<const double> query_s, const KnnIndex& catalog,
                                   const PcaProjection& projection_2d) {
    if (projection_2d.reduced_dim() != 2)
        throw DimensionError("score_map: projection must be 2-D");
    if (projection_2d.input_dim() != catalog.dim())
        throw DimensionError("score_map: projection does not match catalog dim");

    Matrix sources = tile_row(query_s, catalog.size());
    std::vector<double> scores = discriminate_batch(theta, sources, catalog.features);

    std::vector<ScoreMapRow> rows(catalog.size());
    for (std::size_t r = 0; r < catalog.size(); ++r) {
        const auto xy = pca_transform(projection_2d, catalog.features.row(r));
        rows[r] = {catalog.ids[r], xy[0], xy[1], scores[r]};
    }
    return rows;
}

// ----------------------------------------------------------- the report ----

namespace {

struct QueryScores {
    double oracle_error = std::numeric_limits<double>::quiet_NaN();
    double d_score = 0.0;
};

QueryScores score_items(const DiscriminatorParams& theta, const KnnIndex& index,
                        const std::unordered_map<std::string, std::size_t>& row_of,
                        std::span<const double> query,
                        const std::optional<SyntheticSpec>& spec,
                        const std::vector<std::string>& ids) {
    QueryScores out;
    if (ids.empty()) return out;
    Matrix targets(ids.size(), index.dim());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = row_of.find(ids[i]);
        if (it == row_of.end()) throw StateError("evaluate: unknown item id " + ids[i]);
        auto row = index.features.row(it->second);
        std::copy(row.begin(), row.end(), targets.data() + i * targets.cols());
    }
    const auto scores = discriminate_batch(theta, tile_row(query, ids.size()), targets);
    out.d_score = std::accumulate(scores.begin(), scores.end(), 0.0) /
                  static_cast<double>(scores.size());
    if (spec) {
        const auto mean = spec->conditional_mean(query);
        const double sd = spec->conditional_std(query);
        double acc = 0.0;
        for (std::size_t i = 0; i < ids.size(); ++i)
            acc += std::sqrt(squared_distance(targets.row(i), mean)) / sd;
        out.oracle_error = acc / static_cast<double>(ids.size());
    }
    return out;
}

}  // namespace

EvalReport evaluate(const TransformerParams& phi, const DiscriminatorParams& theta,
                    const PairDataset& data, const std::optional<SyntheticSpec>& spec,
                    const EvalOptions& options) {
    if (spec && (spec->d_s != data.d_s() || spec->d_t != data.d_t()))
        throw DimensionError("evaluate: spec dims do not match the dataset");
    if (options.n_queries < 3) throw ValidationError("evaluate: need at least 3 queries");

    Rng rng(options.seed);
    KnnIndex index = index_build(data.targets, data.item_ids);
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t r = 0; r < index.size(); ++r) row_of[index.ids[r]] = r;

    // queries: oracle marginal when a spec is given, resampled rows otherwise
    Matrix queries(options.n_queries, data.d_s());
    if (spec) {
        for (std::size_t q = 0; q < options.n_queries; ++q) {
            const auto s = spec->sample_source(rng);
            std::copy(s.begin(), s.end(), queries.data() + q * queries.cols());
        }
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, data.n() - 1);
        for (std::size_t q = 0; q < options.n_queries; ++q) {
            auto row = data.sources.row(pick(rng));
            std::copy(row.begin(), row.end(), queries.data() + q * queries.cols());
        }
    }

    const auto bins = density_bins(data.sources, queries, options.density_k);

    const std::vector<std::string> algorithms = {"craft", "random", "nn-source", "incompatible"};
    struct Agg {
        double err_sum = 0.0;
        double score_sum = 0.0;
        std::size_t count = 0;
    };
    std::unordered_map<std::string, Agg> agg;  // key: algorithm|bin

    const std::size_t n_rec = std::min(options.n_recommend, index.size());
    for (std::size_t q = 0; q < options.n_queries; ++q) {
        const auto query = queries.row(q);
        const std::string bin = to_string(bins[q].label);

        std::unordered_map<std::string, std::vector<std::string>> picks;
        {
            auto hits = recommend(phi, index, query, options.n_samples, 1, rng);
            std::vector<std::string> ids;
            for (const auto& h : hits) {
                if (ids.size() == n_rec) break;
                ids.push_back(h.id);
            }
            picks["craft"] = std::move(ids);
        }
        picks["random"] = baseline_random(index, n_rec, rng);
        picks["nn-source"] = baseline_nn_source(data, query, n_rec);
        {
            std::vector<std::string> ids;
            for (auto& si : baseline_incompatible(theta, query, index, n_rec))
                ids.push_back(std::move(si.id));
            picks["incompatible"] = std::move(ids);
        }

        for (const auto& algo : algorithms) {
            const auto scored = score_items(theta, index, row_of, query, spec, picks[algo]);
            Agg& a = agg[algo + "|" + bin];
            if (spec) a.err_sum += scored.oracle_error;
            a.score_sum += scored.d_score;
            a.count += 1;
        }
    }

    EvalReport report;
    report.seed = options.seed;
    for (const auto& algo : algorithms) {
        for (const char* bin : {"high", "medium", "low"}) {
            const auto it = agg.find(algo + std::string("|") + bin);
            EvalCell cell;
            cell.algorithm = algo;
            cell.bin = bin;
            if (it != agg.end() && it->second.count > 0) {
                const double n = static_cast<double>(it->second.count);
                cell.mean_oracle_error =
                    spec ? it->second.err_sum / n : std::numeric_limits<double>::quiet_NaN();
                cell.mean_d_score = it->second.score_sum / n;
                cell.n_queries = it->second.count;
            } else {
                cell.mean_oracle_error = std::numeric_limits<double>::quiet_NaN();
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["config"] = report.config_echo.empty() ? nlohmann::json::object()
                                             : nlohmann::json::parse(report.config_echo);
    j["cells"] = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json jc;
        jc["algorithm"] = c.algorithm;
        jc["bin"] = c.bin;
        if (std::isfinite(c.mean_oracle_error))
            jc["mean_oracle_error"] = c.mean_oracle_error;
        else
            jc["mean_oracle_error"] = nullptr;
        jc["mean_d_score"] = c.mean_d_score;
        jc["n_queries"] = c.n_queries;
        j["cells"].push_back(std::move(jc));
    }
    return j.dump(2);
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "algorithm,bin,mean_oracle_error,mean_d_score,n_queries\n";
    out.precision(17);
    for (const auto& c : report.cells) {
        out << c.algorithm << ',' << c.bin << ',';
        if (std::isfinite(c.mean_oracle_error)) out << c.mean_oracle_error;
        out << ',' << c.mean_d_score << ',' << c.n_queries << '\n';
    }
    return out.str();
}

}  // namespace craft
