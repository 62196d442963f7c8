#include "craft/recommend.hpp"

#include <algorithm>
#include <unordered_map>

#include "craft/error.hpp"

namespace craft {

std::vector<Neighbor> recommend(const TransformerParams& phi, const KnnIndex& index,
                                std::span<const double> source, std::size_t n_samples,
                                std::size_t k_per_sample, Rng& rng) {
    if (n_samples == 0 || k_per_sample == 0)
        throw ValidationError("recommend: n_samples and k_per_sample must be >= 1");
    if (index.dim() != phi.d_t)
        throw DimensionError("recommend: index dim " + std::to_string(index.dim()) +
                             " != transformer output dim " + std::to_string(phi.d_t));
    const std::size_t k = std::min(k_per_sample, index.size());

    Matrix noise = sample_unit_sphere_rows(rng, n_samples, phi.d_z);
    Matrix sources = tile_row(source, n_samples);
    Matrix t_hat = transform_batch(phi, sources, noise);

    std::unordered_map<std::string, Neighbor> best;
    for (std::size_t i = 0; i < n_samples; ++i) {
        for (const auto& hit : knn_query(index, t_hat.row(i), k)) {
            auto it = best.find(hit.id);
            if (it == best.end() || hit.distance < it->second.distance)
                best[hit.id] = hit;
        }
    }

    std::vector<Neighbor> merged;
    merged.reserve(best.size());
    for (auto& [id, nb] : best) merged.push_back(std::move(nb));
    std::sort(merged.begin(), merged.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.id < b.id;
    });
    return merged;
}

}  // namespace craft
