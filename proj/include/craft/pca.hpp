#pragma once

#include <span>
#include <vector>

#include "craft/matrix.hpp"

namespace craft {

/// Affine projection onto the top-k principal directions. Components are
/// orthonormal rows; explained variance is non-increasing. With `whiten`
/// set, transformed coordinates are additionally scaled to unit variance.
struct PcaProjection {
    std::vector<double> mean;                // d
    Matrix components;                       // k x d
    std::vector<double> explained_variance;  // k, descending
    bool whiten = false;

    std::size_t input_dim() const { return mean.size(); }
    std::size_t reduced_dim() const { return components.rows(); }
    void validate() const;
};

/// Top-k principal directions of the mean-centered data, by eigendecomposition
/// of the sample covariance. Requires 1 <= k <= min(N, d) and N >= 2.
PcaProjection pca_fit(const Matrix& features, std::size_t k, bool whiten = false);

std::vector<double> pca_transform(const PcaProjection& proj, std::span<const double> x);
Matrix pca_transform(const PcaProjection& proj, const Matrix& x);
std::vector<double> pca_inverse(const PcaProjection& proj, std::span<const double> y);
Matrix pca_inverse(const PcaProjection& proj, const Matrix& y);

}  // namespace craft
