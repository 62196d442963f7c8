#include "craft/pca.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "craft/error.hpp"

namespace craft {

void PcaProjection::validate() const {
    const std::size_t k = reduced_dim();
    if (k == 0 || input_dim() == 0) throw ValidationError("PcaProjection: empty");
    if (components.cols() != input_dim())
        throw ValidationError("PcaProjection: component width != mean length");
    if (explained_variance.size() != k)
        throw ValidationError("PcaProjection: explained_variance length != k");
    for (std::size_t i = 0; i + 1 < k; ++i)
        if (explained_variance[i] + 1e-12 < explained_variance[i + 1])
            throw ValidationError("PcaProjection: explained_variance not non-increasing");
    for (double v : explained_variance)
        if (v < -1e-12) throw ValidationError("PcaProjection: negative explained variance");
    // orthonormal rows
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            double dot = 0.0;
            for (std::size_t j = 0; j < input_dim(); ++j) dot += components(a, j) * components(b, j);
            const double want = (a == b) ? 1.0 : 0.0;
            if (std::abs(dot - want) > 1e-8)
                throw ValidationError("PcaProjection: components not orthonormal");
        }
}

PcaProjection pca_fit(const Matrix& features, std::size_t k, bool whiten) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    if (n < 2) throw ValidationError("pca_fit: need at least 2 samples");
    if (k < 1 || k > std::min(n, d))
        throw ValidationError("pca_fit: k must be in [1, min(N, d)], got " + std::to_string(k));
    features.require_finite("pca_fit input");

    PcaProjection proj;
    proj.whiten = whiten;
    proj.mean.assign(d, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) proj.mean[c] += features(r, c);
    for (double& m : proj.mean) m /= static_cast<double>(n);

    // Sample covariance (1/(N-1)) of the centered data.
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    {
        Eigen::MatrixXd centered(n, d);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c) centered(r, c) = features(r, c) - proj.mean[c];
        cov = centered.transpose() * centered / static_cast<double>(n - 1);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw NumericError("pca_fit: eigensolver failed");

    // Eigen returns ascending eigenvalues; take the top k in descending order.
    proj.components = Matrix(k, d);
    proj.explained_variance.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const auto col = static_cast<Eigen::Index>(d - 1 - i);
        proj.explained_variance[i] = std::max(0.0, solver.eigenvalues()(col));
        // deterministic sign: largest-|entry| coordinate is positive
        Eigen::Index arg = 0;
        solver.eigenvectors().col(col).cwiseAbs().maxCoeff(&arg);
        const double sign = solver.eigenvectors()(arg, col) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j)
            proj.components(i, j) = sign * solver.eigenvectors()(static_cast<Eigen::Index>(j), col);
    }
    return proj;
}

namespace {

double whiten_scale(const PcaProjection& proj, std::size_t i) {
    // guard: a zero-variance direction cannot be whitened; leave it unscaled
    const double v = std::max(proj.explained_variance[i], 1e-12);
    return 1.0 / std::sqrt(v);
}

}  // namespace

std::vector<double> pca_transform(const PcaProjection& proj, std::span<const double> x) {
    if (x.size() != proj.input_dim()) throw DimensionError("pca_transform: dim mismatch");
    std::vector<double> y(proj.reduced_dim(), 0.0);
    for (std::size_t i = 0; i < proj.reduced_dim(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < proj.input_dim(); ++j)
            acc += proj.components(i, j) * (x[j] - proj.mean[j]);
        y[i] = proj.whiten ? acc * whiten_scale(proj, i) : acc;
    }
    return y;
}

Matrix pca_transform(const PcaProjection& proj, const Matrix& x) {
    Matrix y(x.rows(), proj.reduced_dim());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = pca_transform(proj, x.row(r));
        std::copy(row.begin(), row.end(), y.data() + r * y.cols());
    }
    return y;
}

std::vector<double> pca_inverse(const PcaProjection& proj, std::span<const double> y) {
    if (y.size() != proj.reduced_dim()) throw DimensionError("pca_inverse: dim mismatch");
    std::vector<double> x(proj.mean);
    for (std::size_t i = 0; i < proj.reduced_dim(); ++i) {
        const double coeff = proj.whiten ? y[i] / whiten_scale(proj, i) : y[i];
        for (std::size_t j = 0; j < proj.input_dim(); ++j) x[j] += coeff * proj.components(i, j);
    }
    return x;
}

Matrix pca_inverse(const PcaProjection& proj, const Matrix& y) {
    Matrix x(y.rows(), proj.input_dim());
    for (std::size_t r = 0; r < y.rows(); ++r) {
        auto row = pca_inverse(proj, y.row(r));
        std::copy(row.begin(), row.end(), x.data() + r * x.cols());
    }
    return x;
}

}  // namespace craft
