#include "craft/matrix.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>

#include "craft/error.hpp"

namespace craft {

namespace {

using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutMap = Eigen::Map<EigenRowMajor>;

ConstMap map_of(const Matrix& m) {
    return ConstMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                    static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                             " does not equal rows*cols = " + std::to_string(rows_ * cols_));
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols_) throw DimensionError("Matrix::from_rows: ragged rows");
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void Matrix::require_finite(const std::string& what) const {
    if (!all_finite()) throw ValidationError(what + ": non-finite entry");
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("matmul: " + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()));
    Matrix out(a.rows(), b.cols());
    MutMap(out.data(), a.rows(), b.cols()).noalias() = map_of(a) * map_of(b);
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw DimensionError("matmul_nt: " + std::to_string(a.cols()) + " vs " +
                             std::to_string(b.cols()));
    Matrix out(a.rows(), b.rows());
    MutMap(out.data(), a.rows(), b.rows()).noalias() = map_of(a) * map_of(b).transpose();
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw DimensionError("matmul_tn: " + std::to_string(a.rows()) + " vs " +
                             std::to_string(b.rows()));
    Matrix out(a.cols(), b.cols());
    MutMap(out.data(), a.cols(), b.cols()).noalias() = map_of(a).transpose() * map_of(b);
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
    return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.cols() != bottom.cols()) throw DimensionError("vstack: column mismatch");
    Matrix out(top.rows() + bottom.rows(), top.cols());
    std::memcpy(out.data(), top.data(), top.size() * sizeof(double));
    std::memcpy(out.data() + top.size(), bottom.data(), bottom.size() * sizeof(double));
    return out;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
    if (left.rows() != right.rows()) throw DimensionError("hstack: row mismatch");
    Matrix out(left.rows(), left.cols() + right.cols());
    for (std::size_t r = 0; r < left.rows(); ++r) {
        std::memcpy(out.data() + r * out.cols(), left.data() + r * left.cols(),
                    left.cols() * sizeof(double));
        std::memcpy(out.data() + r * out.cols() + left.cols(), right.data() + r * right.cols(),
                    right.cols() * sizeof(double));
    }
    return out;
}

Matrix slice_rows(const Matrix& a, std::size_t begin, std::size_t end) {
    if (begin > end || end > a.rows()) throw DimensionError("slice_rows: bad range");
    Matrix out(end - begin, a.cols());
    std::memcpy(out.data(), a.data() + begin * a.cols(), out.size() * sizeof(double));
    return out;
}

Matrix slice_cols(const Matrix& a, std::size_t begin, std::size_t end) {
    if (begin > end || end > a.cols()) throw DimensionError("slice_cols: bad range");
    Matrix out(a.rows(), end - begin);
    for (std::size_t r = 0; r < a.rows(); ++r)
        std::memcpy(out.data() + r * out.cols(), a.data() + r * a.cols() + begin,
                    out.cols() * sizeof(double));
    return out;
}

Matrix tile_row(std::span<const double> row, std::size_t n) {
    Matrix out(n, row.size());
    for (std::size_t r = 0; r < n; ++r)
        std::memcpy(out.data() + r * row.size(), row.data(), row.size() * sizeof(double));
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("squared_distance: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

double norm2(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += v * v;
    return std::sqrt(acc);
}

}  // namespace craft
