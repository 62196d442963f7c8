#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace craft {

/// Dense row-major matrix of doubles. The workhorse container for feature
/// batches (one sample per row) and layer weights.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);  // zero-filled
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    const std::vector<double>& values() const { return data_; }

    bool all_finite() const;
    /// Throws ValidationError naming `what` if any entry is non-finite.
    void require_finite(const std::string& what) const;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// a (m x k) times b (k x n).
Matrix matmul(const Matrix& a, const Matrix& b);
/// a (m x k) times b^T where b is (n x k).
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// a^T (k x m -> m x k transposed) times b (k x n): result (m.cols x b.cols).
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

/// Stack two matrices vertically; column counts must agree.
Matrix vstack(const Matrix& top, const Matrix& bottom);
/// Concatenate two matrices side by side; row counts must agree.
Matrix hstack(const Matrix& left, const Matrix& right);
/// Rows [begin, end) as a new matrix.
Matrix slice_rows(const Matrix& a, std::size_t begin, std::size_t end);
/// Columns [begin, end) as a new matrix.
Matrix slice_cols(const Matrix& a, std::size_t begin, std::size_t end);
/// One row repeated n times.
Matrix tile_row(std::span<const double> row, std::size_t n);

double squared_distance(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace craft
