#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace adjg {

/// Dense row-major matrix sized for the small systems this library works with
/// (correlation matrices, step Jacobians). Not a general linear-algebra type.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return data_[static_cast<std::size_t>(i) * cols_ + j];
    }

    std::span<double> row(int i) { return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)}; }
    std::span<const double> row(int i) const { return {data_.data() + static_cast<std::size_t>(i) * cols_, static_cast<std::size_t>(cols_)}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
    assert(static_cast<std::size_t>(a.cols()) == x.size());
    std::vector<double> y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

// y = A^T x without forming the transpose.
inline std::vector<double> matvec_transposed(const Matrix& a, std::span<const double> x) {
    assert(static_cast<std::size_t>(a.rows()) == x.size());
    std::vector<double> y(a.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
    return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

// Inner product over the lower triangle (diagonal included). This is the
// convention used for correlation sensitivities, where a strict-lower entry
// stands for the symmetric pair moving together.
inline double lower_inner(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows() && a.cols() == b.cols());
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j <= i; ++j) s += a(i, j) * b(i, j);
    return s;
}

}  // namespace adjg
