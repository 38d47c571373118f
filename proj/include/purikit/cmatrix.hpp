#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "purikit/errors.hpp"

namespace purikit {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. The universal carrier for states, Choi
// operators, POVM elements, process matrices and (as single-column
// matrices) pure-state vectors.
class CMatrix {
  public:
    CMatrix() = default;

    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static CMatrix column(std::vector<cplx> entries) {
        CMatrix m;
        m.rows_ = entries.size();
        m.cols_ = 1;
        m.data_ = std::move(entries);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool is_square() const { return rows_ == cols_; }
    bool is_column() const { return cols_ == 1; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    const std::vector<cplx>& data() const { return data_; }
    std::vector<cplx>& data() { return data_; }

    CMatrix& operator+=(const CMatrix& o) {
        check_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    CMatrix& operator-=(const CMatrix& o) {
        check_same_shape(o, "operator-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    CMatrix& operator*=(cplx s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_)
            throw ArgumentError("matrix product: inner dimensions " + std::to_string(a.cols_) +
                                " vs " + std::to_string(b.rows_));
        CMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    CMatrix transpose() const {
        CMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    CMatrix conjugate() const {
        CMatrix c = *this;
        for (auto& v : c.data_) v = std::conj(v);
        return c;
    }

    CMatrix dagger() const { return transpose().conjugate(); }

    cplx trace() const {
        if (!is_square()) throw ArgumentError("trace of non-square matrix");
        cplx t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    // entrywise max-abs norm
    double norm_inf() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double norm_fro() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

    // max|M - M†|, finite only for square matrices
    double hermiticity_deviation() const {
        if (!is_square()) throw ArgumentError("hermiticity check on non-square matrix");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    bool is_hermitian(double tol = 1e-12) const {
        return hermiticity_deviation() <= tol * std::max(1.0, norm_inf());
    }

    // averages away the antihermitian rounding noise of a nominally
    // Hermitian result
    CMatrix hermitized() const {
        CMatrix h(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                h(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        return h;
    }

    friend double max_abs_diff(const CMatrix& a, const CMatrix& b) {
        a.check_same_shape(b, "max_abs_diff");
        double m = 0.0;
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            m = std::max(m, std::abs(a.data_[i] - b.data_[i]));
        return m;
    }

  private:
    void check_same_shape(const CMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw ArgumentError(std::string(op) + ": shape mismatch " + std::to_string(rows_) +
                                "x" + std::to_string(cols_) + " vs " + std::to_string(o.rows_) +
                                "x" + std::to_string(o.cols_));
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline cplx inner(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || !a.is_column() || !b.is_column())
        throw ArgumentError("inner: expects two column vectors of equal length");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// Hilbert-Schmidt inner product Tr[a† b]
inline cplx hs_inner(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ArgumentError("hs_inner: shape mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline CMatrix outer(const CMatrix& a, const CMatrix& b) {
    if (!a.is_column() || !b.is_column()) throw ArgumentError("outer: expects column vectors");
    CMatrix m(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

}  // namespace purikit
