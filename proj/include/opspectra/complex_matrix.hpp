#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "opspectra/errors.hpp"

namespace opspectra {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major, double precision.
/// Indices are 0-based in code; the operator-theory layer documents its
/// coordinates 1-based and converts at the boundary.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw DimensionMismatch("ComplexMatrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<double>& d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<cplx>& d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cplx* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const cplx* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

    bool operator==(const ComplexMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                r(j, i) = (*this)(i, j);
        return r;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }

    ComplexMatrix& operator*=(cplx s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionMismatch("matrix product: inner dimensions differ");
        ComplexMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            cplx* ci = c.row_ptr(i);
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx(0.0, 0.0)) continue;
                const cplx* bk = b.row_ptr(k);
                for (std::size_t j = 0; j < b.cols_; ++j) ci[j] += aik * bk[j];
            }
        }
        return c;
    }

    /// A^H * A without forming the adjoint; result is Hermitian by symmetrization.
    ComplexMatrix gram() const {
        ComplexMatrix g(cols_, cols_);
        for (std::size_t k = 0; k < rows_; ++k) {
            const cplx* rk = row_ptr(k);
            for (std::size_t i = 0; i < cols_; ++i) {
                const cplx v = std::conj(rk[i]);
                if (v == cplx(0.0, 0.0)) continue;
                cplx* gi = g.row_ptr(i);
                for (std::size_t j = 0; j < cols_; ++j) gi[j] += v * rk[j];
            }
        }
        return g;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (const auto& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    /// max |a_ij - conj(a_ji)| over the square part.
    double hermitian_defect() const {
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_ && j < rows_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    bool is_hermitian(double tol_abs) const {
        return square() && hermitian_defect() <= tol_abs;
    }

    ComplexMatrix& symmetrize() {
        for (std::size_t i = 0; i < rows_; ++i) {
            (*this)(i, i) = cplx((*this)(i, i).real(), 0.0);
            for (std::size_t j = i + 1; j < cols_; ++j) {
                cplx avg = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
                (*this)(i, j) = avg;
                (*this)(j, i) = std::conj(avg);
            }
        }
        return *this;
    }

    ComplexMatrix submatrix(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw DimensionMismatch("submatrix out of range");
        ComplexMatrix r(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j)
                r(i, j) = (*this)(r0 + i, c0 + j);
        return r;
    }

    ComplexMatrix top_left(std::size_t n) const { return submatrix(0, 0, n, n); }

    /// Columns indexed by `idx`, in order.
    ComplexMatrix select_columns(const std::vector<std::size_t>& idx) const {
        ComplexMatrix r(rows_, idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
            for (std::size_t i = 0; i < rows_; ++i)
                r(i, j) = (*this)(i, idx[j]);
        return r;
    }

    /// Principal submatrix on the given (row and column) indices.
    ComplexMatrix principal(const std::vector<std::size_t>& idx) const {
        ComplexMatrix r(idx.size(), idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                r(i, j) = (*this)(idx[i], idx[j]);
        return r;
    }

    std::vector<cplx> column(std::size_t j) const {
        std::vector<cplx> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, const std::vector<cplx>& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    /// Hermitian hint set by kernels that produce Hermitian output by
    /// construction. Informational; consumers re-verify where it matters.
    bool hermitian_hint = false;

private:
    void require_same_shape(const ComplexMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionMismatch("matrix shapes differ");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

/// y = A x
inline std::vector<cplx> matvec(const ComplexMatrix& a, const std::vector<cplx>& x) {
    if (a.cols() != x.size()) throw DimensionMismatch("apply: size mismatch");
    std::vector<cplx> y(a.rows(), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const cplx* ri = a.row_ptr(i);
        cplx s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += ri[j] * x[j];
        y[i] = s;
    }
    return y;
}

inline cplx inner(const std::vector<cplx>& x, const std::vector<cplx>& y) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

inline double vec_norm(const std::vector<cplx>& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
}

} // namespace opspectra
