#pragma once

#include <random>

#include "opspectra/complex_matrix.hpp"
#include "opspectra/svd.hpp"

namespace opspectra::testing {

inline ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    return a;
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    ComplexMatrix a = random_matrix(n, rng);
    ComplexMatrix h = a + a.adjoint();
    h.symmetrize();
    return h;
}

/// Random unitary by modified Gram-Schmidt on a Gaussian matrix.
inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    ComplexMatrix a = random_matrix(n, rng);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            cplx p = 0.0;
            for (std::size_t i = 0; i < n; ++i) p += std::conj(a(i, k)) * a(i, j);
            for (std::size_t i = 0; i < n; ++i) a(i, j) -= p * a(i, k);
        }
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm += std::norm(a(i, j));
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) a(i, j) /= nrm;
    }
    return a;
}

/// n x n truncation of the unilateral shift: ones on the subdiagonal.
inline ComplexMatrix truncated_shift(std::size_t n) {
    ComplexMatrix s(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) s(i + 1, i) = 1.0;
    return s;
}

inline double rel_defect(const ComplexMatrix& a, const ComplexMatrix& b) {
    double scale = std::max(operator_norm(b), 1e-300);
    return operator_norm(a - b) / scale;
}

} // namespace opspectra::testing
