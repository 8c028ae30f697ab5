#pragma once

#include <stdexcept>

namespace opspectra {

/// Tolerances shared across kernels, predicates and decompositions.
/// All relative tolerances are multiplied by a problem-dependent scale
/// (an operator norm or a power of it) at the point of use.
struct ToleranceConfig {
    double eq_tol = 1e-10;            // equality of operators, relative
    double psd_tol = 1e-10;           // positive semidefiniteness slack, relative
    double rank_tol = 1e-10;          // numerical rank cutoff on singular values
    double cluster_gap = 1e-6;        // eigenvalue clustering gap
    int interior_margin_factor = 2;   // interior compression margin, x bandwidth

    void validate() const {
        if (eq_tol <= 0 || psd_tol <= 0 || rank_tol <= 0 || cluster_gap <= 0)
            throw std::invalid_argument("ToleranceConfig: tolerances must be strictly positive");
        if (interior_margin_factor < 1)
            throw std::invalid_argument("ToleranceConfig: interior_margin_factor must be >= 1");
    }
};

} // namespace opspectra
