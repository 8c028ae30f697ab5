#pragma once

#include <cmath>
#include <cstdint>

#include "opspectra/complex_matrix.hpp"

namespace opspectra {

/// Splittable deterministic PRNG (splitmix64 core). Children derived via
/// split() are statistically independent streams, so one config seed fans
/// out to any number of reproducible sub-generators.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    SplitRng split(std::uint64_t label) {
        std::uint64_t mix = next() ^ (label * 0xd6e8feb86659fd93ull + 0xa5a5a5a5a5a5a5a5ull);
        return SplitRng(mix);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive bounds
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    cplx complex_gaussian() { return cplx(gaussian(), gaussian()); }

    /// Haar-ish random unitary: modified Gram-Schmidt on a Gaussian matrix
    /// with positive-real diagonal phases, which makes the result unique.
    ComplexMatrix unitary(std::size_t n) {
        ComplexMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) = complex_gaussian();
        for (std::size_t j = 0; j < n; ++j) {
            for (int pass = 0; pass < 2; ++pass)
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

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace opspectra
