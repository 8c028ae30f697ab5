#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "opspectra/complex_matrix.hpp"

namespace opspectra {

/// A planar region of spectrum: the circle C(0, r), the closed disk of
/// radius r, or the annulus r1 <= |z| <= r2. Regions are assumed disjoint
/// by construction.
struct SpectrumRegion {
    enum class Kind { Circle, Disk, Annulus };
    Kind kind = Kind::Circle;
    double r1 = 0.0;  // circle/disk radius, or inner annulus radius
    double r2 = 0.0;  // outer annulus radius

    static SpectrumRegion circle(double r) { return {Kind::Circle, r, r}; }
    static SpectrumRegion disk(double r) { return {Kind::Disk, r, r}; }
    static SpectrumRegion annulus(double inner, double outer) {
        return {Kind::Annulus, inner, outer};
    }

    /// Area divided by pi, computed without a pi round-trip so that the
    /// dyadic cases stay exact.
    double area_over_pi() const {
        switch (kind) {
            case Kind::Circle: return 0.0;
            case Kind::Disk: return r1 * r1;
            case Kind::Annulus: return r2 * r2 - r1 * r1;
        }
        return 0.0;
    }

    bool operator==(const SpectrumRegion&) const = default;
};

struct SpectrumPoint {
    cplx value;
    std::int64_t multiplicity = 1;
    bool operator==(const SpectrumPoint&) const = default;
};

/// Declared description of a spectrum subset of the complex plane:
/// countable discrete points plus region primitives.
struct SpectrumDescription {
    std::vector<SpectrumPoint> discrete_points;
    std::vector<SpectrumRegion> regions;

    double area_over_pi() const {
        double s = 0.0;
        for (const auto& r : regions) s += r.area_over_pi();
        return s;  // points are null sets
    }

    double area() const { return area_over_pi() * 3.14159265358979323846; }

    bool operator==(const SpectrumDescription&) const = default;
};

/// Declared complex-spectrum metadata of an operator, used by the symbolic
/// Weyl-spectrum comparisons. None of these sets are ever inferred from
/// truncations.
struct DeclaredSpectrum {
    SpectrumDescription sigma;      // sigma(T)
    SpectrumDescription sigma_ess;  // essential spectrum of T
    SpectrumDescription weyl;       // Weyl spectrum of T
    std::vector<SpectrumPoint> pi00;  // isolated finite-multiplicity eigenvalues

    bool operator==(const DeclaredSpectrum&) const = default;
};

} // namespace opspectra
