#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "opspectra/errors.hpp"
#include "opspectra/sequence_rule.hpp"

namespace opspectra {

/// Dimension in N union {infinity}.
class ExtDim {
public:
    static ExtDim finite(std::int64_t v) { return ExtDim(false, v); }
    static ExtDim infinite() { return ExtDim(true, 0); }

    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }
    std::int64_t value() const {
        if (infinite_) throw Error("ExtDim: infinite dimension has no finite value");
        return value_;
    }
    bool is_zero() const { return !infinite_ && value_ == 0; }

    bool operator==(const ExtDim& o) const {
        return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
    }

private:
    ExtDim(bool inf, std::int64_t v) : infinite_(inf), value_(v) {}
    bool infinite_ = false;
    std::int64_t value_ = 0;
};

/// A declared spectral point of |T| with its multiplicity.
struct PointGroup {
    double value = 0.0;
    std::int64_t multiplicity = 1;
    bool operator==(const PointGroup&) const = default;
};

/// Countably many declared points value(j), j = 1, 2, ... each with the same
/// finite multiplicity, converging monotonically to the essential point.
struct PointTail {
    SequenceRule values = SequenceRule::harmonic();
    std::int64_t multiplicity = 1;
    bool operator==(const PointTail&) const = default;
};

/// Declared (or estimated) spectral data of |T|: essential point(s), discrete
/// points above and below, kernel data. Declared facts are the symbolic truth
/// that truncations can only corroborate.
struct SpectralProfile {
    std::vector<double> essential_points;  // singleton for closure-AN membership

    std::vector<PointGroup> upper_points;  // values > alpha, strictly descending
    std::optional<PointTail> upper_tail;   // infinite family decreasing to alpha
    std::vector<PointGroup> lower_points;  // values < alpha, strictly ascending
    std::optional<PointTail> lower_tail;   // infinite family increasing to alpha

    bool alpha_in_point_spectrum = false;
    ExtDim alpha_eigenspace_dim = ExtDim::finite(0);
    ExtDim kernel_dim = ExtDim::finite(0);
    ExtDim cokernel_dim = ExtDim::finite(0);
    double min_modulus = 0.0;

    bool operator==(const SpectralProfile& o) const {
        return essential_points == o.essential_points && upper_points == o.upper_points &&
               upper_tail == o.upper_tail && lower_points == o.lower_points &&
               lower_tail == o.lower_tail &&
               alpha_in_point_spectrum == o.alpha_in_point_spectrum &&
               alpha_eigenspace_dim == o.alpha_eigenspace_dim && kernel_dim == o.kernel_dim &&
               cokernel_dim == o.cokernel_dim && min_modulus == o.min_modulus;
    }

    bool has_single_essential_point() const { return essential_points.size() == 1; }

    double essential_point() const {
        if (!has_single_essential_point())
            throw NoEssentialPoint("profile does not declare a unique essential point");
        return essential_points.front();
    }

    bool lower_finite() const { return !lower_tail.has_value(); }
    bool upper_finite() const { return !upper_tail.has_value(); }

    /// Smallest declared spectral value of |T|.
    double smallest_declared_value() const {
        double m = essential_points.empty()
                       ? std::numeric_limits<double>::infinity()
                       : essential_points.front();
        for (double e : essential_points) m = std::min(m, e);
        for (const auto& p : lower_points) m = std::min(m, p.value);
        if (lower_tail) m = std::min(m, lower_tail->values(1));
        for (const auto& p : upper_points) m = std::min(m, p.value);
        return m;
    }

    /// Structural invariants; throws on violation. Tail monotonicity is
    /// sampled on the first `tail_samples` indices.
    void validate(int tail_samples = 32) const {
        for (const auto& p : upper_points)
            if (p.multiplicity < 1) throw Error("profile: multiplicity < 1");
        for (const auto& p : lower_points)
            if (p.multiplicity < 1) throw Error("profile: multiplicity < 1");
        if (has_single_essential_point()) {
            const double alpha = essential_points.front();
            for (std::size_t i = 0; i < upper_points.size(); ++i) {
                if (upper_points[i].value <= alpha)
                    throw Error("profile: upper point not above essential point");
                if (i > 0 && upper_points[i].value >= upper_points[i - 1].value)
                    throw Error("profile: upper points not strictly descending");
            }
            for (std::size_t i = 0; i < lower_points.size(); ++i) {
                if (lower_points[i].value >= alpha)
                    throw Error("profile: lower point not below essential point");
                if (i > 0 && lower_points[i].value <= lower_points[i - 1].value)
                    throw Error("profile: lower points not strictly ascending");
            }
            if (upper_tail) {
                if (upper_tail->multiplicity < 1) throw Error("profile: tail multiplicity < 1");
                double prev = std::numeric_limits<double>::infinity();
                for (int k = 1; k <= tail_samples; ++k) {
                    const double v = upper_tail->values(k);
                    if (v <= alpha || v >= prev)
                        throw Error("profile: upper tail not strictly decreasing toward alpha");
                    prev = v;
                }
            }
            if (lower_tail) {
                if (lower_tail->multiplicity < 1) throw Error("profile: tail multiplicity < 1");
                double prev = -std::numeric_limits<double>::infinity();
                for (int k = 1; k <= tail_samples; ++k) {
                    const double v = lower_tail->values(k);
                    if (v >= alpha || v <= prev)
                        throw Error("profile: lower tail not strictly increasing toward alpha");
                    prev = v;
                }
            }
        }
    }
};

} // namespace opspectra
