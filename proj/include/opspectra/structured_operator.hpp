#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "opspectra/complex_matrix.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/sequence_rule.hpp"
#include "opspectra/spectral_profile.hpp"
#include "opspectra/spectrum_description.hpp"

namespace opspectra {

/// Affine injection of coordinate indices: m >= 1 maps to stride*(m-1) + offset.
struct IndexMap {
    std::int64_t stride = 1;
    std::int64_t offset = 1;

    std::int64_t operator()(std::int64_t m) const { return stride * (m - 1) + offset; }

    /// Number of local indices whose image is <= n.
    std::int64_t count_within(std::int64_t n) const {
        if (n < offset) return 0;
        return (n - offset) / stride + 1;
    }

    static IndexMap identity() { return {1, 1}; }
    static IndexMap odds() { return {2, 1}; }
    static IndexMap evens() { return {2, 2}; }

    bool operator==(const IndexMap&) const = default;
};

/// Symbolic operator on l2(N). Values are immutable; rendering is pure.
///
/// Coordinates are 1-based in the operator-theoretic reading; render(n)
/// returns the compression P_n T P_n onto span{e_1..e_n} as a 0-based matrix.
/// Compose renders as the product of the factors' compressions, which agrees
/// with the compression of the product away from the truncation boundary
/// (within the summed bandwidth of the last rows/columns).
class StructuredOperator {
public:
    enum class Kind {
        DiagonalWithLimit,
        WeightedShift,
        ScaledIdentity,
        FiniteMatrix,
        DirectSum,
        Block2x2,
        Adjoint,
        Compose,
        Sum,
        Scale,
        InterleavedEmbedding,
    };

    // ---- constructors ----

    static StructuredOperator diagonal_with_limit(SequenceRule entries, double limit) {
        auto n = make(Kind::DiagonalWithLimit);
        n->rule = std::move(entries);
        n->limit = limit;
        n->bandwidth = 0;
        return wrap(std::move(n));
    }

    static StructuredOperator weighted_shift(SequenceRule weights) {
        auto n = make(Kind::WeightedShift);
        n->rule = std::move(weights);
        n->bandwidth = 1;
        return wrap(std::move(n));
    }

    static StructuredOperator scaled_identity(cplx scalar) {
        auto n = make(Kind::ScaledIdentity);
        n->scalar = scalar;
        n->bandwidth = 0;
        n->support = -1;  // acts on all of l2, even when the scalar is zero
        return wrap(std::move(n));
    }

    static StructuredOperator zero() { return scaled_identity(cplx(0.0, 0.0)); }

    static StructuredOperator finite_matrix(ComplexMatrix m) {
        if (!m.square()) throw ShapeMismatch("finite_matrix: matrix must be square");
        auto n = make(Kind::FiniteMatrix);
        n->bandwidth = m.rows() == 0 ? 0 : static_cast<std::int64_t>(m.rows()) - 1;
        n->support = static_cast<std::int64_t>(m.rows());
        n->matrix = std::move(m);
        return wrap(std::move(n));
    }

    /// Direct sum. Finite-support parts occupy leading consecutive
    /// coordinates in order; infinite parts share the remaining coordinates
    /// round-robin, so direct_sum(aI, bI) renders as diag(a, b, a, b, ...).
    static StructuredOperator direct_sum(std::vector<StructuredOperator> parts) {
        if (parts.empty()) throw ShapeMismatch("direct_sum: needs at least one part");
        auto n = make(Kind::DirectSum);
        std::int64_t band = 0, finite_total = 0, infinite_count = 0, max_inf_band = 0;
        for (const auto& p : parts) {
            if (p.dimension()) {
                finite_total += *p.dimension();
                band = std::max(band, std::max<std::int64_t>(*p.dimension(), 1) - 1);
            } else {
                ++infinite_count;
                max_inf_band = std::max(max_inf_band, p.bandwidth());
            }
        }
        n->bandwidth = std::max(band, infinite_count * max_inf_band);
        n->support = infinite_count == 0 ? finite_total : -1;
        n->children = std::move(parts);
        return wrap(std::move(n));
    }

    /// 2x2 operator block matrix [t11 t12; t21 t22] realized on l2(N) by the
    /// odd/even interleaving of the two subspaces.
    static StructuredOperator block2x2(StructuredOperator t11, StructuredOperator t12,
                                       StructuredOperator t21, StructuredOperator t22,
                                       std::string row_label = "H1",
                                       std::string col_label = "H2") {
        auto n = make(Kind::Block2x2);
        n->bandwidth = std::max(
            std::max(2 * t11.bandwidth(), 2 * t22.bandwidth()),
            std::max(2 * t12.bandwidth() + 1, 2 * t21.bandwidth() + 1));
        n->support = -1;
        if (t11.dimension() && t12.dimension() && t21.dimension() && t22.dimension()) {
            const std::int64_t d = std::max(
                std::max(IndexMap::odds()(std::max<std::int64_t>(*t11.dimension(), 1)),
                         IndexMap::evens()(std::max<std::int64_t>(*t22.dimension(), 1))),
                std::max(IndexMap::odds()(std::max<std::int64_t>(*t12.dimension(), 1)),
                         IndexMap::evens()(std::max<std::int64_t>(*t21.dimension(), 1))));
            n->support = d;
        }
        n->children = {std::move(t11), std::move(t12), std::move(t21), std::move(t22)};
        n->labels = {std::move(row_label), std::move(col_label)};
        return wrap(std::move(n));
    }

    static StructuredOperator adjoint(StructuredOperator inner) {
        if (inner.kind() == Kind::Adjoint) return inner.node_->children[0];  // involution
        auto n = make(Kind::Adjoint);
        n->bandwidth = inner.bandwidth();
        n->support = inner.dimension() ? *inner.dimension() : -1;
        n->children = {std::move(inner)};
        return wrap(std::move(n));
    }

    static StructuredOperator compose(StructuredOperator left, StructuredOperator right) {
        auto n = make(Kind::Compose);
        n->bandwidth = left.bandwidth() + right.bandwidth();
        n->support = combine_support(left, right);
        n->children = {std::move(left), std::move(right)};
        return wrap(std::move(n));
    }

    static StructuredOperator sum(StructuredOperator left, StructuredOperator right) {
        auto n = make(Kind::Sum);
        n->bandwidth = std::max(left.bandwidth(), right.bandwidth());
        n->support = combine_support(left, right);
        n->children = {std::move(left), std::move(right)};
        return wrap(std::move(n));
    }

    static StructuredOperator scale(cplx scalar, StructuredOperator inner) {
        auto n = make(Kind::Scale);
        n->scalar = scalar;
        n->bandwidth = inner.bandwidth();
        n->support = inner.dimension() ? *inner.dimension() : -1;
        n->children = {std::move(inner)};
        return wrap(std::move(n));
    }

    /// T[row_map(i)][col_map(j)] = inner[i][j]; zero elsewhere. The two maps
    /// must share a stride so the result stays banded.
    static StructuredOperator interleaved_embedding(StructuredOperator inner, IndexMap row_map,
                                                    IndexMap col_map) {
        if (row_map.stride < 1 || col_map.stride < 1 || row_map.offset < 1 || col_map.offset < 1)
            throw ShapeMismatch("interleaved_embedding: maps must have stride, offset >= 1");
        if (row_map.stride != col_map.stride)
            throw ShapeMismatch("interleaved_embedding: row/col strides differ");
        auto n = make(Kind::InterleavedEmbedding);
        n->bandwidth = row_map.stride * inner.bandwidth() +
                       std::abs(row_map.offset - col_map.offset);
        n->support = -1;
        if (inner.dimension()) {
            const std::int64_t d = std::max<std::int64_t>(*inner.dimension(), 1);
            n->support = std::max(row_map(d), col_map(d));
        }
        n->row_map = row_map;
        n->col_map = col_map;
        n->children = {std::move(inner)};
        return wrap(std::move(n));
    }

    // ---- metadata ----

    StructuredOperator with_profile(SpectralProfile p) const {
        auto n = std::make_shared<Node>(*node_);
        n->profile = std::move(p);
        return StructuredOperator(std::move(n));
    }

    StructuredOperator with_spectrum(DeclaredSpectrum s) const {
        auto n = std::make_shared<Node>(*node_);
        n->spectrum = std::move(s);
        return StructuredOperator(std::move(n));
    }

    StructuredOperator with_classes(std::set<std::string> classes) const {
        auto n = std::make_shared<Node>(*node_);
        n->classes = std::move(classes);
        return StructuredOperator(std::move(n));
    }

    const std::optional<SpectralProfile>& profile() const { return node_->profile; }
    const std::optional<DeclaredSpectrum>& spectrum() const { return node_->spectrum; }
    const std::set<std::string>& declared_classes() const { return node_->classes; }
    bool declares_class(const std::string& c) const { return node_->classes.count(c) != 0; }

    // ---- structure accessors ----

    Kind kind() const { return node_->kind; }
    std::int64_t bandwidth() const { return node_->bandwidth; }

    /// Finite support dimension d (entries vanish outside the leading d x d
    /// block), or nullopt for genuinely infinite operators.
    std::optional<std::int64_t> dimension() const {
        if (node_->support < 0) return std::nullopt;
        return node_->support;
    }

    const std::vector<StructuredOperator>& children() const { return node_->children; }
    const SequenceRule& rule() const { return *node_->rule; }
    cplx scalar() const { return node_->scalar; }
    double limit() const { return node_->limit; }
    const ComplexMatrix& matrix() const { return node_->matrix; }
    const IndexMap& row_map() const { return node_->row_map; }
    const IndexMap& col_map() const { return node_->col_map; }
    const std::vector<std::string>& labels() const { return node_->labels; }

    bool same_structure(const StructuredOperator& o) const {
        if (node_ == o.node_) return true;
        const Node& a = *node_;
        const Node& b = *o.node_;
        if (a.kind != b.kind || a.scalar != b.scalar || a.limit != b.limit ||
            !(a.matrix == b.matrix) || a.row_map != b.row_map || a.col_map != b.col_map ||
            a.labels != b.labels || a.rule.has_value() != b.rule.has_value())
            return false;
        if (a.rule && !(*a.rule == *b.rule)) return false;
        if (a.children.size() != b.children.size()) return false;
        for (std::size_t i = 0; i < a.children.size(); ++i)
            if (!a.children[i].same_structure(b.children[i])) return false;
        return true;
    }

    bool operator==(const StructuredOperator& o) const {
        return same_structure(o) && node_->profile == o.node_->profile &&
               node_->spectrum == o.node_->spectrum && node_->classes == o.node_->classes;
    }

    // ---- rendering ----

    /// Finite-section compression onto span{e_1..e_n}. Deterministic; calling
    /// twice yields bit-identical matrices.
    ComplexMatrix render(std::int64_t n, bool strict = false) const {
        if (n < 1) throw DimensionMismatch("render: n must be >= 1");
        return render_impl(n, strict);
    }

private:
    struct Node {
        Kind kind = Kind::ScaledIdentity;
        std::int64_t bandwidth = 0;
        std::int64_t support = -1;  // -1 = infinite
        std::optional<SequenceRule> rule;
        double limit = 0.0;
        cplx scalar = 0.0;
        ComplexMatrix matrix;
        IndexMap row_map, col_map;
        std::vector<std::string> labels;
        std::vector<StructuredOperator> children;

        std::optional<SpectralProfile> profile;
        std::optional<DeclaredSpectrum> spectrum;
        std::set<std::string> classes;
    };

    explicit StructuredOperator(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static std::shared_ptr<Node> make(Kind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }

    static StructuredOperator wrap(std::shared_ptr<Node> n) {
        return StructuredOperator(std::shared_ptr<const Node>(std::move(n)));
    }

    static std::int64_t combine_support(const StructuredOperator& a, const StructuredOperator& b) {
        if (a.dimension() && b.dimension()) return std::max(*a.dimension(), *b.dimension());
        return -1;
    }

    ComplexMatrix render_impl(std::int64_t n, bool strict) const {
        const Node& nd = *node_;
        const auto un = static_cast<std::size_t>(n);
        switch (nd.kind) {
            case Kind::DiagonalWithLimit: {
                ComplexMatrix m(un, un);
                for (std::int64_t k = 1; k <= n; ++k)
                    m(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(k - 1)) =
                        (*nd.rule)(k);
                return m;
            }
            case Kind::WeightedShift: {
                ComplexMatrix m(un, un);
                for (std::int64_t k = 1; k < n; ++k)
                    m(static_cast<std::size_t>(k), static_cast<std::size_t>(k - 1)) =
                        (*nd.rule)(k);
                return m;
            }
            case Kind::ScaledIdentity: {
                ComplexMatrix m(un, un);
                for (std::size_t i = 0; i < un; ++i) m(i, i) = nd.scalar;
                return m;
            }
            case Kind::FiniteMatrix: {
                const std::int64_t d = static_cast<std::int64_t>(nd.matrix.rows());
                if (strict && d > n)
                    throw DimensionMismatch("render: finite matrix larger than n in strict mode");
                ComplexMatrix m(un, un);
                const std::size_t c = static_cast<std::size_t>(std::min(d, n));
                for (std::size_t i = 0; i < c; ++i)
                    for (std::size_t j = 0; j < c; ++j) m(i, j) = nd.matrix(i, j);
                return m;
            }
            case Kind::Adjoint:
                return nd.children[0].render_impl(n, strict).adjoint();
            case Kind::Scale: {
                ComplexMatrix m = nd.children[0].render_impl(n, strict);
                m *= nd.scalar;
                return m;
            }
            case Kind::Sum: {
                ComplexMatrix m = nd.children[0].render_impl(n, strict);
                m += nd.children[1].render_impl(n, strict);
                return m;
            }
            case Kind::Compose:
                return nd.children[0].render_impl(n, strict) *
                       nd.children[1].render_impl(n, strict);
            case Kind::DirectSum: {
                ComplexMatrix m(un, un);
                // finite parts lead, in order
                std::int64_t offset = 0;
                std::int64_t finite_total = 0;
                std::int64_t infinite_count = 0;
                for (const auto& p : node_->children) {
                    if (p.dimension()) finite_total += *p.dimension();
                    else ++infinite_count;
                }
                std::int64_t q = 0;  // index among infinite parts
                for (const auto& p : node_->children) {
                    if (p.dimension()) {
                        const std::int64_t d = *p.dimension();
                        const std::int64_t vis = std::clamp<std::int64_t>(n - offset, 0, d);
                        if (vis > 0) {
                            ComplexMatrix sub = p.render_impl(vis, strict);
                            scatter(m, sub, IndexMap{1, offset + 1}, IndexMap{1, offset + 1}, n);
                        }
                        offset += d;
                    } else {
                        const IndexMap g{infinite_count, finite_total + q + 1};
                        const std::int64_t sub_n = g.count_within(n);
                        if (sub_n > 0) {
                            ComplexMatrix sub = p.render_impl(sub_n, strict);
                            scatter(m, sub, g, g, n);
                        }
                        ++q;
                    }
                }
                return m;
            }
            case Kind::Block2x2: {
                ComplexMatrix m(un, un);
                const IndexMap odd = IndexMap::odds(), even = IndexMap::evens();
                render_embedded(m, nd.children[0], odd, odd, n, strict);
                render_embedded(m, nd.children[1], odd, even, n, strict);
                render_embedded(m, nd.children[2], even, odd, n, strict);
                render_embedded(m, nd.children[3], even, even, n, strict);
                return m;
            }
            case Kind::InterleavedEmbedding: {
                ComplexMatrix m(un, un);
                render_embedded(m, nd.children[0], nd.row_map, nd.col_map, n, strict);
                return m;
            }
        }
        throw Error("render: unreachable");
    }

    static void render_embedded(ComplexMatrix& m, const StructuredOperator& inner,
                                const IndexMap& rmap, const IndexMap& cmap, std::int64_t n,
                                bool strict) {
        const std::int64_t rows_vis = rmap.count_within(n);
        const std::int64_t cols_vis = cmap.count_within(n);
        const std::int64_t sub_n = std::max(rows_vis, cols_vis);
        if (sub_n <= 0) return;
        ComplexMatrix sub = inner.render_impl(sub_n, strict);
        scatter_rect(m, sub, rmap, cmap, rows_vis, cols_vis);
    }

    /// m[gmap_r(i)][gmap_c(j)] += sub[i][j] for all visible (i, j).
    static void scatter(ComplexMatrix& m, const ComplexMatrix& sub, const IndexMap& rmap,
                        const IndexMap& cmap, std::int64_t n) {
        const std::int64_t rows_vis = std::min<std::int64_t>(
            static_cast<std::int64_t>(sub.rows()), rmap.count_within(n));
        const std::int64_t cols_vis = std::min<std::int64_t>(
            static_cast<std::int64_t>(sub.cols()), cmap.count_within(n));
        scatter_rect(m, sub, rmap, cmap, rows_vis, cols_vis);
    }

    static void scatter_rect(ComplexMatrix& m, const ComplexMatrix& sub, const IndexMap& rmap,
                             const IndexMap& cmap, std::int64_t rows_vis, std::int64_t cols_vis) {
        for (std::int64_t i = 1; i <= rows_vis; ++i) {
            const std::size_t gi = static_cast<std::size_t>(rmap(i) - 1);
            for (std::int64_t j = 1; j <= cols_vis; ++j) {
                const std::size_t gj = static_cast<std::size_t>(cmap(j) - 1);
                const cplx v = sub(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
                if (v != cplx(0.0, 0.0)) m(gi, gj) += v;
            }
        }
    }

    std::shared_ptr<const Node> node_;
};

} // namespace opspectra
