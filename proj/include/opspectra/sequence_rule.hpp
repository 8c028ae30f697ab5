#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "opspectra/errors.hpp"

namespace opspectra {

/// Closed-form sequence k -> value(k), k >= 1. Rules are small immutable
/// expressions so that any truncation dimension is renderable; there are no
/// stored arrays except finite prefix overrides.
///
/// Grammar:
///   const(c)                 : c
///   rational(a,b,c,d)        : (a + b k) / (c + d k)
///   sqrt(r)                  : sqrt(r(k))
///   square(r)                : r(k)^2
///   affine(s, t, r)          : s * r(k) + t
///   interleave(r0..r_{p-1})  : r_{(k-1) mod p}( (k-1)/p + 1 )
///   prefix(head, r)          : head[k-1] for k <= |head|, else r(k)
class SequenceRule {
public:
    enum class Kind { Const, Rational, Sqrt, Square, Affine, Interleave, Prefix };

    static SequenceRule constant(double c) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Const;
        n->coef = {c};
        return SequenceRule(std::move(n));
    }

    /// (a + b k) / (c + d k)
    static SequenceRule rational(double a, double b, double c, double d) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Rational;
        n->coef = {a, b, c, d};
        return SequenceRule(std::move(n));
    }

    /// 1/k
    static SequenceRule harmonic() { return rational(1.0, 0.0, 0.0, 1.0); }

    static SequenceRule sqrt(SequenceRule inner) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Sqrt;
        n->children = {std::move(inner)};
        return SequenceRule(std::move(n));
    }

    static SequenceRule square(SequenceRule inner) {
        if (inner.kind() == Kind::Sqrt) return inner.children()[0];
        auto n = std::make_shared<Node>();
        n->kind = Kind::Square;
        n->children = {std::move(inner)};
        return SequenceRule(std::move(n));
    }

    static SequenceRule affine(double scale, double shift, SequenceRule inner) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Affine;
        n->coef = {scale, shift};
        n->children = {std::move(inner)};
        return SequenceRule(std::move(n));
    }

    static SequenceRule interleave(std::vector<SequenceRule> slots) {
        if (slots.empty()) throw Error("interleave: needs at least one slot");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Interleave;
        n->children = std::move(slots);
        return SequenceRule(std::move(n));
    }

    static SequenceRule prefix(std::vector<double> head, SequenceRule tail) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Prefix;
        n->coef = std::move(head);
        n->children = {std::move(tail)};
        return SequenceRule(std::move(n));
    }

    double operator()(std::int64_t k) const {
        if (k < 1) throw UndefinedSequenceIndex("sequence index must be >= 1");
        return eval(*node_, k);
    }

    Kind kind() const { return node_->kind; }
    const std::vector<double>& coefficients() const { return node_->coef; }
    const std::vector<SequenceRule>& children() const { return node_->children; }

    bool operator==(const SequenceRule& o) const {
        if (node_ == o.node_) return true;
        if (node_->kind != o.node_->kind || node_->coef != o.node_->coef ||
            node_->children.size() != o.node_->children.size())
            return false;
        for (std::size_t i = 0; i < node_->children.size(); ++i)
            if (!(node_->children[i] == o.node_->children[i])) return false;
        return true;
    }

private:
    struct Node {
        Kind kind = Kind::Const;
        std::vector<double> coef;
        std::vector<SequenceRule> children;
    };

    explicit SequenceRule(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static double eval(const Node& n, std::int64_t k) {
        switch (n.kind) {
            case Kind::Const:
                return n.coef[0];
            case Kind::Rational: {
                const double kk = static_cast<double>(k);
                const double den = n.coef[2] + n.coef[3] * kk;
                if (den == 0.0)
                    throw UndefinedSequenceIndex("rational rule undefined at k = " +
                                                 std::to_string(k));
                return (n.coef[0] + n.coef[1] * kk) / den;
            }
            case Kind::Sqrt: {
                const double v = eval(*n.children[0].node_, k);
                if (v < 0.0)
                    throw UndefinedSequenceIndex("sqrt rule negative at k = " + std::to_string(k));
                return std::sqrt(v);
            }
            case Kind::Square: {
                const double v = eval(*n.children[0].node_, k);
                return v * v;
            }
            case Kind::Affine:
                return n.coef[0] * eval(*n.children[0].node_, k) + n.coef[1];
            case Kind::Interleave: {
                const std::int64_t p = static_cast<std::int64_t>(n.children.size());
                const std::int64_t slot = (k - 1) % p;
                const std::int64_t m = (k - 1) / p + 1;
                return eval(*n.children[static_cast<std::size_t>(slot)].node_, m);
            }
            case Kind::Prefix: {
                const auto len = static_cast<std::int64_t>(n.coef.size());
                if (k <= len) return n.coef[static_cast<std::size_t>(k - 1)];
                return eval(*n.children[0].node_, k);
            }
        }
        throw Error("sequence rule: unreachable");
    }

    std::shared_ptr<const Node> node_;
};

} // namespace opspectra
