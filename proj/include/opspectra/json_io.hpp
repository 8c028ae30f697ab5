#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "opspectra/errors.hpp"
#include "opspectra/structured_operator.hpp"

namespace opspectra {

using nlohmann::json;

// ---- scalars ----

inline json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2)
        throw ParseError("complex scalar must be a number or [re, im]");
    return cplx(j[0].get<double>(), j[1].get<double>());
}

inline json extdim_to_json(const ExtDim& d) {
    if (d.is_infinite()) return json("inf");
    return json(d.value());
}

inline ExtDim extdim_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtDim::infinite();
        throw ParseError("dimension must be a nonnegative integer or \"inf\"");
    }
    const auto v = j.get<std::int64_t>();
    if (v < 0) throw ParseError("dimension must be nonnegative");
    return ExtDim::finite(v);
}

// ---- sequence rules ----

inline json rule_to_json(const SequenceRule& r) {
    json j;
    switch (r.kind()) {
        case SequenceRule::Kind::Const:
            j["rule"] = "const";
            j["value"] = r.coefficients()[0];
            break;
        case SequenceRule::Kind::Rational:
            j["rule"] = "rational";
            j["a"] = r.coefficients()[0];
            j["b"] = r.coefficients()[1];
            j["c"] = r.coefficients()[2];
            j["d"] = r.coefficients()[3];
            break;
        case SequenceRule::Kind::Sqrt:
            j["rule"] = "sqrt";
            j["inner"] = rule_to_json(r.children()[0]);
            break;
        case SequenceRule::Kind::Square:
            j["rule"] = "square";
            j["inner"] = rule_to_json(r.children()[0]);
            break;
        case SequenceRule::Kind::Affine:
            j["rule"] = "affine";
            j["scale"] = r.coefficients()[0];
            j["shift"] = r.coefficients()[1];
            j["inner"] = rule_to_json(r.children()[0]);
            break;
        case SequenceRule::Kind::Interleave: {
            j["rule"] = "interleave";
            json slots = json::array();
            for (const auto& c : r.children()) slots.push_back(rule_to_json(c));
            j["slots"] = std::move(slots);
            break;
        }
        case SequenceRule::Kind::Prefix:
            j["rule"] = "prefix";
            j["head"] = r.coefficients();
            j["inner"] = rule_to_json(r.children()[0]);
            break;
    }
    return j;
}

inline SequenceRule rule_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rule"))
        throw ParseError("sequence rule: missing \"rule\" field");
    const std::string kind = j.at("rule").get<std::string>();
    if (kind == "const") return SequenceRule::constant(j.at("value").get<double>());
    if (kind == "rational")
        return SequenceRule::rational(j.at("a").get<double>(), j.at("b").get<double>(),
                                      j.at("c").get<double>(), j.at("d").get<double>());
    if (kind == "sqrt") return SequenceRule::sqrt(rule_from_json(j.at("inner")));
    if (kind == "square") return SequenceRule::square(rule_from_json(j.at("inner")));
    if (kind == "affine")
        return SequenceRule::affine(j.at("scale").get<double>(), j.at("shift").get<double>(),
                                    rule_from_json(j.at("inner")));
    if (kind == "interleave") {
        std::vector<SequenceRule> slots;
        for (const auto& s : j.at("slots")) slots.push_back(rule_from_json(s));
        return SequenceRule::interleave(std::move(slots));
    }
    if (kind == "prefix")
        return SequenceRule::prefix(j.at("head").get<std::vector<double>>(),
                                    rule_from_json(j.at("inner")));
    throw ParseError("sequence rule: unknown kind \"" + kind + "\"");
}

// ---- spectral profile ----

inline json profile_to_json(const SpectralProfile& p) {
    json j;
    j["essential_points"] = p.essential_points;
    json up = json::array();
    for (const auto& g : p.upper_points) up.push_back({{"value", g.value}, {"mult", g.multiplicity}});
    j["upper_points"] = std::move(up);
    if (p.upper_tail)
        j["upper_tail"] = {{"values", rule_to_json(p.upper_tail->values)},
                           {"mult", p.upper_tail->multiplicity}};
    json low = json::array();
    for (const auto& g : p.lower_points) low.push_back({{"value", g.value}, {"mult", g.multiplicity}});
    j["lower_points"] = std::move(low);
    if (p.lower_tail)
        j["lower_tail"] = {{"values", rule_to_json(p.lower_tail->values)},
                           {"mult", p.lower_tail->multiplicity}};
    j["alpha_in_point_spectrum"] = p.alpha_in_point_spectrum;
    j["alpha_eigenspace_dim"] = extdim_to_json(p.alpha_eigenspace_dim);
    j["kernel_dim"] = extdim_to_json(p.kernel_dim);
    j["cokernel_dim"] = extdim_to_json(p.cokernel_dim);
    j["min_modulus"] = p.min_modulus;
    return j;
}

inline SpectralProfile profile_from_json(const json& j) {
    SpectralProfile p;
    p.essential_points = j.at("essential_points").get<std::vector<double>>();
    for (const auto& g : j.value("upper_points", json::array()))
        p.upper_points.push_back({g.at("value").get<double>(), g.at("mult").get<std::int64_t>()});
    if (j.contains("upper_tail"))
        p.upper_tail = PointTail{rule_from_json(j.at("upper_tail").at("values")),
                                 j.at("upper_tail").at("mult").get<std::int64_t>()};
    for (const auto& g : j.value("lower_points", json::array()))
        p.lower_points.push_back({g.at("value").get<double>(), g.at("mult").get<std::int64_t>()});
    if (j.contains("lower_tail"))
        p.lower_tail = PointTail{rule_from_json(j.at("lower_tail").at("values")),
                                 j.at("lower_tail").at("mult").get<std::int64_t>()};
    p.alpha_in_point_spectrum = j.value("alpha_in_point_spectrum", false);
    if (j.contains("alpha_eigenspace_dim"))
        p.alpha_eigenspace_dim = extdim_from_json(j.at("alpha_eigenspace_dim"));
    if (j.contains("kernel_dim")) p.kernel_dim = extdim_from_json(j.at("kernel_dim"));
    if (j.contains("cokernel_dim")) p.cokernel_dim = extdim_from_json(j.at("cokernel_dim"));
    p.min_modulus = j.value("min_modulus", 0.0);
    return p;
}

// ---- spectrum descriptions ----

inline json spectrum_description_to_json(const SpectrumDescription& s) {
    json j;
    json pts = json::array();
    for (const auto& p : s.discrete_points)
        pts.push_back({{"value", cplx_to_json(p.value)}, {"mult", p.multiplicity}});
    j["points"] = std::move(pts);
    json regs = json::array();
    for (const auto& r : s.regions) {
        switch (r.kind) {
            case SpectrumRegion::Kind::Circle:
                regs.push_back({{"type", "circle"}, {"r", r.r1}});
                break;
            case SpectrumRegion::Kind::Disk:
                regs.push_back({{"type", "disk"}, {"r", r.r1}});
                break;
            case SpectrumRegion::Kind::Annulus:
                regs.push_back({{"type", "annulus"}, {"r1", r.r1}, {"r2", r.r2}});
                break;
        }
    }
    j["regions"] = std::move(regs);
    return j;
}

inline SpectrumDescription spectrum_description_from_json(const json& j) {
    SpectrumDescription s;
    for (const auto& p : j.value("points", json::array()))
        s.discrete_points.push_back(
            {cplx_from_json(p.at("value")), p.value("mult", std::int64_t{1})});
    for (const auto& r : j.value("regions", json::array())) {
        const std::string type = r.at("type").get<std::string>();
        if (type == "circle") s.regions.push_back(SpectrumRegion::circle(r.at("r").get<double>()));
        else if (type == "disk") s.regions.push_back(SpectrumRegion::disk(r.at("r").get<double>()));
        else if (type == "annulus")
            s.regions.push_back(
                SpectrumRegion::annulus(r.at("r1").get<double>(), r.at("r2").get<double>()));
        else throw ParseError("spectrum region: unknown type \"" + type + "\"");
    }
    return s;
}

inline json declared_spectrum_to_json(const DeclaredSpectrum& d) {
    json j;
    j["sigma"] = spectrum_description_to_json(d.sigma);
    j["sigma_ess"] = spectrum_description_to_json(d.sigma_ess);
    j["weyl"] = spectrum_description_to_json(d.weyl);
    json pts = json::array();
    for (const auto& p : d.pi00)
        pts.push_back({{"value", cplx_to_json(p.value)}, {"mult", p.multiplicity}});
    j["pi00"] = std::move(pts);
    return j;
}

inline DeclaredSpectrum declared_spectrum_from_json(const json& j) {
    DeclaredSpectrum d;
    d.sigma = spectrum_description_from_json(j.at("sigma"));
    d.sigma_ess = spectrum_description_from_json(j.at("sigma_ess"));
    d.weyl = spectrum_description_from_json(j.at("weyl"));
    for (const auto& p : j.value("pi00", json::array()))
        d.pi00.push_back({cplx_from_json(p.at("value")), p.value("mult", std::int64_t{1})});
    return d;
}

// ---- operators ----

inline json operator_to_json(const StructuredOperator& op) {
    json j;
    json params = json::object();
    json children = json::array();
    using K = StructuredOperator::Kind;
    switch (op.kind()) {
        case K::DiagonalWithLimit:
            j["kind"] = "diagonal_with_limit";
            params["entries"] = rule_to_json(op.rule());
            params["limit"] = op.limit();
            break;
        case K::WeightedShift:
            j["kind"] = "weighted_shift";
            params["weights"] = rule_to_json(op.rule());
            break;
        case K::ScaledIdentity:
            j["kind"] = "scaled_identity";
            params["scalar"] = cplx_to_json(op.scalar());
            break;
        case K::FiniteMatrix: {
            j["kind"] = "finite_matrix";
            json rows = json::array();
            const ComplexMatrix& m = op.matrix();
            for (std::size_t i = 0; i < m.rows(); ++i) {
                json row = json::array();
                for (std::size_t jj = 0; jj < m.cols(); ++jj)
                    row.push_back(cplx_to_json(m(i, jj)));
                rows.push_back(std::move(row));
            }
            params["entries"] = std::move(rows);
            break;
        }
        case K::DirectSum:
            j["kind"] = "direct_sum";
            for (const auto& c : op.children()) children.push_back(operator_to_json(c));
            break;
        case K::Block2x2:
            j["kind"] = "block2x2";
            params["row_label"] = op.labels()[0];
            params["col_label"] = op.labels()[1];
            for (const auto& c : op.children()) children.push_back(operator_to_json(c));
            break;
        case K::Adjoint:
            j["kind"] = "adjoint";
            children.push_back(operator_to_json(op.children()[0]));
            break;
        case K::Compose:
            j["kind"] = "compose";
            children.push_back(operator_to_json(op.children()[0]));
            children.push_back(operator_to_json(op.children()[1]));
            break;
        case K::Sum:
            j["kind"] = "sum";
            children.push_back(operator_to_json(op.children()[0]));
            children.push_back(operator_to_json(op.children()[1]));
            break;
        case K::Scale:
            j["kind"] = "scale";
            params["scalar"] = cplx_to_json(op.scalar());
            children.push_back(operator_to_json(op.children()[0]));
            break;
        case K::InterleavedEmbedding:
            j["kind"] = "interleaved_embedding";
            params["row_map"] = {{"stride", op.row_map().stride}, {"offset", op.row_map().offset}};
            params["col_map"] = {{"stride", op.col_map().stride}, {"offset", op.col_map().offset}};
            children.push_back(operator_to_json(op.children()[0]));
            break;
    }
    j["params"] = std::move(params);
    j["children"] = std::move(children);
    json meta = json::object();
    bool has_meta = false;
    if (op.profile()) {
        meta = profile_to_json(*op.profile());
        has_meta = true;
    }
    if (op.spectrum()) {
        meta["spectrum"] = declared_spectrum_to_json(*op.spectrum());
        has_meta = true;
    }
    if (!op.declared_classes().empty()) {
        meta["classes"] = op.declared_classes();
        has_meta = true;
    }
    if (has_meta) j["profile"] = std::move(meta);
    return j;
}

inline StructuredOperator operator_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ParseError("operator: missing \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.value("params", json::object());
    const json children = j.value("children", json::array());

    auto child = [&](std::size_t i) -> StructuredOperator {
        if (children.size() <= i)
            throw ParseError("operator \"" + kind + "\": missing child " + std::to_string(i));
        return operator_from_json(children[i]);
    };

    StructuredOperator op = StructuredOperator::zero();
    if (kind == "diagonal_with_limit") {
        op = StructuredOperator::diagonal_with_limit(rule_from_json(params.at("entries")),
                                                     params.at("limit").get<double>());
    } else if (kind == "weighted_shift") {
        op = StructuredOperator::weighted_shift(rule_from_json(params.at("weights")));
    } else if (kind == "scaled_identity") {
        op = StructuredOperator::scaled_identity(cplx_from_json(params.at("scalar")));
    } else if (kind == "finite_matrix") {
        const json& rows = params.at("entries");
        const std::size_t n = rows.size();
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n) throw ParseError("finite_matrix: entries must be square");
            for (std::size_t jj = 0; jj < n; ++jj) m(i, jj) = cplx_from_json(rows[i][jj]);
        }
        op = StructuredOperator::finite_matrix(std::move(m));
    } else if (kind == "direct_sum") {
        std::vector<StructuredOperator> parts;
        for (const auto& c : children) parts.push_back(operator_from_json(c));
        op = StructuredOperator::direct_sum(std::move(parts));
    } else if (kind == "block2x2") {
        op = StructuredOperator::block2x2(child(0), child(1), child(2), child(3),
                                          params.value("row_label", "H1"),
                                          params.value("col_label", "H2"));
    } else if (kind == "adjoint") {
        op = StructuredOperator::adjoint(child(0));
    } else if (kind == "compose") {
        op = StructuredOperator::compose(child(0), child(1));
    } else if (kind == "sum") {
        op = StructuredOperator::sum(child(0), child(1));
    } else if (kind == "scale") {
        op = StructuredOperator::scale(cplx_from_json(params.at("scalar")), child(0));
    } else if (kind == "interleaved_embedding") {
        const json& rm = params.at("row_map");
        const json& cm = params.at("col_map");
        op = StructuredOperator::interleaved_embedding(
            child(0),
            IndexMap{rm.at("stride").get<std::int64_t>(), rm.at("offset").get<std::int64_t>()},
            IndexMap{cm.at("stride").get<std::int64_t>(), cm.at("offset").get<std::int64_t>()});
    } else {
        throw ParseError("operator: unknown kind \"" + kind + "\"");
    }

    if (j.contains("profile")) {
        const json& meta = j.at("profile");
        if (meta.contains("essential_points")) op = op.with_profile(profile_from_json(meta));
        if (meta.contains("spectrum"))
            op = op.with_spectrum(declared_spectrum_from_json(meta.at("spectrum")));
        if (meta.contains("classes"))
            op = op.with_classes(meta.at("classes").get<std::set<std::string>>());
    }
    return op;
}

inline std::string serialize_operator(const StructuredOperator& op) {
    return operator_to_json(op).dump(2) + "\n";
}

inline StructuredOperator parse_operator(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("operator spec: ") + e.what());
    }
    try {
        return operator_from_json(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("operator spec: ") + e.what());
    }
}

inline StructuredOperator load_operator_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open operator spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_operator(ss.str());
}

inline void save_operator_file(const StructuredOperator& op, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write operator spec file: " + path);
    out << serialize_operator(op);
}

} // namespace opspectra
