#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "opspectra/classification.hpp"
#include "opspectra/decomposition.hpp"
#include "opspectra/json_io.hpp"
#include "opspectra/normality.hpp"

namespace opspectra {

/// 17 significant digits: enough to round-trip any double, and the frozen
/// CSV contract for every numeric column.
inline std::string format_real17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- classification ----

inline json predicate_to_json(const PredicateResult& r) {
    return json{{"holds", r.holds}, {"defect", r.defect}, {"mode", r.mode}, {"dim", r.dim}};
}

inline json classification_report_to_json(const ClassificationReport& rep) {
    json flags = json::object();
    for (const auto& [name, flag] : rep.flags) flags[name] = predicate_to_json(flag);
    json j;
    j["flags"] = std::move(flags);
    j["dims_tested"] = rep.dims_tested;
    if (rep.profile_used) j["profile_used"] = profile_to_json(*rep.profile_used);
    return j;
}

inline json essential_estimate_to_json(const EssentialEstimate& e) {
    json clusters = json::array();
    for (const auto& c : e.clusters)
        clusters.push_back({{"center", c.center},
                            {"kind", c.kind},
                            {"counts", c.counts},
                            {"stability", c.stability}});
    return json{{"dims", e.dims},
                {"clusters", std::move(clusters)},
                {"checked_against_profile", e.checked_against_profile}};
}

// ---- decompositions ----

inline json positive_form_to_json(const PositiveCanonicalForm& f,
                                  const PositiveFormVerification& v) {
    json j;
    j["alpha"] = f.alpha;
    j["dim"] = f.k1.rows();
    j["k1_norm"] = operator_norm(f.k1);
    j["k2_norm"] = operator_norm(f.k2);
    j["reassembly_defect"] = v.reassembly_defect;
    j["k1k2_product_norm"] = v.k1k2_product_norm;
    j["k1_bound_defect"] = v.k1_bound_defect;
    j["uniqueness"] = {{"alpha", v.alpha_agreement},
                       {"k1", v.k1_agreement},
                       {"k2", v.k2_agreement}};
    j["ok"] = v.ok;
    return j;
}

inline json quasinormal_to_json(const QuasinormalDecomposition& d) {
    auto block = [](const QuasinormalBlock& b) {
        return json{{"scalar", b.scalar},
                    {"dim", b.basis.cols()},
                    {"unitary_defect", b.unitary_defect},
                    {"kernel_identity", b.kernel_identity_flag}};
    };
    json upper = json::array(), lower = json::array();
    for (const auto& b : d.upper_blocks) upper.push_back(block(b));
    for (const auto& b : d.lower_blocks) lower.push_back(block(b));
    json j;
    j["alpha"] = d.alpha;
    j["dim"] = d.dim;
    j["upper_blocks"] = std::move(upper);
    j["lower_blocks"] = std::move(lower);
    j["essential"] = {{"kind", d.essential.kind},
                      {"scalar", d.essential.scalar},
                      {"dim", d.essential.basis.cols()},
                      {"isometry_defect", d.essential.isometry_defect},
                      {"co_isometry_defect", d.essential.co_isometry_defect}};
    j["reassembly_defect"] = d.reassembly_defect;
    return j;
}

inline json hyponormal_form_to_json(const HyponormalBlockForm& f) {
    json betas = json::array();
    for (const auto& g : f.beta_targets)
        betas.push_back({{"value", g.value}, {"mult", g.multiplicity}});
    json j;
    j["alpha"] = f.alpha;
    j["dim"] = f.dim;
    j["h0_dim"] = f.h0_basis.cols();
    j["h1_dim"] = f.h1_basis.cols();
    j["h2_dim"] = f.h2_basis.cols();
    j["beta_targets"] = std::move(betas);
    j["a_max_entry"] = f.a.max_abs();
    j["v1_a_product_norm"] = f.v1_a_product_norm;
    j["gram_identity_defect"] = f.gram_identity_defect;
    j["bb_bound_defect"] = f.bb_bound_defect;
    j["bb_bound_margin"] = f.bb_bound_margin;
    j["bb_equality_gap"] = f.bb_equality_gap;
    j["v0_normal_defect"] = f.v0_normal_defect;
    j["block_leak"] = f.block_leak;
    j["reassembly_defect"] = f.reassembly_defect;
    j["degenerate_single_isometry"] = f.degenerate_single_isometry;
    return j;
}

inline json adjoint_form_to_json(const AdjointBlockForm& f) {
    json betas = json::array();
    for (const auto& g : f.beta_targets)
        betas.push_back({{"value", g.value}, {"mult", g.multiplicity}});
    json j;
    j["alpha"] = f.alpha;
    j["dim"] = f.dim;
    j["h0_dim"] = f.h0_basis.cols();
    j["h1_dim"] = f.h1_basis.cols();
    j["h2_dim"] = f.h2_basis.cols();
    j["beta_targets"] = std::move(betas);
    j["s1_co_isometry_defect"] = f.s1_co_isometry_defect;
    j["s1_a1_product_norm"] = f.s1_a1_product_norm;
    j["gram_identity_defect"] = f.gram_identity_defect;
    j["b1_bound_defect"] = f.b1_bound_defect;
    j["reassembly_defect"] = f.reassembly_defect;
    return j;
}

// ---- normality verdicts ----

inline json verdict_to_json(const NormalityVerdict& v) {
    json j;
    j["criterion"] = criterion_name(v.criterion);
    j["premise_holds"] = v.premise_holds;
    j["commutator_defect"] = v.commutator_defect;
    j["conclusion_normal"] = v.conclusion_normal;
    j["dims"] = v.dims;
    j["defects"] = v.defects;
    if (!v.premise_note.empty()) j["premise_note"] = v.premise_note;
    return j;
}

// ---- CSV (frozen schema: "n,metric,value", LF line endings) ----

struct StudyRow {
    std::int64_t n = 0;
    std::string metric;
    double value = 0.0;
};

inline std::string study_csv(const std::vector<StudyRow>& rows) {
    std::string out = "n,metric,value\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n);
        out += ',';
        out += r.metric;
        out += ',';
        out += format_real17(r.value);
        out += '\n';
    }
    return out;
}

/// Decay tables keep their own wide schema.
inline std::string decay_study_csv(const DecayStudy& s) {
    std::string out = "n,full_defect,interior_defect\n";
    for (const auto& r : s.rows) {
        out += std::to_string(r.n);
        out += ',';
        out += format_real17(r.full_defect);
        out += ',';
        out += format_real17(r.interior_defect);
        out += '\n';
    }
    return out;
}

/// Sparse matrix export: one "row,col,re,im" line per nonzero entry.
inline std::string matrix_csv(const ComplexMatrix& m) {
    std::string out = "row,col,re,im\n";
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            const cplx v = m(i, j);
            if (v == cplx(0.0, 0.0)) continue;
            out += std::to_string(i + 1);
            out += ',';
            out += std::to_string(j + 1);
            out += ',';
            out += format_real17(v.real());
            out += ',';
            out += format_real17(v.imag());
            out += '\n';
        }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);  // binary: keep LF endings
    if (!out) throw Error("cannot write file: " + path);
    out << content;
}

} // namespace opspectra
