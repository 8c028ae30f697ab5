#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "opspectra/classification.hpp"
#include "opspectra/decomposition.hpp"
#include "opspectra/errors.hpp"
#include "opspectra/generator.hpp"
#include "opspectra/json_io.hpp"
#include "opspectra/normality.hpp"
#include "opspectra/report_io.hpp"

namespace opspectra {

/// Exit codes: 0 success, 1 premise/verification failure, 2 input error.
enum ExitCode { kOk = 0, kVerificationFailed = 1, kInputError = 2 };

struct RunConfig {
    std::string command;            // analyze | decompose | verify | study | generate
    std::string input_path;
    std::vector<std::int64_t> dims = {64};
    ToleranceConfig tol;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string form = "hyponormal";  // decompose: positive | quasinormal | hyponormal | adjoint
    std::string mode = "both";        // symbolic | numeric | both
    bool export_matrices = false;
    GeneratorRecipe recipe;           // generate
    std::string out_file;             // generate target path
    int verbosity = 0;

    void validate() const {
        tol.validate();
        if (!std::is_sorted(dims.begin(), dims.end()))
            throw Error("dims must be ascending");
        if (command != "generate" && dims.empty()) throw Error("dims must be nonempty");
    }
};

namespace detail {

inline void log(const RunConfig& cfg, const std::string& msg) {
    if (cfg.verbosity > 0) std::cerr << "[opspectra] " << msg << "\n";
}

inline void ensure_out_dir(const RunConfig& cfg) {
    if (!cfg.out_dir.empty() && cfg.out_dir != ".")
        std::filesystem::create_directories(cfg.out_dir);
}

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

inline ClassificationReport symbolic_only_report(const StructuredOperator& op) {
    ClassificationReport rep;
    for (const std::string& c : op.declared_classes())
        rep.flags["declared_" + c] = PredicateResult{true, 0.0, "symbolic", 0};
    if (op.profile()) {
        rep.profile_used = op.profile();
        const SpectralProfile& p = *op.profile();
        rep.flags["an_membership"] = PredicateResult{an_membership(p), 0.0, "symbolic", 0};
        rep.flags["am_membership"] = PredicateResult{am_membership(p), 0.0, "symbolic", 0};
        rep.flags["closure_an_membership"] =
            PredicateResult{closure_an_membership(p), 0.0, "symbolic", 0};
    }
    return rep;
}

inline std::string summary_line(const std::string& name, const PredicateResult& r) {
    std::string line = name + ": " + (r.holds ? "yes" : "no") + " (" + r.mode;
    if (r.dim > 0) line += " @ n=" + std::to_string(r.dim);
    line += ", defect " + format_real17(r.defect) + ")";
    return line + "\n";
}

inline int run_analyze(const RunConfig& cfg) {
    StructuredOperator op = load_operator_file(cfg.input_path);
    ClassificationReport rep;
    if (cfg.mode == "symbolic") {
        rep = symbolic_only_report(op);
    } else {
        rep = classify(op, cfg.dims, cfg.tol, cfg.seed);
        if (cfg.mode == "numeric") {
            for (auto it = rep.flags.begin(); it != rep.flags.end();)
                it = (it->second.mode == "symbolic") ? rep.flags.erase(it) : std::next(it);
        }
    }

    json out = classification_report_to_json(rep);
    int exit_code = kOk;
    if (cfg.mode != "symbolic" && cfg.dims.size() >= 3) {
        try {
            out["essential_estimate"] =
                essential_estimate_to_json(estimate_essential_spectrum(op, cfg.dims, cfg.tol));
        } catch (const Inconsistent& e) {
            out["essential_estimate_error"] = e.what();
            exit_code = kVerificationFailed;
        }
    }

    std::string summary;
    for (const auto& [name, flag] : rep.flags) summary += summary_line(name, flag);
    ensure_out_dir(cfg);
    write_text_file(out_path(cfg, "report.json"), out.dump(2) + "\n");
    write_text_file(out_path(cfg, "summary.txt"), summary);
    log(cfg, "analyze: wrote report.json, summary.txt");
    return exit_code;
}

inline int run_decompose(const RunConfig& cfg) {
    StructuredOperator op = load_operator_file(cfg.input_path);
    const std::int64_t n = cfg.dims.back();
    json out;
    ensure_out_dir(cfg);
    try {
        if (cfg.form == "positive") {
            const double alpha = resolve_essential_point(op, cfg.dims, cfg.tol);
            ComplexMatrix t = op.render(n);
            PositiveCanonicalForm f = positive_canonical_form(t, alpha, cfg.tol);
            PositiveFormVerification v = verify_positive_form(f, t, cfg.tol);
            out = positive_form_to_json(f, v);
            json analysis;
            PositiveFormAnalysis a = analyze_positive_form(f, cfg.tol);
            analysis["kernel_dim"] = a.kernel_dim;
            analysis["k1_norm"] = a.k1_norm;
            analysis["non_injective"] = a.non_injective;
            analysis["k1_norm_attains_alpha"] = a.k1_norm_attains_alpha;
            analysis["iff_consistent"] = a.iff_consistent;
            out["analysis"] = std::move(analysis);
            if (cfg.export_matrices) {
                write_text_file(out_path(cfg, "k1.csv"), matrix_csv(f.k1));
                write_text_file(out_path(cfg, "k2.csv"), matrix_csv(f.k2));
            }
        } else if (cfg.form == "quasinormal") {
            QuasinormalDecomposition d = quasinormal_decompose(op, n, cfg.tol);
            out = quasinormal_to_json(d);
        } else if (cfg.form == "hyponormal") {
            HyponormalBlockForm f = hyponormal_block_form(op, n, cfg.tol);
            out = hyponormal_form_to_json(f);
            out["normal_from_blocks"] = normality_from_blocks(f, cfg.tol);
            if (cfg.export_matrices) {
                write_text_file(out_path(cfg, "v0.csv"), matrix_csv(f.v0));
                write_text_file(out_path(cfg, "v1.csv"), matrix_csv(f.v1));
                write_text_file(out_path(cfg, "a.csv"), matrix_csv(f.a));
                write_text_file(out_path(cfg, "b.csv"), matrix_csv(f.b));
            }
        } else if (cfg.form == "adjoint") {
            AdjointBlockForm f = adjoint_block_form(op, n, cfg.tol);
            out = adjoint_form_to_json(f);
        } else {
            throw Error("unknown decomposition form: " + cfg.form);
        }
    } catch (const NotQuasinormal& e) {
        write_text_file(out_path(cfg, "decomposition.json"),
                        json{{"error", e.what()}}.dump(2) + "\n");
        return kVerificationFailed;
    } catch (const NotHyponormal& e) {
        write_text_file(out_path(cfg, "decomposition.json"),
                        json{{"error", e.what()}}.dump(2) + "\n");
        return kVerificationFailed;
    } catch (const NotPositive& e) {
        write_text_file(out_path(cfg, "decomposition.json"),
                        json{{"error", e.what()}}.dump(2) + "\n");
        return kVerificationFailed;
    }
    write_text_file(out_path(cfg, "decomposition.json"), out.dump(2) + "\n");
    log(cfg, "decompose: wrote decomposition.json");
    return kOk;
}

inline int run_verify(const RunConfig& cfg) {
    StructuredOperator op = load_operator_file(cfg.input_path);
    json out = json::object();
    bool all_ok = true;

    NormalityVerdict inv = check_invertible_normal(op, cfg.dims, cfg.tol);
    out["invertible"] = verdict_to_json(inv);
    all_ok = all_ok && inv.premise_holds && inv.conclusion_normal;

    NormalityVerdict ker = check_equal_kernels_normal(op, cfg.dims, cfg.tol);
    out["equal_kernels"] = verdict_to_json(ker);
    all_ok = all_ok && ker.premise_holds && ker.conclusion_normal;

    if (op.spectrum()) {
        NormalityVerdict weyl = check_weyl_condition_normal(op, cfg.dims, cfg.tol);
        out["weyl_equals_essential"] = verdict_to_json(weyl);
        all_ok = all_ok && weyl.premise_holds && weyl.conclusion_normal;
        // Putnam consistency on the declared spectrum
        const double bound = putnam_bound(op.spectrum()->sigma);
        const double norm = operator_norm(op.render(cfg.dims.back()));
        const double defect = interior_commutator_defect(op, cfg.dims.back(), cfg.tol);
        out["putnam"] = {{"bound", bound},
                         {"interior_defect", defect},
                         {"consistent", defect <= bound + cfg.tol.eq_tol * norm * norm}};
        all_ok = all_ok && defect <= bound + cfg.tol.eq_tol * norm * norm;
    } else {
        out["weyl_equals_essential"] = {{"skipped", "spectrum undeclared"}};
    }

    ensure_out_dir(cfg);
    write_text_file(out_path(cfg, "verify.json"), out.dump(2) + "\n");
    write_text_file(out_path(cfg, "decay.csv"),
                    decay_study_csv(commutator_decay_study(op, cfg.dims, cfg.tol)));
    log(cfg, "verify: wrote verify.json, decay.csv");
    return all_ok ? kOk : kVerificationFailed;
}

inline int run_study(const RunConfig& cfg) {
    StructuredOperator op = load_operator_file(cfg.input_path);
    std::vector<StudyRow> rows;
    for (std::size_t i = 0; i < cfg.dims.size(); ++i) {
        const std::int64_t n = cfg.dims[i];
        ComplexMatrix t = op.render(n);
        rows.push_back({n, "operator_norm", operator_norm(t)});
        try {
            rows.push_back({n, "interior_min_modulus", interior_min_modulus(op, n, cfg.tol)});
            rows.push_back(
                {n, "interior_hyponormal_defect", is_hyponormal_interior(op, n, cfg.tol).defect});
            rows.push_back(
                {n, "interior_commutator_defect", interior_commutator_defect(op, n, cfg.tol)});
        } catch (const InteriorEmpty&) {
            // dims below the margin contribute only the full-matrix metrics
        }
        rows.push_back({n, "full_commutator_defect", full_commutator_defect(t, cfg.tol)});
        if (i >= 2) {
            std::vector<std::int64_t> prefix(cfg.dims.begin(),
                                             cfg.dims.begin() + static_cast<std::ptrdiff_t>(i + 1));
            try {
                EssentialEstimate est = estimate_essential_spectrum(op, prefix, cfg.tol);
                if (!est.clusters.empty()) {
                    double center = est.clusters.front().center;
                    if (op.profile() && op.profile()->has_single_essential_point()) {
                        const double alpha = op.profile()->essential_point();
                        for (const auto& c : est.clusters)
                            if (std::abs(c.center - alpha) < std::abs(center - alpha))
                                center = c.center;
                    }
                    rows.push_back({n, "essential_estimate", center});
                }
            } catch (const Inconsistent&) {
                // reported via analyze; the study table simply omits the row
            }
        }
        if (op.profile() && op.profile()->has_single_essential_point() &&
            op.declares_class("hyponormal")) {
            try {
                HyponormalBlockForm f = hyponormal_block_form(op, n, cfg.tol);
                rows.push_back({n, "hyponormal_reassembly_defect", f.reassembly_defect});
                rows.push_back({n, "bb_bound_margin", f.bb_bound_margin});
                rows.push_back({n, "gram_identity_defect", f.gram_identity_defect});
            } catch (const Error&) {
                // decomposition unavailable at this dim; table stays sparse
            }
        }
    }
    ensure_out_dir(cfg);
    write_text_file(out_path(cfg, "study.csv"), study_csv(rows));
    log(cfg, "study: wrote study.csv");
    return kOk;
}

inline int run_generate(const RunConfig& cfg) {
    GeneratorRecipe recipe = cfg.recipe;
    recipe.seed = cfg.seed;
    StructuredOperator op = generate(recipe);
    const std::string target =
        cfg.out_file.empty() ? out_path(cfg, "generated.json") : cfg.out_file;
    if (!cfg.out_file.empty()) {
        std::filesystem::path p(cfg.out_file);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    } else {
        ensure_out_dir(cfg);
    }
    save_operator_file(op, target);
    log(cfg, "generate: wrote " + target);
    return kOk;
}

} // namespace detail

/// Entry point shared by the command line tool and in-process tests.
/// Deterministic: a fixed config (including seed) produces byte-identical
/// artifacts.
inline int run(const RunConfig& cfg) {
    try {
        cfg.validate();
        if (cfg.command == "analyze") return detail::run_analyze(cfg);
        if (cfg.command == "decompose") return detail::run_decompose(cfg);
        if (cfg.command == "verify") return detail::run_verify(cfg);
        if (cfg.command == "study") return detail::run_study(cfg);
        if (cfg.command == "generate") return detail::run_generate(cfg);
        std::cerr << "unknown command: " << cfg.command << "\n";
        return kInputError;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const RecipeInfeasible& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kVerificationFailed;
    }
}

} // namespace opspectra
