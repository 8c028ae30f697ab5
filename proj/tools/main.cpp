// Command line front end: parse operator spec files, run classification,
// decomposition and normality pipelines, generate randomized operator
// families, and emit JSON/CSV reports.

#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opspectra/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"opspectra: numerical laboratory for operator structure on l2(N)"};
    app.require_subcommand(1);

    opspectra::RunConfig cfg;
    if (const char* lvl = std::getenv("OPSPEC_LOG")) cfg.verbosity = std::atoi(lvl);

    auto add_common = [&](CLI::App* sub, bool with_input) {
        if (with_input)
            sub->add_option("input", cfg.input_path, "operator spec file (JSON)")->required();
        sub->add_option("--dims", cfg.dims, "ascending truncation dimensions")
            ->delimiter(',');
        sub->add_option("--tol-eq", cfg.tol.eq_tol, "relative equality tolerance");
        sub->add_option("--tol-psd", cfg.tol.psd_tol, "relative PSD tolerance");
        sub->add_option("--seed", cfg.seed, "PRNG seed");
        sub->add_option("--out", cfg.out_dir, "output directory");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "classify an operator");
    add_common(analyze, true);
    analyze->add_option("--mode", cfg.mode, "symbolic | numeric | both")
        ->check(CLI::IsMember({"symbolic", "numeric", "both"}));

    CLI::App* decompose = app.add_subcommand("decompose", "compute a canonical form");
    add_common(decompose, true);
    decompose->add_option("--form", cfg.form, "positive | quasinormal | hyponormal | adjoint")
        ->check(CLI::IsMember({"positive", "quasinormal", "hyponormal", "adjoint"}));
    decompose->add_flag("--export-matrices", cfg.export_matrices,
                        "also write block matrices as row,col,re,im CSV");

    CLI::App* verify = app.add_subcommand("verify", "run the normality criteria");
    add_common(verify, true);

    CLI::App* study = app.add_subcommand("study", "convergence study across dims");
    add_common(study, true);

    CLI::App* generate = app.add_subcommand("generate", "emit a randomized operator spec");
    generate->add_option("--class", cfg.recipe.klass,
                         "positive-closureAN | quasinormal-AN | quasinormal-AM | "
                         "quasinormal-closure | hyponormal-closure | normal | finite-random")
        ->required();
    generate->add_option("--dim", cfg.recipe.dim, "target finite dimension");
    generate->add_option("--upper", cfg.recipe.upper_count, "discrete points above alpha");
    generate->add_option("--lower", cfg.recipe.lower_count, "discrete points below alpha");
    generate->add_option("--alpha-min", cfg.recipe.alpha_min, "essential point range, low");
    generate->add_option("--alpha-max", cfg.recipe.alpha_max, "essential point range, high");
    generate->add_flag("--force-kernel", cfg.recipe.force_kernel, "include a zero eigenvalue");
    generate->add_flag("--lower-infinite", cfg.recipe.lower_infinite,
                       "countable lower family (AM/closure classes)");
    generate->add_flag("--essential-isometry", cfg.recipe.essential_isometry,
                       "proper isometry on the essential block");
    generate->add_option("--seed", cfg.seed, "PRNG seed");
    generate->add_option("--out", cfg.out_file, "output spec file")->required();

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) cfg.command = "analyze";
    else if (decompose->parsed()) cfg.command = "decompose";
    else if (verify->parsed()) cfg.command = "verify";
    else if (study->parsed()) cfg.command = "study";
    else cfg.command = "generate";

    return opspectra::run(cfg);
}
