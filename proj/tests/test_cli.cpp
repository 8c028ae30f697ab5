#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "opspectra/cli.hpp"

using namespace opspectra;
namespace fs = std::filesystem;

#ifndef OPSPECTRA_DATA_DIR
#define OPSPECTRA_DATA_DIR "../data"
#endif

namespace {

std::string data_file(const std::string& name) {
    return (fs::path(OPSPECTRA_DATA_DIR) / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::path("cli_out") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

} // namespace

TEST_CASE("analyze on the bundled hyponormal example") {
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.input_path = data_file("paper_example.json");
    cfg.dims = {16, 32, 64};
    cfg.out_dir = fresh_dir("analyze_example").string();
    CHECK(run(cfg) == kOk);

    json rep = json::parse(slurp(cfg.out_dir + "/report.json"));
    CHECK(rep["flags"]["hyponormal_interior"]["holds"] == true);
    CHECK(rep["flags"]["quasinormal"]["holds"] == false);
    CHECK(rep["flags"]["closure_an_membership"]["holds"] == true);
    CHECK(rep["flags"]["am_membership"]["holds"] == true);
    CHECK(rep["flags"]["an_membership"]["holds"] == false);
    CHECK(rep.contains("essential_estimate"));
    CHECK(std::abs(rep["essential_estimate"]["clusters"][0]["center"].get<double>() - 1.0) <=
          1e-6);
}

TEST_CASE("analyze on the identity: everything holds") {
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.input_path = data_file("identity.json");
    cfg.dims = {8};
    cfg.out_dir = fresh_dir("analyze_identity").string();
    CHECK(run(cfg) == kOk);
    json rep = json::parse(slurp(cfg.out_dir + "/report.json"));
    for (const char* flag : {"normal", "selfadjoint", "positive", "quasinormal",
                             "hyponormal_full", "paranormal", "an_membership", "am_membership",
                             "closure_an_membership"})
        CHECK(rep["flags"][flag]["holds"] == true);
}

TEST_CASE("analyze modes filter the report") {
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.input_path = data_file("paper_example.json");
    cfg.dims = {24};
    cfg.mode = "symbolic";
    cfg.out_dir = fresh_dir("analyze_symbolic").string();
    CHECK(run(cfg) == kOk);
    json rep = json::parse(slurp(cfg.out_dir + "/report.json"));
    CHECK(rep["flags"].contains("closure_an_membership"));
    CHECK_FALSE(rep["flags"].contains("normal"));

    cfg.mode = "numeric";
    cfg.out_dir = fresh_dir("analyze_numeric").string();
    CHECK(run(cfg) == kOk);
    rep = json::parse(slurp(cfg.out_dir + "/report.json"));
    CHECK(rep["flags"].contains("normal"));
    CHECK_FALSE(rep["flags"].contains("closure_an_membership"));
}

TEST_CASE("decompose --form hyponormal reports the coupling entry") {
    RunConfig cfg;
    cfg.command = "decompose";
    cfg.form = "hyponormal";
    cfg.input_path = data_file("paper_example.json");
    cfg.dims = {64};
    cfg.export_matrices = true;
    cfg.out_dir = fresh_dir("decompose_example").string();
    CHECK(run(cfg) == kOk);
    json rep = json::parse(slurp(cfg.out_dir + "/decomposition.json"));
    CHECK(rep["h1_dim"] == 32);
    CHECK(rep["h2_dim"] == 32);
    CHECK(rep["normal_from_blocks"] == false);
    CHECK(std::abs(rep["a_max_entry"].get<double>() - 0.7071067811865476) <= 1e-15);
    // exported CSV has the frozen row,col,re,im schema
    std::string a_csv = slurp(cfg.out_dir + "/a.csv");
    CHECK(a_csv.rfind("row,col,re,im\n", 0) == 0);
    CHECK(a_csv.find("0.70710678118654757") != std::string::npos);
}

TEST_CASE("decompose rejects a non-quasinormal operator with exit 1") {
    RunConfig cfg;
    cfg.command = "decompose";
    cfg.form = "quasinormal";
    cfg.input_path = data_file("paper_example.json");
    cfg.dims = {32};
    cfg.out_dir = fresh_dir("decompose_fail").string();
    CHECK(run(cfg) == kVerificationFailed);
}

TEST_CASE("verify on the shift: premise failures, exit 1, defect persists") {
    RunConfig cfg;
    cfg.command = "verify";
    cfg.input_path = data_file("shift.json");
    cfg.dims = {16, 32};
    cfg.out_dir = fresh_dir("verify_shift").string();
    CHECK(run(cfg) == kVerificationFailed);
    json rep = json::parse(slurp(cfg.out_dir + "/verify.json"));
    CHECK(rep["invertible"]["premise_holds"] == false);
    CHECK(rep["equal_kernels"]["premise_holds"] == false);
    CHECK(rep["weyl_equals_essential"]["premise_holds"] == false);
    CHECK(std::abs(rep["weyl_equals_essential"]["commutator_defect"].get<double>() - 1.0) <=
          1e-12);
    // Putnam is sharp on the shift: defect 1 against disk area / pi = 1
    CHECK(rep["putnam"]["bound"] == 1.0);
    CHECK(rep["putnam"]["consistent"] == true);
    // the decay table rides along with its own wide schema
    std::string decay = slurp(cfg.out_dir + "/decay.csv");
    CHECK(decay.rfind("n,full_defect,interior_defect\n", 0) == 0);
    CHECK(decay.find("\n16,1,1\n") != std::string::npos);
}

TEST_CASE("verify on the identity: all premises and conclusions hold") {
    RunConfig cfg;
    cfg.command = "verify";
    cfg.input_path = data_file("identity.json");
    cfg.dims = {8, 16};
    cfg.out_dir = fresh_dir("verify_identity").string();
    CHECK(run(cfg) == kOk);
    json rep = json::parse(slurp(cfg.out_dir + "/verify.json"));
    CHECK(rep["invertible"]["conclusion_normal"] == true);
    CHECK(rep["equal_kernels"]["conclusion_normal"] == true);
    CHECK(rep["weyl_equals_essential"]["conclusion_normal"] == true);
}

TEST_CASE("study emits the frozen long-format CSV") {
    RunConfig cfg;
    cfg.command = "study";
    cfg.input_path = data_file("paper_example.json");
    cfg.dims = {16, 32, 64};
    cfg.out_dir = fresh_dir("study_example").string();
    CHECK(run(cfg) == kOk);
    std::string csv = slurp(cfg.out_dir + "/study.csv");
    CHECK(csv.rfind("n,metric,value\n", 0) == 0);
    CHECK(csv.find("essential_estimate") != std::string::npos);
    CHECK(csv.find("bb_bound_margin") != std::string::npos);
    CHECK(csv.find("\r") == std::string::npos);  // LF endings only
}

TEST_CASE("determinism: identical configs give byte-identical artifacts") {
    for (const char* cmd : {"analyze", "study"}) {
        RunConfig cfg;
        cfg.command = cmd;
        cfg.input_path = data_file("paper_example.json");
        cfg.dims = {16, 32, 48};
        cfg.seed = 7;
        cfg.out_dir = fresh_dir(std::string("det_a_") + cmd).string();
        REQUIRE(run(cfg) == kOk);
        RunConfig cfg2 = cfg;
        cfg2.out_dir = fresh_dir(std::string("det_b_") + cmd).string();
        REQUIRE(run(cfg2) == kOk);
        for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
            const std::string name = entry.path().filename().string();
            CHECK(slurp(cfg.out_dir + "/" + name) == slurp(cfg2.out_dir + "/" + name));
        }
    }
}

TEST_CASE("generated operators round-trip through the file format") {
    RunConfig cfg;
    cfg.command = "generate";
    cfg.recipe.klass = "quasinormal-AN";
    cfg.recipe.dim = 12;
    cfg.seed = 3;
    cfg.out_file = (fresh_dir("generate") / "op.json").string();
    CHECK(run(cfg) == kOk);
    StructuredOperator op = load_operator_file(cfg.out_file);
    CHECK(op.declares_class("quasinormal"));
    CHECK(parse_operator(serialize_operator(op)) == op);
}

TEST_CASE("input errors exit with code 2") {
    RunConfig cfg;
    cfg.command = "analyze";
    cfg.out_dir = fresh_dir("bad_input").string();
    cfg.input_path = (fs::path(cfg.out_dir) / "garbage.json").string();
    {
        std::ofstream out(cfg.input_path);
        out << "{ not json";
    }
    CHECK(run(cfg) == kInputError);

    RunConfig gen;
    gen.command = "generate";
    gen.recipe.klass = "quasinormal-AN";
    gen.recipe.lower_infinite = true;  // infeasible
    gen.out_file = (fs::path(cfg.out_dir) / "never.json").string();
    CHECK(run(gen) == kInputError);
}
