#include "test_util.hpp"

#include <doctest.h>

#include <fstream>

using namespace adaptscan;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string model_path(const std::string& name) {
    return testutil::models_dir() + "/" + name + ".com";
}

std::string golden(const std::string& name) {
    std::ifstream in(testutil::golden_dir() + "/" + name);
    REQUIRE_MESSAGE(in.good(), "missing golden file " << name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("order and markov emit byte-stable dot for every corpus model") {
    for (const char* name : {"example1", "bathtub", "viral", "nfbn", "ifflp", "ifflp_rewritten",
                             "protein", "enzyme_rewritten"}) {
        for (const char* mode : {"equilibrium", "dynamic"}) {
            ModelSpec m = testutil::load_corpus(name);
            if (std::string(mode) == "dynamic" && m.dynamics.empty()) continue;
            CliRun order = run_cli({"order", model_path(name), "--mode", mode});
            REQUIRE_MESSAGE(order.code == 0, name << " " << mode << ": " << order.err);
            CHECK(order.out ==
                  golden(std::string(name) + "_" + mode + "_order.dot"));
            CliRun markov = run_cli({"markov", model_path(name), "--mode", mode});
            REQUIRE(markov.code == 0);
            CHECK(markov.out ==
                  golden(std::string(name) + "_" + mode + "_markov.dot"));
        }
    }
}

TEST_CASE("enzyme order exits 2 with the Hall witness") {
    CliRun r = run_cli({"order", model_path("enzyme"), "--mode", "equilibrium"});
    CHECK(r.code == 2);
    CHECK(r.err.find("no perfect matching") != std::string::npos);
    CHECK(r.err.find("Hall violator") != std::string::npos);
    CHECK(r.err.find("f_CE") != std::string::npos);
}

TEST_CASE("adapt reports the protein adapting set") {
    CliRun r = run_cli({"adapt", model_path("protein"), "--input", "I"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "variable,transient,equilibrium,adapting\n"
                   "X_s,yes,no,yes\n"
                   "X_r,yes,no,yes\n"
                   "X_m,yes,no,yes\n"
                   "X_e,yes,yes,no\n");
}

TEST_CASE("dsep answers the worked queries") {
    CliRun sep = run_cli({"dsep", model_path("protein"), "--a", "I", "--b", "v_r"});
    REQUIRE(sep.code == 0);
    CHECK(sep.out == "separated\n");
    CliRun con = run_cli({"dsep", model_path("protein"), "--a", "I", "--b", "v_e"});
    CHECK(con.out == "connected\n");
    CliRun given = run_cli(
        {"dsep", model_path("protein"), "--a", "v_e", "--b", "v_m", "--given", "v_r"});
    CHECK(given.out == "separated\n");
}

TEST_CASE("indep-table emits one row per pair and conditioning set") {
    CliRun r = run_cli({"indep-table", model_path("protein"), "--max-cond", "1", "--vars",
                        "I,v_s,v_r,v_m,v_e"});
    REQUIRE(r.code == 0);
    int lines = 0;
    for (char c : r.out)
        if (c == '\n') ++lines;
    CHECK(lines == 41); // header + 40 rows
    CHECK(r.out.find("I,v_r,,yes") != std::string::npos);
    CHECK(r.out.find("I,v_e,,no") != std::string::npos);
    CHECK(r.out.find("v_s,v_m,v_r,yes") != std::string::npos);
}

TEST_CASE("sample is reproducible under a fixed seed") {
    CliRun a = run_cli({"sample", model_path("bathtub"), "--n", "12", "--seed", "7", "--dt",
                        "0.02"});
    CliRun b = run_cli({"sample", model_path("bathtub"), "--n", "12", "--seed", "7", "--dt",
                        "0.02"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("v_I,v_D,v_P,v_O,U_I,U_1,U_2,U_3,U_4,U_5", 0) == 0);
}

TEST_CASE("detect graph side emits the verdict") {
    CliRun r = run_cli({"detect", model_path("bathtub"), "--equation", "f_O"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("condition1: yes") != std::string::npos);
    CHECK(r.out.find("conclusion: adaptation_detected") != std::string::npos);

    CliRun v = run_cli({"detect", model_path("viral"), "--equation", "f_E"});
    CHECK(v.out.find("condition1: no") != std::string::npos);
    CHECK(v.out.find("condition2: yes") != std::string::npos);
    CHECK(v.out.find("v_I") != std::string::npos);
}

TEST_CASE("detect data side reads sampled csv files") {
    std::string base = "/tmp/adaptscan_base.csv", shifted = "/tmp/adaptscan_shift.csv";
    CliRun s1 = run_cli({"sample", model_path("bathtub"), "--n", "60", "--seed", "41", "--dt",
                         "0.02", "--override", "U_5~constant(0.8)", "--out", base});
    REQUIRE_MESSAGE(s1.code == 0, s1.err);
    CliRun s2 = run_cli({"sample", model_path("bathtub"), "--n", "60", "--seed", "42", "--dt",
                         "0.02", "--override", "U_5~constant(0.6)", "--out", shifted});
    REQUIRE(s2.code == 0);
    CliRun det = run_cli({"detect", model_path("bathtub"), "--target", "v_O", "--baseline",
                          base, "--intervened", shifted});
    REQUIRE_MESSAGE(det.code == 0, det.err);
    CHECK(det.out.find("condition1: yes") != std::string::npos);
    CHECK(det.out.find("conclusion: adaptation_detected") != std::string::npos);
    std::remove(base.c_str());
    std::remove(shifted.c_str());
}

TEST_CASE("usage errors exit 1, simulation of static models exits 2") {
    CliRun usage = run_cli({"order"});
    CHECK(usage.code == 1);
    CliRun no_dyn = run_cli({"simulate", model_path("ifflp_rewritten")});
    CHECK(no_dyn.code == 2);
    CliRun no_file = run_cli({"order", "/nonexistent/m.com"});
    CHECK(no_file.code == 2);
}

TEST_CASE("step command reports deviations as csv") {
    CliRun r = run_cli({"step", model_path("bathtub"), "--input", "I_K", "--pre", "1.2",
                        "--post", "0.8", "--dt", "0.01"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.rfind("variable,pre_eq,transient_peak,final_value,final_deviation,signed_change",
                      0) == 0);
    CHECK(r.out.find("X_O,") != std::string::npos);
}

TEST_SUITE_END();
