#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "spl/delta.hpp"

namespace {

const std::string kCli = SPL_CLI_PATH;

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string out_file = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                                 "/spl_cli_test_out.txt";
    const std::string cmd = kCli + " " + args + " > " + out_file + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult result;
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream f(out_file);
    std::stringstream ss;
    ss << f.rdbuf();
    result.out = ss.str();
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kInlineSpec =
    "'{\"m\": 12, \"r\": 1, \"sigma\": 1.0, "
    "\"family\": {\"type\": \"step\", \"alpha\": 3.0, \"beta\": 1.0}, "
    "\"rotation\": {\"mode\": \"haar\", \"seed\": 5}}'";

}  // namespace

TEST_CASE("cli delta: deterministic output, seed flag beats the environment") {
    const RunResult a = run(std::string("delta --spec ") + kInlineSpec + " --reps 100 --seed 7");
    REQUIRE(a.status == 0);
    CHECK(a.out.find("delta_mean") != std::string::npos);
    const RunResult b = run(std::string("delta --spec ") + kInlineSpec + " --reps 100 --seed 7");
    CHECK(a.out == b.out);

    const std::string out_file = "/tmp/spl_cli_env_test.txt";
    const std::string cmd = "SPL_SEED=7 " + kCli + " delta --spec " + kInlineSpec +
                            " --reps 100 > " + out_file + " 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp(out_file) == a.out);
}

TEST_CASE("cli delta output is identical for any worker count") {
    const std::string base = std::string("delta --spec ") + kInlineSpec + " --reps 200 --seed 3";
    const RunResult one = run(base + " --threads 1");
    const RunResult many = run(base + " --threads 3");
    const RunResult automatic = run(base + " --threads auto");
    REQUIRE(one.status == 0);
    CHECK(one.out == many.out);
    CHECK(one.out == automatic.out);
}

TEST_CASE("cli exit codes") {
    CHECK(run("delta").status == 2);                         // missing --spec
    CHECK(run("delta --spec x.json --bogus 1").status == 2);  // unknown flag
    CHECK(run("nonsense").status == 2);

    const RunResult bad_json = run("delta --spec '{\"m\": 3,'");
    CHECK(bad_json.status == 3);
    CHECK(bad_json.out.find("line") != std::string::npos);
    CHECK(bad_json.out.find("column") != std::string::npos);

    const RunResult bad_schema =
        run("delta --spec '{\"m\": 3, \"r\": 9, \"sigma\": 1, \"family\": {\"type\": \"zero\"}}'");
    CHECK(bad_schema.status == 3);

    CHECK(run("delta --spec /nonexistent/spec.json").status == 4);
    CHECK(run(std::string("delta --spec ") + kInlineSpec +
              " --reps 50 --out /nonexistent/dir/out.csv")
              .status == 4);

    CHECK(run("--help").status == 0);
    CHECK(run("suite --name no-such-suite --seed 1").status == 2);
}

TEST_CASE("cli sweep writes the pinned schema") {
    const std::string out_file = "/tmp/spl_cli_sweep_test.csv";
    const RunResult res = run(std::string("sweep --spec ") + kInlineSpec +
                              " --param alpha --grid 1,2,4 --reps 60 --seed 5 --out " + out_file);
    REQUIRE(res.status == 0);
    const spl::CsvTable table = spl::read_csv_table(out_file);
    std::stringstream header(spl::kSweepCsvHeader);
    std::string col;
    std::vector<std::string> expected;
    while (std::getline(header, col, ',')) expected.push_back(col);
    CHECK(table.header == expected);
    CHECK(table.rows.size() == 3);
    std::remove(out_file.c_str());
}

TEST_CASE("cli bounds and baseline emit well-formed artifacts") {
    const RunResult bounds = run(std::string("bounds --spec ") + kInlineSpec + " --format json");
    REQUIRE(bounds.status == 0);
    CHECK(bounds.out.find("universal_kernel") != std::string::npos);
    CHECK(bounds.out.find("step_kernel") != std::string::npos);

    const RunResult baseline = run("baseline --m 16 --r 1 --sigma 1 --reps 100 --seed 2");
    REQUIRE(baseline.status == 0);
    CHECK(baseline.out.find("zero") != std::string::npos);

    const RunResult pack = run("pack --m 4 --r 1 --radius 1.0 --budget 500 --seed 2");
    REQUIRE(pack.status == 0);
    CHECK(pack.out.find("centers") != std::string::npos);

    const RunResult incl = run(std::string("verify-inclusions --spec ") + kInlineSpec +
                               " --samples 500 --seed 2");
    REQUIRE(incl.status == 0);
    CHECK(incl.out.find("\"upper_violations\": 0") != std::string::npos);

    const RunResult est =
        run(std::string("estimate --spec ") + kInlineSpec + " --reps 100 --seed 2");
    REQUIRE(est.status == 0);
    CHECK(est.out.find("quadratic_naive") != std::string::npos);
}
