// Apache License, Version 2.0, refer to LICENSE.txt
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

namespace fs = std::filesystem;

std::string g_cli;  // set from argv in main below

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    auto log = fs::temp_directory_path() / "hiercpt_tests" / "cli_log.txt";
    fs::create_directories(log.parent_path());
    std::string cmd = g_cli + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(status), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("mse-bench writes the documented schema with one row per repetition") {
    auto dir = testutil::temp_dir("bench1");
    auto res = run_cli("mse-bench --test 1 --r 2 --q 2 --n 20 --reps 2 --seed 7 --samples 2000 "
                       "--output " + dir);
    REQUIRE(res.exit_code == 0);
    auto csv = slurp(dir + "/mse_bench.csv");
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "test,r,q,n,repetition,mse_bayes,mse_hier,diff,ess,n_samples");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    REQUIRE(rows == 2);
}

TEST_CASE("identical invocations produce byte-identical output") {
    auto dir1 = testutil::temp_dir("bench_det1");
    auto dir2 = testutil::temp_dir("bench_det2");
    std::string args = "mse-bench --test 2 --r 2 --q 2 --n 20 --reps 2 --seed 9 --samples 2000";
    REQUIRE(run_cli(args + " --output " + dir1).exit_code == 0);
    REQUIRE(run_cli(args + " --output " + dir2).exit_code == 0);
    REQUIRE(slurp(dir1 + "/mse_bench.csv") == slurp(dir2 + "/mse_bench.csv"));
}

TEST_CASE("rerun from the echoed config reproduces the table, flags override") {
    auto dir1 = testutil::temp_dir("cfg1");
    auto dir2 = testutil::temp_dir("cfg2");
    auto dir3 = testutil::temp_dir("cfg3");
    REQUIRE(run_cli("mse-bench --test 1 --r 2 --q 2 --n 20 --reps 2 --seed 5 --samples 2000 "
                    "--output " + dir1).exit_code == 0);
    REQUIRE(run_cli("mse-bench --config " + dir1 + "/config.json --output " + dir2)
                .exit_code == 0);
    REQUIRE(slurp(dir1 + "/mse_bench.csv") == slurp(dir2 + "/mse_bench.csv"));

    // an explicit flag beats the config value
    REQUIRE(run_cli("mse-bench --config " + dir1 + "/config.json --reps 3 --output " + dir3)
                .exit_code == 0);
    std::istringstream in(slurp(dir3 + "/mse_bench.csv"));
    std::string line;
    int rows = -1;  // header
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    REQUIRE(rows == 3);
}

TEST_CASE("config file for the wrong command is rejected") {
    auto dir = testutil::temp_dir("cfg_wrong");
    REQUIRE(run_cli("mse-bench --test 1 --r 2 --q 2 --n 20 --reps 1 --samples 2000 --output " +
                    dir).exit_code == 0);
    auto res = run_cli("loglik-exp --config " + dir + "/config.json --output " + dir);
    REQUIRE(res.exit_code == 3);
}

TEST_CASE("validate prints per-fixture diffs under tolerance") {
    auto res = run_cli("validate --samples 5000 --fixtures 4 --seed 1");
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.output.find("PASS") != std::string::npos);
    REQUIRE(res.output.find("|diff|=") != std::string::npos);
    REQUIRE(res.output.find("all fixtures PASS") != std::string::npos);
}

TEST_CASE("discretize emits codes, variable metadata and the cut-point sidecar") {
    std::string csv = "height,color\n1,red\n2,red\n3,blue\n4,blue\n5,red\n6,blue\n";
    auto input = testutil::write_temp_file("disc_input.csv", csv);
    auto dir = testutil::temp_dir("disc_out");
    auto res = run_cli("discretize --input " + input + " --schema n,c --bins 3 --output " + dir);
    REQUIRE(res.exit_code == 0);
    auto data = slurp(dir + "/data.csv");
    REQUIRE(data.rfind("height,color\n", 0) == 0);
    auto cuts = slurp(dir + "/cutpoints.txt");
    REQUIRE(cuts.find("height 2 4") == 0);
    auto vars = slurp(dir + "/vars.csv");
    REQUIRE(vars.find("color,2,") != std::string::npos);
}

TEST_CASE("fit writes one CPT file per node and hier diagnostics") {
    std::string csv = "a,b\n0,0\n0,1\n1,0\n0,0\n1,1\n0,1\n";
    auto input = testutil::write_temp_file("fit_input.csv", csv);
    auto dag = testutil::write_temp_file("fit_dag.txt", "a |\nb | a\n");
    auto dir = testutil::temp_dir("fit_out");
    auto res = run_cli("fit --input " + input + " --dag " + dag +
                       " --method hier --samples 2000 --seed 3 --output " + dir);
    REQUIRE(res.exit_code == 0);
    REQUIRE(fs::exists(dir + "/cpt_a.csv"));
    REQUIRE(fs::exists(dir + "/cpt_b.csv"));
    REQUIRE(fs::exists(dir + "/alpha_posteriors.json"));
    auto cpt = slurp(dir + "/cpt_b.csv");
    REQUIRE(cpt.rfind("# method=HIER", 0) == 0);

    auto res2 = run_cli("fit --input " + input + " --dag " + dag +
                        " --method bdeu --s 10 --output " + testutil::temp_dir("fit_out2"));
    REQUIRE(res2.exit_code == 0);
}

TEST_CASE("loglik-exp synthetic mode emits the documented schema") {
    auto dir = testutil::temp_dir("loglik_out");
    auto res = run_cli("loglik-exp --n 20 --reps 2 --samples 2000 --n-test 100 --seed 3 "
                       "--output " + dir);
    REQUIRE(res.exit_code == 0);
    auto csv = slurp(dir + "/loglik.csv");
    REQUIRE(csv.rfind("n,rep,method,log_lik,n_test\n", 0) == 0);
    REQUIRE(csv.find("hier") != std::string::npos);
    REQUIRE(csv.find("bdeu-s1") != std::string::npos);
    REQUIRE(csv.find("bdeu-s10") != std::string::npos);
}

TEST_CASE("classify-exp synthetic mode emits accuracy and auc rows") {
    auto dir = testutil::temp_dir("classify_out");
    auto res = run_cli("classify-exp --n 20 --reps 1 --samples 2000 --n-test 100 --seed 5 "
                       "--output " + dir);
    REQUIRE(res.exit_code == 0);
    auto csv = slurp(dir + "/classify.csv");
    REQUIRE(csv.rfind("n,rep,method,accuracy,auc,n_test\n", 0) == 0);
}

TEST_CASE("error paths map to distinct exit codes") {
    REQUIRE(run_cli("no-such-command").exit_code == 2);
    REQUIRE(run_cli("mse-bench --bogus-flag 1").exit_code == 2);
    // missing file -> io error
    auto dir = testutil::temp_dir("err_out");
    REQUIRE(run_cli("fit --input /nonexistent.csv --dag /nonexistent.dag --output " + dir)
                .exit_code == 4);
    // bad schema -> config error
    auto input = testutil::write_temp_file("err.csv", "a\n1\n2\n");
    REQUIRE(run_cli("discretize --input " + input + " --schema z --output " + dir)
                .exit_code == 3);
}

TEST_CASE("help text documents commands and exit codes") {
    auto res = run_cli("--help");
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.output.find("mse-bench") != std::string::npos);
    REQUIRE(res.output.find("Exit codes") != std::string::npos);
}

int main(int argc, char* argv[]) {
    std::vector<char*> filtered;
    filtered.push_back(argv[0]);
    for (int i = 1; i < argc; ++i) {
        if (g_cli.empty() && argv[i][0] != '-') {
            g_cli = argv[i];
        } else {
            filtered.push_back(argv[i]);
        }
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: cli_tests <path-to-hiercpt-binary> [catch2 args]\n");
        return 2;
    }
    return Catch::Session().run(static_cast<int>(filtered.size()), filtered.data());
}
