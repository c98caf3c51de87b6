// Integration tests for the CLI surface: file formats, exit codes,
// determinism. Each test shells out to the built binary.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifndef FXL_CLI_PATH
#error "FXL_CLI_PATH must point at the built binary"
#endif

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string out_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/fxl_cli_out.txt";
    std::string cmd = std::string(FXL_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    int status = std::system(cmd.c_str());
    std::ifstream f(out_path);
    std::stringstream ss;
    ss << f.rdbuf();
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) {
    return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
}

} // namespace

TEST_CASE("keystream files are deterministic and block-formatted") {
    auto a = run("keystream toy3 --seed 99 --t 150 --out " + tmp("ks_a.txt") + " --state-out " + tmp("st_a.json"));
    auto b = run("keystream toy3 --seed 99 --t 150 --out " + tmp("ks_b.txt") + " --state-out " + tmp("st_b.json"));
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    std::string ka = slurp(tmp("ks_a.txt"));
    REQUIRE(ka == slurp(tmp("ks_b.txt")));
    REQUIRE(slurp(tmp("st_a.json")) == slurp(tmp("st_b.json")));

    // 150 bits: two 64-char lines plus a 22-char remainder, newline-closed.
    std::istringstream lines(ka);
    std::string line;
    std::vector<std::size_t> lens;
    while (std::getline(lines, line)) lens.push_back(line.size());
    REQUIRE(lens == std::vector<std::size_t>{64, 64, 22});
    for (char c : ka) REQUIRE((c == '0' || c == '1' || c == '\n'));

    auto different = run("keystream toy3 --seed 100 --t 150 --out " + tmp("ks_c.txt") + " --state-out " +
                         tmp("st_c.json"));
    REQUIRE(different.exit_code == 0);
    REQUIRE(slurp(tmp("ks_c.txt")) != ka);
}

TEST_CASE("keystream with t = 0 writes an empty file") {
    auto r = run("keystream toy3 --seed 1 --t 0 --out " + tmp("ks_0.txt") + " --state-out " + tmp("st_0.json"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(slurp(tmp("ks_0.txt")).empty());
}

TEST_CASE("table1 emits the expected CSV rows") {
    auto r = run("table1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("D,log2_t,log2_complexity,k_prime,t,T,feasible") != std::string::npos);
    REQUIRE(r.out.find("4,19.31,77.06,287,648353,186077256,no") != std::string::npos);
    REQUIRE(r.out.find("5,17.84,92.98,40502,235256,9528327432,yes") != std::string::npos);
    REQUIRE(r.out.find("6,16.72,108.15,3756585,107816,405016918216,yes") != std::string::npos);
    REQUIRE(r.out.find("7,15.80,122.68,258089371,56954,14699104556552,no") != std::string::npos);
}

TEST_CASE("analyze reports the toy3 numbers as JSON") {
    auto r = run("--json analyze toy3 --D 5");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    REQUIRE(j.at("tool") == "fxl");
    REQUIRE(j.at("algebraic_immunity") == 3);
    REQUIRE(j.at("gb").at("side0").at("count") == 31);
    REQUIRE(j.at("independent_set").at("side1").at("count") == 56);
    REQUIRE(j.at("estimate").at("k0") == "637");
    REQUIRE(j.at("estimate").at("t") == "44");
    REQUIRE(j.at("estimate").at("feasibility") == "feasible");
    REQUIRE(j.contains("wall_seconds"));
}

TEST_CASE("analyze at D = 4 on wg-prng is infeasible by keystream") {
    auto r = run("--json analyze wg-prng --D 4");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    REQUIRE(j.at("estimate").at("k0") == "287");
    std::string verdict = j.at("estimate").at("feasibility");
    REQUIRE(verdict.find("infeasible") != std::string::npos);
}

TEST_CASE("attack round-trip through files, exit code 0 on exact recovery") {
    auto ks = run("keystream toy3 --seed 7 --t 155 --out " + tmp("ks_rt.txt") + " --state-out " + tmp("st_rt.json"));
    REQUIRE(ks.exit_code == 0);
    auto atk = run("--json attack toy3 --keystream " + tmp("ks_rt.txt") + " --D 4 --expect " + tmp("st_rt.json"));
    REQUIRE(atk.exit_code == 0);
    json j = json::parse(atk.out);
    REQUIRE(j.at("status") == "unique");
    REQUIRE(j.at("recovery_matches_sealed") == true);
    REQUIRE(j.at("rank") == 6160);

    json sealed = json::parse(slurp(tmp("st_rt.json")));
    REQUIRE(j.at("state_hex") == sealed.at("state_hex"));
}

TEST_CASE("attack on truncated keystream fails with exit code 2") {
    run("keystream toy3 --seed 8 --t 10 --out " + tmp("ks_short.txt") + " --state-out " + tmp("st_short.json"));
    auto atk = run("attack toy3 --keystream " + tmp("ks_short.txt") + " --D 4");
    REQUIRE(atk.exit_code == 2);
}

TEST_CASE("resource guard trips before work starts, exit code 3") {
    run("keystream toy3 --seed 9 --t 155 --out " + tmp("ks_guard.txt") + " --state-out " + tmp("st_guard.json"));
    auto atk = run("--memory-cap 1m attack toy3 --keystream " + tmp("ks_guard.txt") + " --D 4");
    REQUIRE(atk.exit_code == 3);
    REQUIRE(atk.out.find("memory-cap") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
    REQUIRE(run("analyze no-such-cipher").exit_code == 1);
    REQUIRE(run("keystream wg-prng --t 300000 --enforce-limit --out " + tmp("x.txt") + " --state-out " +
                tmp("y.json"))
                .exit_code == 1);
    REQUIRE(run("attack toy3 --keystream /nonexistent/path --D 4").exit_code == 1);
}

TEST_CASE("selftest passes") {
    auto r = run("selftest");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("selftest ok") != std::string::npos);
}

TEST_CASE("custom cipher spec file flows through analyze") {
    std::string cfg = tmp("mini.cfg");
    {
        std::ofstream f(cfg);
        f << "name = mini\na = 3\nfeedback_taps = 1\nomega_tap = 0\nfilter_word = 2\nfilter = WGT13\n";
    }
    auto r = run("--json analyze " + cfg + " --D 4");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    REQUIRE(j.at("estimate").at("cipher") == "mini");

    std::string bad = tmp("bad.cfg");
    {
        std::ofstream f(bad);
        f << "a = 3\nfeedback_taps = 1\nfilter = x1*x2+\n";
    }
    auto rb = run("analyze " + bad + " --D 4");
    REQUIRE(rb.exit_code == 1);
    REQUIRE(rb.out.find("bad.cfg:3") != std::string::npos);
}
