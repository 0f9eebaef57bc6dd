#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "helpers.hpp"

#include "cncube/cnf.hpp"
#include "cncube/conquer.hpp"
#include "cncube/gen.hpp"

namespace fs = std::filesystem;
using namespace cnc;

namespace {

std::string binary_path() {
    const char* env = std::getenv("CNCUBE_BIN");
    REQUIRE_MESSAGE(env != nullptr, "CNCUBE_BIN must point at the cncube binary");
    return env;
}

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

CmdResult run_cmd(const std::string& args) {
    const std::string full = binary_path() + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(full.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult res;
    char buf[4096];
    while (size_t got = ::fread(buf, 1, sizeof buf, pipe)) res.out.append(buf, got);
    const int rc = ::pclose(pipe);
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return res;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cncube-cli-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string stats_value(const std::string& stats_text, const std::string& key) {
    std::istringstream in(stats_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + " ", 0) == 0) return line.substr(key.size() + 1);
    }
    return "";
}

}  // namespace

TEST_CASE("cube requires -n and a readable input") {
    TempDir dir;
    const std::string cnf = dir.file("f.cnf");
    write_file(cnf, "p cnf 2 2\n1 2 0\n-1 2 0\n");

    CHECK(run_cmd("cube " + cnf).exit_code == 2);                  // missing -n
    CHECK(run_cmd("cube " + dir.file("nope.cnf") + " -n 4").exit_code == 1);
    CHECK(run_cmd("cube " + cnf + " -n 4 --bogus").exit_code == 2);
    CHECK(run_cmd("cube " + cnf + " -n 4 --mode sideways").exit_code == 2);
    CHECK(run_cmd("frobnicate").exit_code == 2);
}

TEST_CASE("cube writes icnf output and a consistent stats document") {
    TempDir dir;
    const std::string cnf = dir.file("f.cnf");
    {
        RandomCnfConfig gcfg;
        gcfg.num_vars = 24;
        gcfg.seed = 5;
        std::ofstream out(cnf);
        write_dimacs(random_ksat(gcfg), out);
    }
    const std::string icnf = dir.file("f.icnf");
    const std::string stats = dir.file("stats.txt");
    CmdResult r = run_cmd("cube " + cnf + " -n 12 -o " + icnf + " --stats " + stats);
    CHECK(r.exit_code == 0);

    const std::string cubes_text = read_file(icnf);
    CHECK(cubes_text.rfind("p inccnf\n", 0) == 0);

    // Stats cube counts equal the iCNF line counts.
    std::istringstream lines(cubes_text);
    std::string line;
    int open_lines = 0;
    int refuted_lines = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("a ", 0) == 0) ++open_lines;
        if (line.rfind("c refuted a ", 0) == 0) ++refuted_lines;
    }
    const std::string stats_text = read_file(stats);
    CHECK(stats_value(stats_text, "open_cubes") == std::to_string(open_lines));
    CHECK(stats_value(stats_text, "refuted_cubes") == std::to_string(refuted_lines));
    CHECK(stats_value(stats_text, "mode") == "mcts");
    CHECK(stats_value(stats_text, "n") == "12");
}

TEST_CASE("cube output is deterministic for fixed flags and seed") {
    TempDir dir;
    const std::string cnf = dir.file("f.cnf");
    {
        RandomCnfConfig gcfg;
        gcfg.num_vars = 30;
        gcfg.seed = 6;
        std::ofstream out(cnf);
        write_dimacs(random_ksat(gcfg), out);
    }
    const std::string a = dir.file("a.icnf");
    const std::string b = dir.file("b.icnf");
    CHECK(run_cmd("cube " + cnf + " -n 14 --seed 3 -o " + a).exit_code == 0);
    CHECK(run_cmd("cube " + cnf + " -n 14 --seed 3 -o " + b).exit_code == 0);
    CHECK(read_file(a) == read_file(b));
}

TEST_CASE("conquer reports the SAT discipline with matching exit codes") {
    TempDir dir;
    const std::string unsat_cnf = dir.file("u.cnf");
    write_file(unsat_cnf, "p cnf 1 2\n1 0\n-1 0\n");
    const std::string cubes = dir.file("u.icnf");
    write_file(cubes, "p inccnf\na 1 0\na -1 0\n");
    CmdResult r = run_cmd("conquer " + unsat_cnf + " " + cubes);
    CHECK(r.exit_code == 20);
    CHECK(r.out.find("s UNSATISFIABLE\n") != std::string::npos);

    const std::string sat_cnf = dir.file("s.cnf");
    write_file(sat_cnf, "p cnf 3 3\n1 2 0\n-1 2 0\n-2 3 0\n");
    r = run_cmd("conquer " + sat_cnf + " " + cubes);
    CHECK(r.exit_code == 10);
    REQUIRE(r.out.find("s SATISFIABLE\n") != std::string::npos);

    // The printed model must satisfy the formula.
    std::istringstream lines(r.out);
    std::string line;
    std::vector<int8_t> model(4, 0);
    while (std::getline(lines, line)) {
        if (line.rfind("v ", 0) != 0) continue;
        std::istringstream ls(line.substr(2));
        int lit = 0;
        while (ls >> lit && lit != 0)
            model[static_cast<size_t>(std::abs(lit))] = lit > 0 ? 1 : -1;
    }
    CnfFormula f = cnc::test::formula_a();
    CHECK(verify_model(f, model));

    const std::string bad = dir.file("bad.icnf");
    write_file(bad, "a 1 0\n");  // missing header
    CHECK(run_cmd("conquer " + sat_cnf + " " + bad).exit_code == 1);
}

TEST_CASE("solve composes cubing and conquering") {
    TempDir dir;
    const std::string cnf = dir.file("f.cnf");
    write_file(cnf, "p cnf 3 3\n1 2 0\n-1 2 0\n-2 3 0\n");
    const std::string stats = dir.file("stats.txt");
    CmdResult r = run_cmd("solve " + cnf + " -n 2 --stats " + stats);
    CHECK(r.exit_code == 10);
    CHECK(r.out.find("s SATISFIABLE\n") != std::string::npos);
    const std::string stats_text = read_file(stats);
    CHECK(stats_value(stats_text, "result") == "SAT");
    CHECK(!stats_value(stats_text, "conquer_decisions").empty());
    CHECK(!stats_value(stats_text, "open_cubes").empty());

    const std::string unsat_cnf = dir.file("u.cnf");
    write_file(unsat_cnf, "p cnf 1 2\n1 0\n-1 0\n");
    CHECK(run_cmd("solve " + unsat_cnf + " -n 2").exit_code == 20);
}

TEST_CASE("bench runs both modes and prints the aggregate ratio") {
    CmdResult r = run_cmd(
        "bench --instances random --random-k 2 --vars 20 --ratio 4.2 --n 10 "
        "--seeds 1,2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("geomean_effort_ratio") != std::string::npos);
    // 2 instances x 2 modes x 2 seeds = 8 measurement rows.
    int rows = 0;
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line))
        if (line.find(" mcts ") != std::string::npos ||
            line.find(" greedy ") != std::string::npos)
            ++rows;
    CHECK(rows == 8);

    CHECK(run_cmd("bench --instances random --random-k 0 --n 5").exit_code == 2);
    CHECK(run_cmd("bench --n 5").exit_code == 2);
}

TEST_CASE("bench over a directory with one instance") {
    TempDir dir;
    {
        RandomCnfConfig gcfg;
        gcfg.num_vars = 20;
        gcfg.seed = 9;
        std::ofstream out(dir.file("only.cnf"));
        write_dimacs(random_ksat(gcfg), out);
    }
    CmdResult r = run_cmd("bench --instances " + dir.path.string() +
                          " --n 10 --seeds 1");
    CHECK(r.exit_code == 0);

    // The aggregate ratio is present and finite.
    std::istringstream lines(r.out);
    std::string line;
    bool found = false;
    while (std::getline(lines, line)) {
        const std::string key = "geomean_effort_ratio ";
        const size_t at = line.find(key);
        if (at == std::string::npos) continue;
        found = true;
        const double ratio = std::stod(line.substr(at + key.size()));
        CHECK(std::isfinite(ratio));
        CHECK(ratio > 0.0);
    }
    CHECK(found);

    CHECK(run_cmd("bench --instances " + dir.file("missing-dir") + " --n 5")
              .exit_code == 2);
}
