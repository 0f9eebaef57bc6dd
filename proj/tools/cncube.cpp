// cncube — cube-and-conquer front end.
//
//   cncube cube <input.cnf> -n <int> [--mode mcts|greedy] [--budget <int>]
//          [--cpuct <real>] [--seed <int>] [--jobs <int>] [-o <path>]
//          [--stats <path>]
//   cncube conquer <input.cnf> <cubes.icnf> [--jobs <int>]
//          [--decision-limit <int>] [--solver-cmd <template>] [--stats <path>]
//   cncube solve <input.cnf> -n <int> [cube and conquer flags]
//   cncube bench --instances <dir|random> --n <int> [--random-k <count>]
//          [--vars <int>] [--ratio <real>] [--seeds <list>] [bench flags]
//
// Exit codes: 0 success/unknown, 1 input error, 2 usage error,
// 10 satisfiable, 20 unsatisfiable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cncube/cnf.hpp"
#include "cncube/conquer.hpp"
#include "cncube/cuber.hpp"
#include "cncube/gen.hpp"
#include "cncube/stats.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;

const char* kUsage =
    "usage: cncube <command> [options]\n"
    "\n"
    "commands:\n"
    "  cube <input.cnf> -n <int>      partition the input into cubes\n"
    "    --mode mcts|greedy           variable selection (default mcts)\n"
    "    --budget <int>               MCTS simulations per node (default 30)\n"
    "    --cpuct <real>               exploration constant (default 5.0)\n"
    "    --seed <int>                 search seed (default 0)\n"
    "    --jobs <int>                 parallel cubing workers (default 1)\n"
    "    -o <path>                    iCNF output (default stdout)\n"
    "    --stats <path>               write a key/value stats document\n"
    "  conquer <input.cnf> <cubes.icnf>   solve every cube\n"
    "    --jobs <int>                 parallel cube solvers (default 1)\n"
    "    --decision-limit <int>       per-cube decision budget (default none)\n"
    "    --solver-cmd <template>      external solver; '{}' is the DIMACS path\n"
    "    --stats <path>\n"
    "  solve <input.cnf> -n <int>     cube, then conquer (shared flags)\n"
    "  bench --instances <dir|random> --n <int>   MCTS vs greedy ablation\n"
    "    --random-k <count>           number of random instances (default 20)\n"
    "    --vars <int>                 variables per random instance (default 150)\n"
    "    --ratio <real>               clause/variable ratio (default 4.26)\n"
    "    --seeds <list>               comma-separated seeds (default 1,2,3)\n"
    "    plus --budget, --cpuct, --jobs, --decision-limit\n";

struct UsageError {
    std::string msg;
};
struct InputError {
    std::string msg;
};

long long parse_ll(const std::string& flag, const std::string& value) {
    try {
        size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError{"invalid integer for " + flag + ": '" + value + "'"};
    }
}

double parse_real(const std::string& flag, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw UsageError{"invalid number for " + flag + ": '" + value + "'"};
    }
}

// Pulls the value of a flag that requires one.
std::string flag_value(const std::vector<std::string>& args, size_t& i) {
    if (i + 1 >= args.size()) throw UsageError{"missing value for " + args[i]};
    return args[++i];
}

cnc::CnfFormula load_formula(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError{"cannot read input file '" + path + "'"};
    std::vector<std::string> warnings;
    try {
        cnc::CnfFormula f = cnc::parse_dimacs(in, &warnings);
        for (const std::string& w : warnings)
            std::cerr << "c warning: " << path << ": " << w << '\n';
        return f;
    } catch (const cnc::ParseError& e) {
        throw InputError{path + ": " + e.what()};
    }
}

cnc::CubeSet load_cubes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError{"cannot read cube file '" + path + "'"};
    try {
        return cnc::parse_icnf(in);
    } catch (const cnc::ParseError& e) {
        throw InputError{path + ": " + e.what()};
    }
}

struct CubeFlags {
    std::string input;
    cnc::CubingConfig cfg;
    bool n_set = false;
    std::string output;  // empty: stdout
    std::string stats_path;
};

// Shared by cube and solve; extra (conquer) flags are handed back to the
// caller through `unparsed` when allow_conquer_flags is set.
CubeFlags parse_cube_flags(const std::vector<std::string>& args,
                           std::vector<std::string>* unparsed = nullptr) {
    CubeFlags out;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "-n" || a == "--n") {
            out.cfg.n = static_cast<int>(parse_ll(a, flag_value(args, i)));
            out.n_set = true;
        } else if (a == "--mode") {
            const std::string m = flag_value(args, i);
            if (m == "mcts")
                out.cfg.mode = cnc::CubingMode::kMcts;
            else if (m == "greedy")
                out.cfg.mode = cnc::CubingMode::kGreedy;
            else
                throw UsageError{"--mode must be 'mcts' or 'greedy'"};
        } else if (a == "--budget") {
            out.cfg.budget = static_cast<int>(parse_ll(a, flag_value(args, i)));
        } else if (a == "--cpuct") {
            out.cfg.c_puct = parse_real(a, flag_value(args, i));
        } else if (a == "--seed") {
            out.cfg.seed = static_cast<uint64_t>(parse_ll(a, flag_value(args, i)));
        } else if (a == "--jobs") {
            out.cfg.jobs = static_cast<int>(parse_ll(a, flag_value(args, i)));
        } else if (a == "-o") {
            out.output = flag_value(args, i);
        } else if (a == "--stats") {
            out.stats_path = flag_value(args, i);
        } else if (unparsed && (a == "--decision-limit" || a == "--solver-cmd")) {
            unparsed->push_back(a);
            unparsed->push_back(flag_value(args, i));
        } else if (!a.empty() && a[0] == '-') {
            throw UsageError{"unknown option '" + a + "'"};
        } else if (out.input.empty()) {
            out.input = a;
        } else {
            throw UsageError{"unexpected argument '" + a + "'"};
        }
    }
    if (out.input.empty()) throw UsageError{"missing input file"};
    if (!out.n_set) throw UsageError{"missing required -n <int>"};
    if (out.cfg.n < 1) throw UsageError{"-n must be >= 1"};
    if (out.cfg.budget < 1) throw UsageError{"--budget must be >= 1"};
    if (out.cfg.c_puct <= 0.0) throw UsageError{"--cpuct must be > 0"};
    if (out.cfg.jobs < 1) throw UsageError{"--jobs must be >= 1"};
    return out;
}

void fill_cubing_stats(cnc::StatsDocument& doc, const cnc::CubingConfig& cfg,
                       const cnc::EpisodeResult& ep) {
    doc.mode = cfg.mode == cnc::CubingMode::kMcts ? "mcts" : "greedy";
    doc.n = cfg.n;
    doc.budget = cfg.budget;
    doc.c_puct = cfg.c_puct;
    doc.seed = cfg.seed;
    doc.has_cubing = true;
    doc.has_cubes = true;
    doc.open_cubes = ep.stats.open_cubes;
    doc.refuted_cubes = ep.stats.refuted_cubes;
    doc.max_depth = ep.stats.max_depth;
    doc.depth_histogram = ep.stats.depth_histogram;
    doc.bcp_calls = ep.stats.bcp_calls;
    doc.mcts_simulations = ep.stats.mcts_simulations;
    doc.cubing_wall_seconds = ep.stats.wall_seconds;
}

void write_stats_file(const cnc::StatsDocument& doc, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw InputError{"cannot write stats file '" + path + "'"};
    cnc::write_stats(doc, out);
}

int cmd_cube(const std::vector<std::string>& args) {
    CubeFlags flags = parse_cube_flags(args);
    cnc::CnfFormula f = load_formula(flags.input);
    cnc::EpisodeResult ep = cnc::cube_episode(f, flags.cfg);

    if (flags.output.empty()) {
        cnc::write_icnf(ep.cubes, std::cout);
    } else {
        std::ofstream out(flags.output);
        if (!out) throw InputError{"cannot write output file '" + flags.output + "'"};
        cnc::write_icnf(ep.cubes, out);
    }

    cnc::StatsDocument doc;
    doc.instance = flags.input;
    doc.command = "cube";
    doc.jobs = flags.cfg.jobs;
    doc.num_vars = f.num_vars;
    doc.num_clauses = f.clauses.size();
    fill_cubing_stats(doc, flags.cfg, ep);
    write_stats_file(doc, flags.stats_path);

    std::cerr << "c cubes " << ep.stats.open_cubes << " open, "
              << ep.stats.refuted_cubes << " refuted, max depth "
              << ep.stats.max_depth << ", " << ep.stats.bcp_calls
              << " bcp calls, " << ep.stats.wall_seconds << " s\n";
    return kExitOk;
}

struct ConquerOutcome {
    cnc::CncResult result;
    double wall_seconds = 0.0;
};

ConquerOutcome run_conquer(const cnc::CnfFormula& f, const cnc::CubeSet& cubes,
                           int jobs, int64_t decision_limit,
                           const std::string& solver_cmd) {
    for (const cnc::Cube& c : cubes.open)
        for (cnc::Lit l : c)
            if (l.var() > f.num_vars)
                throw InputError{"cube variable " + std::to_string(l.var()) +
                                 " exceeds formula variables"};
    ConquerOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    cnc::SolveLimits limits;
    limits.max_decisions = decision_limit;
    if (solver_cmd.empty())
        out.result = cnc::solve_cnc(f, cubes, limits, jobs);
    else
        out.result = cnc::solve_cnc_external(solver_cmd, f, cubes);
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// Prints the result line (and model) and returns the exit code.
int report_result(const cnc::CnfFormula& f, const cnc::CncResult& r) {
    switch (r.overall.status) {
        case cnc::SolveStatus::kSat: {
            if (!r.overall.model.empty() &&
                !cnc::verify_model(f, r.overall.model)) {
                std::cerr << "c error: model failed verification\n";
                return kExitInputError;
            }
            std::cout << "s SATISFIABLE\n";
            std::cout << "v";
            for (int v = 1; v <= f.num_vars; ++v)
                std::cout << ' '
                          << (r.overall.model[static_cast<size_t>(v)] > 0 ? v : -v);
            std::cout << " 0\n";
            return kExitSat;
        }
        case cnc::SolveStatus::kUnsat:
            std::cout << "s UNSATISFIABLE\n";
            return kExitUnsat;
        case cnc::SolveStatus::kUnknown:
            std::cout << "s UNKNOWN\n";
            return kExitOk;
    }
    return kExitOk;
}

const char* status_name(cnc::SolveStatus s) {
    switch (s) {
        case cnc::SolveStatus::kSat: return "SAT";
        case cnc::SolveStatus::kUnsat: return "UNSAT";
        case cnc::SolveStatus::kUnknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

int cmd_conquer(const std::vector<std::string>& args) {
    std::string input, cubes_path, stats_path, solver_cmd;
    int jobs = 1;
    int64_t decision_limit = -1;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--jobs")
            jobs = static_cast<int>(parse_ll(a, flag_value(args, i)));
        else if (a == "--decision-limit")
            decision_limit = parse_ll(a, flag_value(args, i));
        else if (a == "--solver-cmd")
            solver_cmd = flag_value(args, i);
        else if (a == "--stats")
            stats_path = flag_value(args, i);
        else if (!a.empty() && a[0] == '-')
            throw UsageError{"unknown option '" + a + "'"};
        else if (input.empty())
            input = a;
        else if (cubes_path.empty())
            cubes_path = a;
        else
            throw UsageError{"unexpected argument '" + a + "'"};
    }
    if (input.empty() || cubes_path.empty())
        throw UsageError{"conquer needs <input.cnf> and <cubes.icnf>"};
    if (jobs < 1) throw UsageError{"--jobs must be >= 1"};

    cnc::CnfFormula f = load_formula(input);
    cnc::CubeSet cubes = load_cubes(cubes_path);
    ConquerOutcome oc = run_conquer(f, cubes, jobs, decision_limit, solver_cmd);

    cnc::StatsDocument doc;
    doc.instance = input;
    doc.command = "conquer";
    doc.jobs = jobs;
    doc.num_vars = f.num_vars;
    doc.num_clauses = f.clauses.size();
    doc.has_cubes = true;
    doc.open_cubes = static_cast<int>(cubes.open.size());
    doc.refuted_cubes = static_cast<int>(cubes.refuted.size());
    doc.has_conquer = true;
    doc.result = status_name(oc.result.overall.status);
    doc.conquer_decisions = oc.result.total_decisions;
    doc.conquer_propagations = oc.result.total_propagations;
    for (const cnc::CubeOutcome& c : oc.result.per_open_cube)
        doc.per_cube_decisions.push_back(c.decisions);
    doc.conquer_wall_seconds = oc.wall_seconds;
    write_stats_file(doc, stats_path);

    std::cout << "c conquer " << cubes.open.size() << " open cubes, "
              << oc.result.total_decisions << " decisions, " << oc.wall_seconds
              << " s\n";
    return report_result(f, oc.result);
}

int cmd_solve(const std::vector<std::string>& args) {
    std::vector<std::string> conquer_args;
    CubeFlags flags = parse_cube_flags(args, &conquer_args);
    int64_t decision_limit = -1;
    std::string solver_cmd;
    for (size_t i = 0; i + 1 < conquer_args.size(); i += 2) {
        if (conquer_args[i] == "--decision-limit")
            decision_limit = parse_ll(conquer_args[i], conquer_args[i + 1]);
        else if (conquer_args[i] == "--solver-cmd")
            solver_cmd = conquer_args[i + 1];
    }

    cnc::CnfFormula f = load_formula(flags.input);
    cnc::EpisodeResult ep = cnc::cube_episode(f, flags.cfg);
    if (!flags.output.empty()) {
        std::ofstream out(flags.output);
        if (!out) throw InputError{"cannot write output file '" + flags.output + "'"};
        cnc::write_icnf(ep.cubes, out);
    }
    std::cout << "c cubing " << ep.stats.open_cubes << " open cubes, "
              << ep.stats.refuted_cubes << " refuted, " << ep.stats.wall_seconds
              << " s\n";

    ConquerOutcome oc =
        run_conquer(f, ep.cubes, flags.cfg.jobs, decision_limit, solver_cmd);
    std::cout << "c conquer " << oc.result.total_decisions << " decisions, "
              << oc.wall_seconds << " s\n";

    cnc::StatsDocument doc;
    doc.instance = flags.input;
    doc.command = "solve";
    doc.jobs = flags.cfg.jobs;
    doc.num_vars = f.num_vars;
    doc.num_clauses = f.clauses.size();
    fill_cubing_stats(doc, flags.cfg, ep);
    doc.has_conquer = true;
    doc.result = status_name(oc.result.overall.status);
    doc.conquer_decisions = oc.result.total_decisions;
    doc.conquer_propagations = oc.result.total_propagations;
    for (const cnc::CubeOutcome& c : oc.result.per_open_cube)
        doc.per_cube_decisions.push_back(c.decisions);
    doc.conquer_wall_seconds = oc.wall_seconds;
    write_stats_file(doc, flags.stats_path);

    return report_result(f, oc.result);
}

std::vector<uint64_t> parse_seed_list(const std::string& text) {
    std::vector<uint64_t> seeds;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ','))
        if (!part.empty())
            seeds.push_back(static_cast<uint64_t>(parse_ll("--seeds", part)));
    if (seeds.empty()) throw UsageError{"--seeds needs at least one seed"};
    return seeds;
}

int cmd_bench(const std::vector<std::string>& args) {
    std::string instances;
    int random_k = 20;
    int vars = 150;
    double ratio = 4.26;
    int n = 0;
    bool n_set = false;
    std::vector<uint64_t> seeds{1, 2, 3};
    int budget = 30;
    double c_puct = 5.0;
    int jobs = 1;
    int64_t decision_limit = -1;

    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--instances")
            instances = flag_value(args, i);
        else if (a == "--random-k")
            random_k = static_cast<int>(parse_ll(a, flag_value(args, i)));
        else if (a == "--vars")
            vars = static_cast<int>(parse_ll(a, flag_value(args, i)));
        else if (a == "--ratio")
            ratio = parse_real(a, flag_value(args, i));
        else if (a == "--n" || a == "-n") {
            n = static_cast<int>(parse_ll(a, flag_value(args, i)));
            n_set = true;
        } else if (a == "--seeds")
            seeds = parse_seed_list(flag_value(args, i));
        else if (a == "--budget")
            budget = static_cast<int>(parse_ll(a, flag_value(args, i)));
        else if (a == "--cpuct")
            c_puct = parse_real(a, flag_value(args, i));
        else if (a == "--jobs")
            jobs = static_cast<int>(parse_ll(a, flag_value(args, i)));
        else if (a == "--decision-limit")
            decision_limit = parse_ll(a, flag_value(args, i));
        else
            throw UsageError{"unknown option '" + a + "'"};
    }
    if (instances.empty()) throw UsageError{"missing --instances <dir|random>"};
    if (!n_set) throw UsageError{"missing required --n <int>"};

    struct Instance {
        std::string name;
        cnc::CnfFormula f;
    };
    std::vector<Instance> set;
    if (instances == "random") {
        if (random_k < 1) throw UsageError{"--random-k must be >= 1"};
        for (int i = 0; i < random_k; ++i) {
            cnc::RandomCnfConfig gcfg;
            gcfg.num_vars = vars;
            gcfg.clause_ratio = ratio;
            gcfg.seed = static_cast<uint64_t>(i) + 1;
            set.push_back({"random-" + std::to_string(vars) + "-" + std::to_string(i),
                           cnc::random_ksat(gcfg)});
        }
    } else {
        namespace fs = std::filesystem;
        std::vector<std::string> paths;
        if (fs::is_directory(instances)) {
            for (const auto& e : fs::directory_iterator(instances))
                if (e.is_regular_file() && e.path().extension() == ".cnf")
                    paths.push_back(e.path().string());
            std::sort(paths.begin(), paths.end());
        } else if (fs::is_regular_file(instances)) {
            paths.push_back(instances);
        }
        if (paths.empty())
            throw UsageError{"no .cnf instances found under '" + instances + "'"};
        for (const std::string& p : paths) set.push_back({p, load_formula(p)});
    }

    std::cout << "c bench: " << set.size() << " instances, " << seeds.size()
              << " seeds, n=" << n << ", budget=" << budget << "\n";
    std::cout << "c " << std::left << "instance mode seed cubes refuted "
              << "cube_s decisions result\n";

    double log_ratio_sum = 0.0;
    int ratio_count = 0;
    for (const Instance& inst : set) {
        int64_t total_decisions[2] = {0, 0};  // [mcts, greedy]
        double cube_seconds[2] = {0.0, 0.0};
        for (int m = 0; m < 2; ++m) {
            const cnc::CubingMode mode =
                m == 0 ? cnc::CubingMode::kMcts : cnc::CubingMode::kGreedy;
            for (uint64_t seed : seeds) {
                cnc::CubingConfig cfg;
                cfg.n = n;
                cfg.budget = budget;
                cfg.c_puct = c_puct;
                cfg.mode = mode;
                cfg.seed = seed;
                cfg.jobs = jobs;
                cnc::EpisodeResult ep = cnc::cube_episode(inst.f, cfg);
                cnc::SolveLimits limits;
                limits.max_decisions = decision_limit;
                cnc::CncResult cr = cnc::solve_cnc(inst.f, ep.cubes, limits, jobs);
                total_decisions[m] += cr.total_decisions;
                cube_seconds[m] += ep.stats.wall_seconds;
                std::cout << "c " << inst.name << ' '
                          << (m == 0 ? "mcts" : "greedy") << ' ' << seed << ' '
                          << ep.stats.open_cubes << ' ' << ep.stats.refuted_cubes
                          << ' ' << ep.stats.wall_seconds << ' '
                          << cr.total_decisions << ' '
                          << status_name(cr.overall.status) << '\n';
            }
        }
        const double num = static_cast<double>(std::max<int64_t>(total_decisions[0], 1));
        const double den = static_cast<double>(std::max<int64_t>(total_decisions[1], 1));
        const double r = num / den;
        log_ratio_sum += std::log(r);
        ++ratio_count;
        std::cout << "c " << inst.name << " effort_ratio " << r << " cube_time "
                  << cube_seconds[0] << " vs " << cube_seconds[1] << "\n";
    }
    const double geomean = std::exp(log_ratio_sum / ratio_count);
    std::cout << "c geomean_effort_ratio " << geomean << " (mcts/greedy, over "
              << ratio_count << " instances)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << kUsage;
        return kExitUsage;
    }
    const std::string cmd = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    try {
        if (cmd == "cube") return cmd_cube(args);
        if (cmd == "conquer") return cmd_conquer(args);
        if (cmd == "solve") return cmd_solve(args);
        if (cmd == "bench") return cmd_bench(args);
        if (cmd == "-h" || cmd == "--help") {
            std::cout << kUsage;
            return kExitOk;
        }
        std::cerr << "cncube: unknown command '" << cmd << "'\n" << kUsage;
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "cncube: " << e.msg << "\n" << kUsage;
        return kExitUsage;
    } catch (const InputError& e) {
        std::cerr << "cncube: error: " << e.msg << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "cncube: error: " << e.what() << '\n';
        return kExitInputError;
    }
}
