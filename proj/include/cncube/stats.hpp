// Run statistics as a plain "key value" text document. Lines starting
// with '#' are comments and carry invocation metadata (wall-clock
// readings, worker count); everything else is a pure function of the
// input, the cubing flags and the seed, byte for byte.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cnc {

struct StatsDocument {
    std::string instance;
    std::string command;

    std::string mode;
    int n = 0;
    int budget = 0;
    double c_puct = 0.0;
    uint64_t seed = 0;
    int jobs = 0;

    int num_vars = 0;
    size_t num_clauses = 0;

    bool has_cubing = false;  // cubing flags and episode counters present
    bool has_cubes = false;   // cube counts present (cubing or a cube file)
    int open_cubes = 0;
    int refuted_cubes = 0;
    int max_depth = 0;
    std::vector<uint64_t> depth_histogram;
    uint64_t bcp_calls = 0;
    uint64_t mcts_simulations = 0;
    double cubing_wall_seconds = 0.0;

    bool has_conquer = false;
    std::string result = "NONE";  // SAT | UNSAT | UNKNOWN | NONE
    int64_t conquer_decisions = 0;
    int64_t conquer_propagations = 0;
    std::vector<int64_t> per_cube_decisions;
    double conquer_wall_seconds = 0.0;
};

void write_stats(const StatsDocument& doc, std::ostream& out);

}  // namespace cnc
