// The cubing episode: grows the splitting tree by repeatedly choosing a
// split variable (MCTS or the greedy one-level baseline) until every leaf
// meets the termination condition, then collects the cube set.
#pragma once

#include <cstdint>
#include <vector>

#include "cncube/bcp.hpp"
#include "cncube/cnf.hpp"
#include "cncube/mcts.hpp"

namespace cnc {

enum class CubingMode : uint8_t { kMcts, kGreedy };

struct CubingConfig {
    int n = 0;  // stop splitting once at least n variables are eliminated
    int budget = 30;
    double c_puct = 5.0;
    CubingMode mode = CubingMode::kMcts;
    uint64_t seed = 0;
    int jobs = 1;
};

struct EpisodeStats {
    uint64_t bcp_calls = 0;
    uint64_t mcts_simulations = 0;
    int open_cubes = 0;
    int refuted_cubes = 0;
    int max_depth = 0;
    std::vector<uint64_t> depth_histogram;  // index = cube length
    double wall_seconds = 0.0;
};

struct EpisodeResult {
    CubeSet cubes;
    EpisodeStats stats;
};

// Termination test for one splitting-tree node: at least n variables
// eliminated (decisions, propagations and failed-literal forcings all
// count), or the node is refuted, or it has no valid action left.
bool should_terminate(int eliminated, bool refuted, bool has_actions, int n);

// The one-level baseline: highest pair score over the clean probe results
// of the current node, ties to the lower variable. No tree is built.
// Throws std::invalid_argument on an empty candidate list.
int greedy_pick(const std::vector<std::pair<int, ProbeResult>>& probes);

// Runs one cubing episode. The frontier of pending splitting-tree nodes is
// processed by cfg.jobs workers, each owning its propagation engine; the
// resulting cube set is collected depth-first (positive branch first) from
// the finished tree, so the output is identical for any jobs value.
// Trivially unsatisfiable input yields one empty refuted cube, trivially
// satisfiable input one empty open cube.
EpisodeResult cube_episode(const CnfFormula& f, const CubingConfig& cfg);

}  // namespace cnc
