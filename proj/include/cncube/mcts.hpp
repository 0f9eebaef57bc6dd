// Monte Carlo tree search over splitting decisions at one node of the
// splitting tree. One search = up to budget simulations of the four-phase
// loop (selection, expansion, leaf evaluation in place of rollout, backup),
// then the action with the best backed-up value is returned.
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cncube/bcp.hpp"
#include "cncube/rng.hpp"
#include "cncube/scoring.hpp"

namespace cnc {

struct SearchConfig {
    double c_puct = 5.0;
    int budget = 30;
};

enum class NodeStatus : uint8_t { kOpen, kRefuted, kTerminal };

struct MctsNode;

// Per-action edge statistics. An expanded action always has both polarity
// children; an action whose both polarities conflict is refuted and leaves
// selection permanently.
struct Edge {
    int var = 0;
    double prior = 0.0;  // P(s,a)
    int visits = 0;      // N(s,a)
    double total = 0.0;  // W(s,a)
    double best = 0.0;   // max value ever backed up through this edge
    bool refuted = false;
    std::unique_ptr<MctsNode> pos;
    std::unique_ptr<MctsNode> neg;

    double mean() const { return visits > 0 ? total / visits : 0.0; }  // Q(s,a)
    bool expanded() const { return pos != nullptr; }
    MctsNode* child(bool positive) const { return positive ? pos.get() : neg.get(); }
};

struct MctsNode {
    std::vector<Lit> assumptions;  // episode base + path decisions + forcings
    int path_len = 0;              // decision literals below the search root
    int assigned = 0;              // fixed-point assignment size (0 if refuted)
    NodeStatus status = NodeStatus::kOpen;
    double value = 0.0;  // leaf reward, overwritten by recombination once interior
    int visits = 0;
    int closing_var = 0;  // the action whose refutation closed this node
    std::vector<Edge> edges;  // candidate actions, ascending by variable

    const Edge* find_edge(int var) const;
};

// One completed walk from the root. If expand_edge >= 0 the walk ended at
// an open node whose chosen action is not yet expanded; otherwise it ended
// at a terminal or refuted node whose stored value is backed up as-is.
struct SelectPath {
    struct Step {
        MctsNode* node;
        int edge;
        bool positive;
    };
    std::vector<Step> steps;
    MctsNode* stop = nullptr;
    int expand_edge = -1;
};

// Q(s,a) + c_puct * P(s,a) * sqrt(max(sum_b N(s,b), 1)) / (1 + N(s,a)).
// The max(.,1) guard makes the very first pick at an unvisited node follow
// the prior instead of being arbitrary. Throws std::invalid_argument for a
// variable that is not a candidate action of the node.
double puct_value(const MctsNode& node, int var, double c_puct);

class MctsSearch {
  public:
    // root_fp is the failed-literal fixpoint of root_assumptions, computed
    // by the caller (the cubing episode already holds it for its node).
    // is_terminal receives the eliminated-variable count of a state and
    // decides episode termination. Throws std::invalid_argument if the
    // root is refuted or has no candidate action.
    MctsSearch(Propagator& engine, std::vector<Lit> root_assumptions,
               const FixpointResult& root_fp,
               std::function<bool(int)> is_terminal, SearchConfig cfg,
               uint64_t seed);

    // Runs up to cfg.budget simulations and returns the root action with
    // the maximum best value (ties: higher visit count, then lower
    // variable). An action whose both polarities conflicted closes the
    // node outright (the node is unsatisfiable) and is returned as the
    // split: it resolves the node with exactly two immediately refuted
    // cubes. The search stops early once the root closes.
    std::optional<int> run();

    // The individual phases, exposed so tests can drive one simulation at
    // a time. select never enters a refuted child; expand creates both
    // polarity children of the given edge and marks the edge refuted when
    // both conflict (dropping the children); backup recombines pair scores
    // along the path and refreshes N, W and best.
    SelectPath select();
    void expand(MctsNode& node, int edge_index);
    void backup(SelectPath& path);

    // Marginal propagation rate of a descendant node relative to the
    // search root; R_ref (= num_vars, the strongest possible outcome) for
    // refuted nodes. Never defined on the root itself.
    double leaf_reward(const MctsNode& node) const;

    MctsNode& root() { return *root_; }
    const MctsNode& root() const { return *root_; }
    uint64_t simulations_run() const { return sims_; }

  private:
    std::unique_ptr<MctsNode> build_node(std::vector<Lit> assumptions,
                                         int path_len);
    void attach_edges(MctsNode& node,
                      const std::vector<std::pair<int, ProbeResult>>& probes);
    void refute_cascade(SelectPath& path);

    Propagator& engine_;
    std::function<bool(int)> is_terminal_;
    SearchConfig cfg_;
    SplitMix64 rng_;  // reserved for stochastic variants; not consumed today
    double refuted_value_ = 0.0;
    int root_assigned_ = 0;
    std::unique_ptr<MctsNode> root_;
    uint64_t sims_ = 0;
};

struct SearchOutcome {
    std::optional<int> variable;
    uint64_t simulations = 0;
};

// Convenience wrapper: build the tree, run it, tear it down.
SearchOutcome run_search(Propagator& engine,
                         const std::vector<Lit>& node_assumptions,
                         const FixpointResult& node_fp,
                         const std::function<bool(int)>& is_terminal,
                         const SearchConfig& cfg, uint64_t seed);

}  // namespace cnc
