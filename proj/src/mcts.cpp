#include "cncube/mcts.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace cnc {

const Edge* MctsNode::find_edge(int var) const {
    auto it = std::lower_bound(
        edges.begin(), edges.end(), var,
        [](const Edge& e, int v) { return e.var < v; });
    if (it == edges.end() || it->var != var) return nullptr;
    return &*it;
}

double puct_value(const MctsNode& node, int var, double c_puct) {
    const Edge* e = node.find_edge(var);
    if (e == nullptr)
        throw std::invalid_argument("puct_value: variable is not a candidate action");
    int total_visits = 0;
    for (const Edge& b : node.edges) total_visits += b.visits;
    const double sqrt_total = std::sqrt(static_cast<double>(std::max(total_visits, 1)));
    return e->mean() + c_puct * e->prior * sqrt_total / (1.0 + e->visits);
}

MctsSearch::MctsSearch(Propagator& engine, std::vector<Lit> root_assumptions,
                       const FixpointResult& root_fp,
                       std::function<bool(int)> is_terminal, SearchConfig cfg,
                       uint64_t seed)
    : engine_(engine),
      is_terminal_(std::move(is_terminal)),
      cfg_(cfg),
      rng_(seed) {
    if (cfg_.budget < 1 || cfg_.c_puct <= 0.0)
        throw std::invalid_argument("search config: budget and c_puct must be positive");
    if (root_fp.refuted)
        throw std::invalid_argument("run_search: root is refuted");
    if (root_fp.probes.empty())
        throw std::invalid_argument("run_search: root has no candidate action");

    refuted_value_ = static_cast<double>(engine_.formula().num_vars);
    root_ = std::make_unique<MctsNode>();
    root_->assumptions = std::move(root_assumptions);
    root_->assumptions.insert(root_->assumptions.end(), root_fp.forced.begin(),
                              root_fp.forced.end());
    root_->assigned = root_fp.trail.assigned_count();
    root_assigned_ = root_->assigned;
    attach_edges(*root_, root_fp.probes);
}

// Edge priors are the sum-normalized pair scores. A node whose probes are
// all zero carries no deductive signal; its priors are left at zero so the
// exploration bonus vanishes and selection falls back to the deterministic
// tie-break chain. A uniform prior here would send the search on arbitrary
// walks that deviate from the baseline without evidence.
void MctsSearch::attach_edges(MctsNode& node,
                              const std::vector<std::pair<int, ProbeResult>>& probes) {
    double sum = 0.0;
    node.edges.reserve(probes.size());
    for (const auto& [var, pr] : probes) {
        Edge e;
        e.var = var;
        e.prior = pair_score(static_cast<double>(*pr.pos),
                             static_cast<double>(*pr.neg));
        sum += e.prior;
        node.edges.push_back(std::move(e));
    }
    if (sum > 0.0)
        for (Edge& e : node.edges) e.prior /= sum;
}

double MctsSearch::leaf_reward(const MctsNode& node) const {
    if (node.path_len < 1)
        throw std::logic_error("leaf_reward: undefined on the search root");
    if (node.status == NodeStatus::kRefuted) return refuted_value_;
    // Decisions themselves are not counted as propagations; forcings and
    // implied literals below the root are.
    const int marginal = node.assigned - root_assigned_ - node.path_len;
    assert(marginal >= 0);
    return prop_rate(marginal, node.path_len);
}

std::unique_ptr<MctsNode> MctsSearch::build_node(std::vector<Lit> assumptions,
                                                 int path_len) {
    auto node = std::make_unique<MctsNode>();
    node->path_len = path_len;
    FixpointResult fp = engine_.failed_literal_fixpoint(assumptions);
    if (fp.refuted) {
        node->assumptions = std::move(assumptions);
        node->status = NodeStatus::kRefuted;
        node->value = refuted_value_;
        return node;
    }
    assumptions.insert(assumptions.end(), fp.forced.begin(), fp.forced.end());
    node->assumptions = std::move(assumptions);
    node->assigned = fp.trail.assigned_count();
    node->value = leaf_reward(*node);
    if (fp.probes.empty() || is_terminal_(node->assigned)) {
        node->status = NodeStatus::kTerminal;
    } else {
        node->status = NodeStatus::kOpen;
        attach_edges(*node, fp.probes);
    }
    return node;
}

SelectPath MctsSearch::select() {
    SelectPath path;
    MctsNode* node = root_.get();
    for (;;) {
        if (node->status != NodeStatus::kOpen) {
            path.stop = node;
            return path;
        }
        int total_visits = 0;
        for (const Edge& e : node->edges) total_visits += e.visits;
        const double sqrt_total =
            std::sqrt(static_cast<double>(std::max(total_visits, 1)));

        int best_idx = -1;
        double best_val = 0.0;
        double best_prior = 0.0;
        for (size_t i = 0; i < node->edges.size(); ++i) {
            const Edge& e = node->edges[i];
            const double val =
                e.mean() + cfg_.c_puct * e.prior * sqrt_total / (1.0 + e.visits);
            if (best_idx < 0 || val > best_val ||
                (val == best_val && e.prior > best_prior)) {
                best_idx = static_cast<int>(i);
                best_val = val;
                best_prior = e.prior;
            }
        }
        assert(best_idx >= 0);

        Edge& e = node->edges[static_cast<size_t>(best_idx)];
        if (!e.expanded()) {
            path.stop = node;
            path.expand_edge = best_idx;
            return path;
        }
        const bool pos_dead = e.pos->status == NodeStatus::kRefuted;
        const bool neg_dead = e.neg->status == NodeStatus::kRefuted;
        assert(!(pos_dead && neg_dead));  // such a node closes via the cascade
        bool positive;
        if (pos_dead)
            positive = false;
        else if (neg_dead)
            positive = true;
        else
            positive = e.pos->visits <= e.neg->visits;
        path.steps.push_back({node, best_idx, positive});
        node = e.child(positive);
    }
}

void MctsSearch::expand(MctsNode& node, int edge_index) {
    Edge& e = node.edges[static_cast<size_t>(edge_index)];
    assert(node.status == NodeStatus::kOpen && !e.expanded() && !e.refuted);
    std::vector<Lit> ext = node.assumptions;
    ext.push_back(Lit(e.var));
    e.pos = build_node(ext, node.path_len + 1);
    ext.back() = Lit(-e.var);
    e.neg = build_node(std::move(ext), node.path_len + 1);
    e.pos->visits = 1;
    e.neg->visits = 1;
    if (e.pos->status == NodeStatus::kRefuted &&
        e.neg->status == NodeStatus::kRefuted) {
        // Both polarities conflict. The two sub-formulas cover the node, so
        // the action refutes the node itself; children are not retained.
        e.pos.reset();
        e.neg.reset();
        e.refuted = true;
    }
}

void MctsSearch::backup(SelectPath& path) {
    MctsNode* stop = path.stop;
    if (path.expand_edge >= 0) {
        Edge& e = stop->edges[static_cast<size_t>(path.expand_edge)];
        // A refuted expansion dropped its children; both were worth R_ref.
        const double r = e.expanded()
                             ? pair_score(e.pos->value, e.neg->value)
                             : pair_score(refuted_value_, refuted_value_);
        stop->value = r;
        e.visits += 1;
        e.total += r;
        e.best = std::max(e.best, r);
    }
    for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) {
        Edge& e = it->node->edges[static_cast<size_t>(it->edge)];
        e.child(it->positive)->visits += 1;
        const double combined = pair_score(e.pos->value, e.neg->value);
        it->node->value = combined;
        e.visits += 1;
        e.total += combined;
        e.best = std::max(e.best, combined);
    }
}

// One refuted action proves the node unsatisfiable: its polarities cover
// the node's assignment space and both conflicted. The node closes
// immediately and remembers the closing action; an ancestor follows suit
// once both children of its traversed edge are closed.
void MctsSearch::refute_cascade(SelectPath& path) {
    MctsNode* cur = path.stop;
    Edge& first = cur->edges[static_cast<size_t>(path.expand_edge)];
    assert(first.refuted);
    cur->status = NodeStatus::kRefuted;
    cur->value = refuted_value_;
    cur->closing_var = first.var;
    size_t step = path.steps.size();
    while (step > 0) {
        --step;
        Edge& pe =
            path.steps[step].node->edges[static_cast<size_t>(path.steps[step].edge)];
        if (pe.pos->status != NodeStatus::kRefuted ||
            pe.neg->status != NodeStatus::kRefuted)
            return;
        pe.refuted = true;
        cur = path.steps[step].node;
        cur->status = NodeStatus::kRefuted;
        cur->value = refuted_value_;
        cur->closing_var = pe.var;
    }
}

std::optional<int> MctsSearch::run() {
    while (sims_ < static_cast<uint64_t>(cfg_.budget)) {
        if (root_->status != NodeStatus::kOpen) break;
        SelectPath path = select();
        bool refuted_expansion = false;
        if (path.expand_edge >= 0) {
            expand(*path.stop, path.expand_edge);
            refuted_expansion =
                path.stop->edges[static_cast<size_t>(path.expand_edge)].refuted;
        }
        backup(path);
        ++sims_;
        if (refuted_expansion) refute_cascade(path);
    }
    // A closed root is unsatisfiable and its closing action is the split
    // that proves it: both resulting cubes conflict immediately. Splitting
    // anything else at such a node only defers the same refutations into a
    // deeper subtree of open cubes the conquer stage would have to grind
    // through.
    if (root_->status == NodeStatus::kRefuted) {
        if (root_->closing_var > 0) return root_->closing_var;
        return std::nullopt;
    }

    int best_var = -1;
    double best_val = 0.0;
    int best_visits = -1;
    for (const Edge& e : root_->edges) {
        if (best_var < 0 || e.best > best_val ||
            (e.best == best_val && e.visits > best_visits)) {
            best_var = e.var;
            best_val = e.best;
            best_visits = e.visits;
        }
    }
    if (best_var < 0) return std::nullopt;
    return best_var;
}

SearchOutcome run_search(Propagator& engine,
                         const std::vector<Lit>& node_assumptions,
                         const FixpointResult& node_fp,
                         const std::function<bool(int)>& is_terminal,
                         const SearchConfig& cfg, uint64_t seed) {
    MctsSearch search(engine, node_assumptions, node_fp, is_terminal, cfg, seed);
    SearchOutcome out;
    out.variable = search.run();
    out.simulations = search.simulations_run();
    return out;
}

}  // namespace cnc
