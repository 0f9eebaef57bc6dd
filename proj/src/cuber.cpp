#include "cncube/cuber.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cncube/rng.hpp"
#include "cncube/scoring.hpp"

namespace cnc {

bool should_terminate(int eliminated, bool refuted, bool has_actions, int n) {
    return refuted || !has_actions || eliminated >= n;
}

int greedy_pick(const std::vector<std::pair<int, ProbeResult>>& probes) {
    if (probes.empty())
        throw std::invalid_argument("greedy_pick: no candidate actions");
    int best_var = -1;
    double best = 0.0;
    for (const auto& [var, pr] : probes) {
        if (!pr.conflict_free())
            throw std::invalid_argument("greedy_pick: unresolved probe conflict");
        const double s = pair_score(static_cast<double>(*pr.pos),
                                    static_cast<double>(*pr.neg));
        if (best_var < 0 || s > best) {  // ascending input keeps lower var on ties
            best_var = var;
            best = s;
        }
    }
    return best_var;
}

namespace {

struct SplitNode {
    Cube prefix;                   // decision literals from the episode root
    std::vector<Lit> assumptions;  // prefix plus accumulated forcings
    enum class St : uint8_t { kPending, kSplit, kLeafOpen, kLeafRefuted };
    St st = St::kPending;
    int split_var = 0;
    std::unique_ptr<SplitNode> pos;
    std::unique_ptr<SplitNode> neg;
};

struct Shared {
    Shared(const CnfFormula& formula, const CubingConfig& config)
        : f(formula), cfg(config) {}
    const CnfFormula& f;
    const CubingConfig& cfg;
    std::mutex mu;
    std::condition_variable cv;
    std::deque<SplitNode*> pending;
    int active = 0;
    bool failed = false;
    std::exception_ptr error;
    uint64_t bcp_calls = 0;
    uint64_t simulations = 0;
};

uint64_t node_seed(uint64_t seed, const Cube& prefix) {
    uint64_t h = fnv1a64(&seed, sizeof(seed));
    for (Lit l : prefix) h = fnv1a64(&l.code, sizeof(l.code), h);
    return h;
}

// Classify one pending node and, if it splits, attach its two children.
// Searches are per-node and self-contained, so the result does not depend
// on which worker runs this or when.
void process_node(SplitNode* node, Shared& sh, Propagator& engine,
                  uint64_t& simulations) {
    FixpointResult fp = engine.failed_literal_fixpoint(node->assumptions);
    if (fp.refuted) {
        node->st = SplitNode::St::kLeafRefuted;
        return;
    }
    const int eliminated = fp.trail.assigned_count();
    const bool has_actions = !fp.probes.empty();
    if (should_terminate(eliminated, false, has_actions, sh.cfg.n)) {
        node->st = SplitNode::St::kLeafOpen;
        return;
    }

    int var;
    if (sh.cfg.mode == CubingMode::kGreedy) {
        var = greedy_pick(fp.probes);
    } else {
        SearchConfig scfg;
        scfg.c_puct = sh.cfg.c_puct;
        scfg.budget = sh.cfg.budget;
        const int cutoff = sh.cfg.n;
        SearchOutcome so = run_search(
            engine, node->assumptions, fp,
            [cutoff](int elim) { return elim >= cutoff; }, scfg,
            node_seed(sh.cfg.seed, node->prefix));
        simulations += so.simulations;
        if (so.variable) {
            var = *so.variable;
        } else {
            // Defensive: a closed search root always reports its closing
            // action. Splitting the lowest candidate keeps the episode
            // total even if that ever changes.
            var = fp.probes.front().first;
        }
    }

    node->assumptions.insert(node->assumptions.end(), fp.forced.begin(),
                             fp.forced.end());
    node->st = SplitNode::St::kSplit;
    node->split_var = var;
    for (bool positive : {true, false}) {
        auto child = std::make_unique<SplitNode>();
        child->prefix = node->prefix;
        child->prefix.push_back(Lit(positive ? var : -var));
        child->assumptions = node->assumptions;
        child->assumptions.push_back(Lit(positive ? var : -var));
        (positive ? node->pos : node->neg) = std::move(child);
    }
}

void worker_loop(Shared& sh) {
    Propagator engine(sh.f);
    uint64_t simulations = 0;
    for (;;) {
        SplitNode* node = nullptr;
        {
            std::unique_lock<std::mutex> lk(sh.mu);
            sh.cv.wait(lk, [&] {
                return sh.failed || !sh.pending.empty() || sh.active == 0;
            });
            if (sh.failed || sh.pending.empty()) break;
            node = sh.pending.front();
            sh.pending.pop_front();
            ++sh.active;
        }
        try {
            process_node(node, sh, engine, simulations);
            std::lock_guard<std::mutex> lk(sh.mu);
            if (node->st == SplitNode::St::kSplit) {
                sh.pending.push_back(node->pos.get());
                sh.pending.push_back(node->neg.get());
            }
            --sh.active;
            sh.cv.notify_all();
        } catch (...) {
            std::lock_guard<std::mutex> lk(sh.mu);
            sh.failed = true;
            if (!sh.error) sh.error = std::current_exception();
            --sh.active;
            sh.cv.notify_all();
            break;
        }
    }
    std::lock_guard<std::mutex> lk(sh.mu);
    sh.bcp_calls += engine.bcp_calls();
    sh.simulations += simulations;
}

}  // namespace

EpisodeResult cube_episode(const CnfFormula& f, const CubingConfig& cfg) {
    if (cfg.n < 1 || cfg.budget < 1 || cfg.c_puct <= 0.0 || cfg.jobs < 1)
        throw std::invalid_argument("cube_episode: invalid configuration");

    const auto t0 = std::chrono::steady_clock::now();

    SplitNode root;
    Shared sh(f, cfg);
    sh.pending.push_back(&root);
    {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(cfg.jobs));
        for (int i = 0; i < cfg.jobs; ++i)
            pool.emplace_back(worker_loop, std::ref(sh));
        for (auto& t : pool) t.join();
    }
    if (sh.error) std::rethrow_exception(sh.error);

    // The finished tree is read out depth-first, positive branch first, so
    // the cube order is canonical no matter how workers interleaved.
    EpisodeResult res;
    std::vector<const SplitNode*> stack{&root};
    while (!stack.empty()) {
        const SplitNode* nd = stack.back();
        stack.pop_back();
        switch (nd->st) {
            case SplitNode::St::kLeafOpen:
            case SplitNode::St::kLeafRefuted: {
                const int depth = static_cast<int>(nd->prefix.size());
                res.stats.max_depth = std::max(res.stats.max_depth, depth);
                if (static_cast<size_t>(depth) >= res.stats.depth_histogram.size())
                    res.stats.depth_histogram.resize(static_cast<size_t>(depth) + 1, 0);
                ++res.stats.depth_histogram[static_cast<size_t>(depth)];
                if (nd->st == SplitNode::St::kLeafOpen)
                    res.cubes.open.push_back(nd->prefix);
                else
                    res.cubes.refuted.push_back(nd->prefix);
                break;
            }
            case SplitNode::St::kSplit:
                stack.push_back(nd->neg.get());
                stack.push_back(nd->pos.get());
                break;
            case SplitNode::St::kPending:
                throw std::logic_error("cube_episode: unprocessed node after join");
        }
    }

    res.stats.open_cubes = static_cast<int>(res.cubes.open.size());
    res.stats.refuted_cubes = static_cast<int>(res.cubes.refuted.size());
    res.stats.bcp_calls = sh.bcp_calls;
    res.stats.mcts_simulations = sh.simulations;
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace cnc
