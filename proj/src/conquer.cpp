#include "cncube/conquer.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

namespace cnc {

namespace {

// Counter-based DPLL. Per clause it tracks the number of true and false
// literals; a clause with num_true == 0 and one unassigned literal is unit,
// with none it is empty. active_occs_[v] counts not-yet-satisfied clauses
// containing v, which makes the branching rule (lowest unassigned variable
// in an unsatisfied clause) a plain array scan.
class DpllSolver {
  public:
    explicit DpllSolver(const CnfFormula& f) : f_(f) {
        const size_t nv = static_cast<size_t>(f.num_vars);
        occ_.assign(2 * (nv + 1), {});
        for (size_t ci = 0; ci < f.clauses.size(); ++ci) {
            const Clause& c = f.clauses[ci];
            span_.emplace_back(static_cast<int>(lits_.size()),
                               static_cast<int>(c.size()));
            for (Lit l : c) {
                lits_.push_back(l);
                occ_[lit_index(l)].push_back(static_cast<int>(ci));
            }
        }
        values_.assign(nv + 1, 0);
        num_true_.assign(f.clauses.size(), 0);
        num_false_.assign(f.clauses.size(), 0);
        base_occs_.assign(nv + 1, 0);
        for (const Clause& c : f.clauses)
            for (Lit l : c) ++base_occs_[static_cast<size_t>(l.var())];
    }

    SolveResult solve(std::span<const Lit> assumptions, const SolveLimits& limits) {
        reset();
        SolveResult res;

        for (const Clause& c : f_.clauses) {
            if (c.empty()) {
                res.status = SolveStatus::kUnsat;
                res.decisions = decisions_;
                res.propagations = propagations_;
                return res;
            }
        }
        for (Lit a : assumptions) {
            if (a.code == 0 || a.var() > f_.num_vars)
                throw std::invalid_argument("solve: assumption variable out of range");
            const int8_t v = values_[static_cast<size_t>(a.var())];
            if (v != 0) {
                if ((v > 0) != a.positive()) return finish_unsat(res);
                continue;
            }
            assign(a);
        }
        for (size_t ci = 0; ci < f_.clauses.size(); ++ci) {
            if (f_.clauses[ci].size() != 1) continue;
            const Lit u = f_.clauses[ci][0];
            const int8_t v = values_[static_cast<size_t>(u.var())];
            if (v != 0) {
                if ((v > 0) != u.positive()) return finish_unsat(res);
                continue;
            }
            assign(u);
            ++propagations_;
        }

        struct Frame {
            Lit decision;
            bool flipped;
            size_t trail_size;
        };
        std::vector<Frame> stack;

        for (;;) {
            if (!propagate()) {
                bool flipped = false;
                while (!stack.empty()) {
                    Frame& fr = stack.back();
                    undo_to(fr.trail_size);
                    if (!fr.flipped) {
                        fr.flipped = true;
                        fr.decision = -fr.decision;
                        if (limits.max_decisions >= 0 &&
                            decisions_ >= limits.max_decisions)
                            return finish_unknown(res);
                        ++decisions_;
                        assign(fr.decision);
                        flipped = true;
                        break;
                    }
                    stack.pop_back();
                }
                if (!flipped) return finish_unsat(res);
                continue;
            }
            const int v = pick_branch_var();
            if (v < 0) {
                res.status = SolveStatus::kSat;
                res.model.assign(static_cast<size_t>(f_.num_vars) + 1, 0);
                for (int var = 1; var <= f_.num_vars; ++var) {
                    const int8_t val = values_[static_cast<size_t>(var)];
                    res.model[static_cast<size_t>(var)] = val == 0 ? -1 : val;
                }
                res.decisions = decisions_;
                res.propagations = propagations_;
                return res;
            }
            if (limits.max_decisions >= 0 && decisions_ >= limits.max_decisions)
                return finish_unknown(res);
            ++decisions_;
            stack.push_back({Lit(v), false, trail_.size()});
            assign(Lit(v));
        }
    }

  private:
    static size_t lit_index(Lit l) {
        return 2 * static_cast<size_t>(l.var()) + (l.positive() ? 0 : 1);
    }

    void reset() {
        std::fill(values_.begin(), values_.end(), 0);
        std::fill(num_true_.begin(), num_true_.end(), 0);
        std::fill(num_false_.begin(), num_false_.end(), 0);
        active_occs_ = base_occs_;
        trail_.clear();
        prop_head_ = 0;
        decisions_ = 0;
        propagations_ = 0;
    }

    void assign(Lit l) {
        values_[static_cast<size_t>(l.var())] = l.positive() ? 1 : -1;
        trail_.push_back(l);
        for (int ci : occ_[lit_index(l)]) {
            if (num_true_[static_cast<size_t>(ci)]++ == 0) {
                const auto [off, len] = span_[static_cast<size_t>(ci)];
                for (int k = 0; k < len; ++k)
                    --active_occs_[static_cast<size_t>(
                        lits_[static_cast<size_t>(off + k)].var())];
            }
        }
        for (int ci : occ_[lit_index(-l)]) ++num_false_[static_cast<size_t>(ci)];
    }

    void unassign(Lit l) {
        values_[static_cast<size_t>(l.var())] = 0;
        for (int ci : occ_[lit_index(l)]) {
            if (--num_true_[static_cast<size_t>(ci)] == 0) {
                const auto [off, len] = span_[static_cast<size_t>(ci)];
                for (int k = 0; k < len; ++k)
                    ++active_occs_[static_cast<size_t>(
                        lits_[static_cast<size_t>(off + k)].var())];
            }
        }
        for (int ci : occ_[lit_index(-l)]) --num_false_[static_cast<size_t>(ci)];
    }

    void undo_to(size_t trail_size) {
        while (trail_.size() > trail_size) {
            unassign(trail_.back());
            trail_.pop_back();
        }
        prop_head_ = trail_size;
    }

    // False on conflict.
    bool propagate() {
        for (; prop_head_ < trail_.size(); ++prop_head_) {
            const Lit falsified = -trail_[prop_head_];
            for (int ci : occ_[lit_index(falsified)]) {
                const size_t c = static_cast<size_t>(ci);
                if (num_true_[c] > 0) continue;
                const auto [off, len] = span_[c];
                const int unassigned = len - num_false_[c];
                if (unassigned == 0) return false;
                if (unassigned != 1) continue;
                for (int k = 0; k < len; ++k) {
                    const Lit l = lits_[static_cast<size_t>(off + k)];
                    if (values_[static_cast<size_t>(l.var())] == 0) {
                        assign(l);
                        ++propagations_;
                        break;
                    }
                }
            }
        }
        return true;
    }

    int pick_branch_var() const {
        for (int v = 1; v <= f_.num_vars; ++v)
            if (values_[static_cast<size_t>(v)] == 0 &&
                active_occs_[static_cast<size_t>(v)] > 0)
                return v;
        return -1;
    }

    SolveResult& finish_unsat(SolveResult& res) {
        res.status = SolveStatus::kUnsat;
        res.decisions = decisions_;
        res.propagations = propagations_;
        return res;
    }
    SolveResult& finish_unknown(SolveResult& res) {
        res.status = SolveStatus::kUnknown;
        res.reason = "decision budget exhausted";
        res.decisions = decisions_;
        res.propagations = propagations_;
        return res;
    }

    const CnfFormula& f_;
    std::vector<Lit> lits_;
    std::vector<std::pair<int, int>> span_;
    std::vector<std::vector<int>> occ_;
    std::vector<int> num_true_;
    std::vector<int> num_false_;
    std::vector<int> base_occs_;
    std::vector<int> active_occs_;
    std::vector<int8_t> values_;
    std::vector<Lit> trail_;
    size_t prop_head_ = 0;
    int64_t decisions_ = 0;
    int64_t propagations_ = 0;
};

}  // namespace

SolveResult solve(const CnfFormula& f, std::span<const Lit> assumptions,
                  const SolveLimits& limits) {
    DpllSolver solver(f);
    return solver.solve(assumptions, limits);
}

bool verify_model(const CnfFormula& f, std::span<const int8_t> model) {
    if (f.num_vars > 0 &&
        model.size() < static_cast<size_t>(f.num_vars) + 1)
        throw std::invalid_argument("verify_model: model does not cover all variables");
    for (int v = 1; v <= f.num_vars; ++v)
        if (model[static_cast<size_t>(v)] == 0)
            throw std::invalid_argument("verify_model: partial model");
    for (const Clause& c : f.clauses) {
        bool sat = false;
        for (Lit l : c) {
            if ((model[static_cast<size_t>(l.var())] > 0) == l.positive()) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

CncResult solve_cnc(const CnfFormula& f, const CubeSet& cubes,
                    const SolveLimits& limits, int jobs) {
    if (jobs < 1) throw std::invalid_argument("solve_cnc: jobs must be >= 1");
    if (cubes.open.empty() && cubes.refuted.empty())
        throw std::invalid_argument("solve_cnc: empty cube set");

    CncResult res;
    res.per_open_cube.resize(cubes.open.size());
    std::vector<std::vector<int8_t>> models(cubes.open.size());

    // Every open cube is solved; aggregation below walks canonical order.
    std::atomic<size_t> next{0};
    auto work = [&] {
        DpllSolver solver(f);
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cubes.open.size()) break;
            SolveResult r = solver.solve(cubes.open[i], limits);
            res.per_open_cube[i] = {r.status, r.decisions, r.propagations};
            if (r.status == SolveStatus::kSat) models[i] = std::move(r.model);
        }
    };
    if (jobs == 1 || cubes.open.size() <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        const int count = std::min<int>(jobs, static_cast<int>(cubes.open.size()));
        pool.reserve(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    int first_sat = -1;
    for (size_t i = 0; i < res.per_open_cube.size(); ++i) {
        const CubeOutcome& o = res.per_open_cube[i];
        res.total_decisions += o.decisions;
        res.total_propagations += o.propagations;
        switch (o.status) {
            case SolveStatus::kSat:
                ++res.sat_cubes;
                if (first_sat < 0) first_sat = static_cast<int>(i);
                break;
            case SolveStatus::kUnsat:
                ++res.unsat_cubes;
                break;
            case SolveStatus::kUnknown:
                ++res.unknown_cubes;
                break;
        }
    }
    res.unsat_cubes += static_cast<int>(cubes.refuted.size());

    res.overall.decisions = res.total_decisions;
    res.overall.propagations = res.total_propagations;
    if (first_sat >= 0) {
        res.overall.status = SolveStatus::kSat;
        res.overall.model = std::move(models[static_cast<size_t>(first_sat)]);
    } else if (res.unknown_cubes > 0) {
        res.overall.status = SolveStatus::kUnknown;
        res.overall.reason = "decision budget exhausted on some cube";
    } else {
        res.overall.status = SolveStatus::kUnsat;
    }
    return res;
}

namespace {

std::filesystem::path make_temp_cnf_path() {
    static std::atomic<uint64_t> counter{0};
    const uint64_t id = counter.fetch_add(1);
    return std::filesystem::temp_directory_path() /
           ("cncube-" + std::to_string(::getpid()) + "-" + std::to_string(id) +
            ".cnf");
}

}  // namespace

SolveResult solve_external(const std::string& command_template,
                           const CnfFormula& f, const Cube& cube) {
    const std::filesystem::path path = make_temp_cnf_path();
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("solve_external: cannot write " + path.string());
        emit_subformula(f, cube, out);
    }

    std::string cmd = command_template;
    const std::string placeholder = "{}";
    if (const size_t at = cmd.find(placeholder); at != std::string::npos)
        cmd.replace(at, placeholder.size(), path.string());
    else
        cmd += " " + path.string();

    SolveResult res;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        std::filesystem::remove(path);
        throw std::runtime_error("solve_external: popen failed for: " + cmd);
    }
    std::string output;
    char buf[4096];
    while (size_t got = ::fread(buf, 1, sizeof buf, pipe)) output.append(buf, got);
    const int rc = ::pclose(pipe);
    std::filesystem::remove(path);

    const int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    if (exit_code == 10) {
        res.status = SolveStatus::kSat;
        res.model.assign(static_cast<size_t>(f.num_vars) + 1, 0);
        std::istringstream lines(output);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.size() < 2 || line[0] != 'v') continue;
            std::istringstream ls(line.substr(1));
            long lit = 0;
            while (ls >> lit) {
                if (lit == 0) break;
                const int var = static_cast<int>(lit < 0 ? -lit : lit);
                if (var <= f.num_vars)
                    res.model[static_cast<size_t>(var)] = lit > 0 ? 1 : -1;
            }
        }
        for (int v = 1; v <= f.num_vars; ++v)
            if (res.model[static_cast<size_t>(v)] == 0)
                res.model[static_cast<size_t>(v)] = -1;
    } else if (exit_code == 20) {
        res.status = SolveStatus::kUnsat;
    } else {
        res.status = SolveStatus::kUnknown;
        res.reason = "external solver exit status " + std::to_string(exit_code);
    }
    return res;
}

CncResult solve_cnc_external(const std::string& command_template,
                             const CnfFormula& f, const CubeSet& cubes) {
    if (cubes.open.empty() && cubes.refuted.empty())
        throw std::invalid_argument("solve_cnc_external: empty cube set");
    CncResult res;
    res.per_open_cube.resize(cubes.open.size());
    int first_sat = -1;
    std::vector<int8_t> first_model;
    for (size_t i = 0; i < cubes.open.size(); ++i) {
        SolveResult r = solve_external(command_template, f, cubes.open[i]);
        res.per_open_cube[i] = {r.status, 0, 0};
        switch (r.status) {
            case SolveStatus::kSat:
                ++res.sat_cubes;
                if (first_sat < 0) {
                    first_sat = static_cast<int>(i);
                    first_model = std::move(r.model);
                }
                break;
            case SolveStatus::kUnsat:
                ++res.unsat_cubes;
                break;
            case SolveStatus::kUnknown:
                ++res.unknown_cubes;
                break;
        }
    }
    res.unsat_cubes += static_cast<int>(cubes.refuted.size());
    if (first_sat >= 0) {
        res.overall.status = SolveStatus::kSat;
        res.overall.model = std::move(first_model);
    } else if (res.unknown_cubes > 0) {
        res.overall.status = SolveStatus::kUnknown;
        res.overall.reason = "external solver undecided on some cube";
    } else {
        res.overall.status = SolveStatus::kUnsat;
    }
    return res;
}

}  // namespace cnc
