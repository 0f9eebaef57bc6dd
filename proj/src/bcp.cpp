#include "cncube/bcp.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>

namespace cnc {

Propagator::Propagator(const CnfFormula& f) : formula_(f) {
    const size_t nv = static_cast<size_t>(f.num_vars);
    occ_.assign(2 * (nv + 1), {});
    values_.assign(nv + 1, 0);
    stamp_of_.assign(nv + 1, 0);

    clause_span_.reserve(f.clauses.size());
    for (size_t ci = 0; ci < f.clauses.size(); ++ci) {
        const Clause& c = f.clauses[ci];
        clause_span_.emplace_back(static_cast<int>(clause_lits_.size()),
                                  static_cast<int>(c.size()));
        for (Lit l : c) {
            assert(l.var() <= f.num_vars);
            clause_lits_.push_back(l);
            occ_[lit_index(l)].push_back(static_cast<int>(ci));
        }
        if (c.empty() && empty_clause_ < 0) empty_clause_ = static_cast<int>(ci);
        if (c.size() == 1) initial_units_.push_back(c[0]);
    }
    // Initial units keep their clause index for conflict reporting.
    initial_unit_clause_.reserve(initial_units_.size());
    for (size_t ci = 0; ci < f.clauses.size(); ++ci)
        if (f.clauses[ci].size() == 1)
            initial_unit_clause_.push_back(static_cast<int>(ci));
}

bool Propagator::assign(Lit l) {
    const size_t v = static_cast<size_t>(l.var());
    const int8_t want = l.positive() ? 1 : -1;
    if (stamp_of_[v] == stamp_) return values_[v] == want;
    stamp_of_[v] = stamp_;
    values_[v] = want;
    queue_.push_back(l);
    return true;
}

// One propagation run: assumptions in order, then the formula's own unit
// clauses in database order, then FIFO over occurrence lists. queue_ is
// the trail of the run; its first num_assumptions entries are assumptions.
Propagator::RunStatus Propagator::run(std::span<const Lit> assumptions) {
    ++bcp_calls_;
    ++stamp_;
    queue_.clear();
    conflict_clause_ = -1;

    for (Lit a : assumptions) {
        if (a.code == 0 || a.var() > formula_.num_vars)
            throw std::invalid_argument("propagate: assumption variable out of range");
        const size_t v = static_cast<size_t>(a.var());
        if (stamp_of_[v] == stamp_)
            throw std::invalid_argument(
                "propagate: duplicate or complementary assumption on variable " +
                std::to_string(a.var()));
        stamp_of_[v] = stamp_;
        values_[v] = a.positive() ? 1 : -1;
        queue_.push_back(a);
    }

    if (empty_clause_ >= 0) {
        conflict_clause_ = empty_clause_;
        return RunStatus::kConflict;
    }
    for (size_t i = 0; i < initial_units_.size(); ++i) {
        if (!assign(initial_units_[i])) {
            conflict_clause_ = initial_unit_clause_[i];
            return RunStatus::kConflict;
        }
    }

    for (size_t head = 0; head < queue_.size(); ++head) {
        const Lit falsified = -queue_[head];
        for (int ci : occ_[lit_index(falsified)]) {
            const auto [off, len] = clause_span_[static_cast<size_t>(ci)];
            bool satisfied = false;
            int unassigned = 0;
            Lit unit{};
            for (int k = 0; k < len; ++k) {
                const Lit l = clause_lits_[static_cast<size_t>(off + k)];
                const int8_t v = value_of(l.var());
                if (v == 0) {
                    if (++unassigned > 1) break;
                    unit = l;
                } else if ((v > 0) == l.positive()) {
                    satisfied = true;
                    break;
                }
            }
            if (satisfied || unassigned > 1) continue;
            if (unassigned == 0) {
                conflict_clause_ = ci;
                return RunStatus::kConflict;
            }
            assign(unit);  // cannot fail: unit is unassigned
        }
    }
    return RunStatus::kExtended;
}

Trail Propagator::extract_trail(int num_assumptions) const {
    Trail t;
    t.values.assign(static_cast<size_t>(formula_.num_vars) + 1, 0);
    t.order.reserve(queue_.size());
    for (size_t i = 0; i < queue_.size(); ++i) {
        const Lit l = queue_[i];
        const LitKind kind = static_cast<int>(i) < num_assumptions
                                 ? LitKind::kAssumption
                                 : LitKind::kImplied;
        t.order.push_back({l, kind});
        t.values[static_cast<size_t>(l.var())] = l.positive() ? 1 : -1;
    }
    t.num_assumptions = num_assumptions;
    t.num_implied = static_cast<int>(queue_.size()) - num_assumptions;
    return t;
}

PropagationOutcome Propagator::propagate(std::span<const Lit> assumptions) {
    PropagationOutcome out;
    if (run(assumptions) == RunStatus::kConflict) {
        out.conflict = true;
        out.conflict_clause = conflict_clause_;
        return out;
    }
    out.trail = extract_trail(static_cast<int>(assumptions.size()));
    return out;
}

int Propagator::count_implied(std::span<const Lit> assumptions) {
    if (run(assumptions) == RunStatus::kConflict) return -1;
    return static_cast<int>(queue_.size()) - static_cast<int>(assumptions.size());
}

ProbeResult Propagator::probe_pair(std::span<const Lit> base, int var) {
    const int base_implied = count_implied(base);
    if (base_implied < 0)
        throw std::invalid_argument("probe_pair: base assumptions conflict");
    if (value_of(var) != 0)
        throw std::invalid_argument("probe_pair: variable already assigned under base");

    probe_buf_.assign(base.begin(), base.end());
    probe_buf_.push_back(Lit(var));
    ProbeResult res;
    int c = count_implied(probe_buf_);
    if (c >= 0) res.pos = c - base_implied;
    probe_buf_.back() = Lit(-var);
    c = count_implied(probe_buf_);
    if (c >= 0) res.neg = c - base_implied;
    return res;
}

std::vector<int> Propagator::valid_actions(std::span<const Lit> base) {
    if (run(base) == RunStatus::kConflict)
        throw std::invalid_argument("valid_actions: base assumptions conflict");
    return valid_actions_of_current_run();
}

// Unassigned variables occurring in at least one clause the current fixed
// point does not satisfy, ascending. Must be called right after a
// successful run, before probing clobbers the stamps.
std::vector<int> Propagator::valid_actions_of_current_run() {
    candidate_mark_.assign(static_cast<size_t>(formula_.num_vars) + 1, 0);
    for (size_t ci = 0; ci < clause_span_.size(); ++ci) {
        const auto [off, len] = clause_span_[ci];
        bool satisfied = false;
        for (int k = 0; k < len; ++k) {
            const Lit l = clause_lits_[static_cast<size_t>(off + k)];
            const int8_t v = value_of(l.var());
            if (v != 0 && (v > 0) == l.positive()) {
                satisfied = true;
                break;
            }
        }
        if (satisfied) continue;
        for (int k = 0; k < len; ++k) {
            const Lit l = clause_lits_[static_cast<size_t>(off + k)];
            if (value_of(l.var()) == 0) candidate_mark_[static_cast<size_t>(l.var())] = 1;
        }
    }
    std::vector<int> out;
    for (int v = 1; v <= formula_.num_vars; ++v)
        if (candidate_mark_[static_cast<size_t>(v)]) out.push_back(v);
    return out;
}

FixpointResult Propagator::failed_literal_fixpoint(std::span<const Lit> base) {
    FixpointResult res;
    std::vector<Lit> grown(base.begin(), base.end());
    const int base_count = static_cast<int>(base.size());

    for (;;) {
        const int implied = count_implied(grown);
        if (implied < 0) {
            res.refuted = true;
            return res;
        }
        const std::vector<int> actions = valid_actions_of_current_run();

        // Probe every valid action under the current base. All forcings of
        // the round are collected first and asserted together; probing then
        // restarts on the grown base. If no probe conflicts the round's
        // results double as the node's clean scores.
        res.probes.clear();
        res.probes.reserve(actions.size());
        size_t forced_before = res.forced.size();
        bool both_failed = false;
        for (int var : actions) {
            probe_buf_.assign(grown.begin(), grown.end());
            probe_buf_.push_back(Lit(var));
            const int pos = count_implied(probe_buf_);
            probe_buf_.back() = Lit(-var);
            const int neg = count_implied(probe_buf_);
            if (pos < 0 && neg < 0) {
                both_failed = true;
                break;
            }
            if (pos < 0) {
                res.forced.push_back(Lit(-var));
            } else if (neg < 0) {
                res.forced.push_back(Lit(var));
            } else {
                ProbeResult pr;
                pr.pos = pos - implied;
                pr.neg = neg - implied;
                res.probes.emplace_back(var, pr);
            }
        }
        if (both_failed) {
            res.refuted = true;
            res.probes.clear();
            return res;
        }
        if (res.forced.size() == forced_before) {
            // Fixed point reached; re-derive the trail of the final base.
            const int final_implied = count_implied(grown);
            assert(final_implied == implied);
            (void)final_implied;
            res.trail = extract_trail(base_count);
            return res;
        }
        grown.insert(grown.end(), res.forced.begin() + static_cast<long>(forced_before),
                     res.forced.end());
    }
}

}  // namespace cnc
