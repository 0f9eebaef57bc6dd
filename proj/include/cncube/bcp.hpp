// Boolean constraint propagation: unit propagation to a fixed point under
// assumptions, literal probing, and the failed-literal fixpoint.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cncube/cnf.hpp"

namespace cnc {

enum class LitKind : uint8_t { kAssumption, kImplied };

// The assignment sequence of one propagation run. Assumptions appear first
// in the order given, implied literals in FIFO discovery order.
struct Trail {
    struct Entry {
        Lit lit;
        LitKind kind;
    };

    std::vector<Entry> order;
    std::vector<int8_t> values;  // indexed by var: 0 unassigned, +1 true, -1 false
    int num_assumptions = 0;
    int num_implied = 0;

    int assigned_count() const { return static_cast<int>(order.size()); }
    int8_t value(int var) const { return values[static_cast<size_t>(var)]; }
    bool satisfies(Lit l) const {
        int8_t v = value(l.var());
        return v != 0 && (v > 0) == l.positive();
    }
};

// Either the unique unit-propagation fixed point, or the index of the
// clause that became empty.
struct PropagationOutcome {
    bool conflict = false;
    int conflict_clause = -1;
    Trail trail;

    int num_implied() const { return trail.num_implied; }
};

// Marginal propagation counts of probing one variable in both directions.
// A disengaged direction means that probe conflicted; conflicts are
// resolved (via the failed-literal fixpoint) before any scoring.
struct ProbeResult {
    std::optional<int> pos;
    std::optional<int> neg;

    bool conflict_free() const { return pos.has_value() && neg.has_value(); }
};

struct FixpointResult {
    bool refuted = false;
    std::vector<Lit> forced;  // failed-literal consequences, in discovery order
    Trail trail;              // fixed point of base + forced (empty if refuted)
    // Clean probe results of the final round, ascending by variable. These
    // are exactly the marginal counts a caller needs for scoring, so the
    // terminating round is not wasted work.
    std::vector<std::pair<int, ProbeResult>> probes;

    int eliminated() const { return trail.assigned_count(); }
};

// One propagation engine per worker. The engine holds mutable scratch state
// (stamped assignment arrays, occurrence lists) sized to one formula;
// engines over the same shared CnfFormula may run concurrently without
// coordination.
class Propagator {
  public:
    explicit Propagator(const CnfFormula& f);

    // Unit propagation from the assumptions to the unique fixed point.
    // Propagation order is pinned: assumptions in the order given, then the
    // formula's own unit clauses in database order, then FIFO over
    // occurrence lists in ascending clause index. The implied *count* is
    // order-independent; the trail sequence is not, so the order is part of
    // the contract. Throws std::invalid_argument if an assumption variable
    // exceeds num_vars or the assumptions contain duplicates/complements.
    PropagationOutcome propagate(std::span<const Lit> assumptions);

    // Marginal propagations of asserting var in each direction on top of
    // base: implied(base + l) - implied(base). Requires var unassigned
    // under the base fixed point and the base itself non-conflicting.
    ProbeResult probe_pair(std::span<const Lit> base, int var);

    // Variables unassigned under the base fixed point that occur in at
    // least one clause not satisfied by it, ascending. Throws
    // std::invalid_argument if the base conflicts.
    std::vector<int> valid_actions(std::span<const Lit> base);

    // Rounds of probing every valid action. Each single-direction conflict
    // forces the opposite literal; all forcings of a round are asserted
    // together and probing restarts on the grown base. A variable failing
    // in both directions, or the base itself conflicting, refutes the node.
    // Terminates because every round strictly grows the assignment.
    FixpointResult failed_literal_fixpoint(std::span<const Lit> base);

    const CnfFormula& formula() const { return formula_; }
    uint64_t bcp_calls() const { return bcp_calls_; }

  private:
    enum class RunStatus { kExtended, kConflict };

    RunStatus run(std::span<const Lit> assumptions);
    Trail extract_trail(int num_assumptions) const;
    // Implied count of the fixed point, or -1 on conflict. Fast path that
    // skips trail materialization; this is what probing loops hit.
    int count_implied(std::span<const Lit> assumptions);
    std::vector<int> valid_actions_of_current_run();

    const CnfFormula& formula_;

    // Flattened clause storage and per-literal occurrence lists, built once.
    std::vector<Lit> clause_lits_;
    std::vector<std::pair<int, int>> clause_span_;  // offset, length
    std::vector<std::vector<int>> occ_;             // lit index -> clause indices
    std::vector<Lit> initial_units_;
    std::vector<int> initial_unit_clause_;
    int empty_clause_ = -1;

    // Stamped assignment: values_ entry is live iff stamp_of_[var] == stamp_.
    std::vector<int8_t> values_;
    std::vector<uint64_t> stamp_of_;
    uint64_t stamp_ = 0;

    std::vector<Lit> queue_;  // doubles as the trail of the current run
    std::vector<Lit> probe_buf_;
    std::vector<uint8_t> candidate_mark_;
    int conflict_clause_ = -1;
    uint64_t bcp_calls_ = 0;

    int8_t value_of(int var) const {
        return stamp_of_[static_cast<size_t>(var)] == stamp_
                   ? values_[static_cast<size_t>(var)]
                   : static_cast<int8_t>(0);
    }
    bool assign(Lit l);  // false if l is already false
    static size_t lit_index(Lit l) {
        return 2 * static_cast<size_t>(l.var()) + (l.positive() ? 0 : 1);
    }
};

}  // namespace cnc
