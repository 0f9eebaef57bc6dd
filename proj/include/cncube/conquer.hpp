// Embedded conquering solver: complete DPLL with unit propagation and
// chronological backtracking, plus cube-and-conquer aggregation over a
// cube set. Kept learning-free so the decision count is a deterministic,
// hardware-independent effort metric.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cncube/cnf.hpp"

namespace cnc {

enum class SolveStatus : uint8_t { kSat, kUnsat, kUnknown };

struct SolveLimits {
    int64_t max_decisions = -1;  // < 0: unlimited
};

struct SolveResult {
    SolveStatus status = SolveStatus::kUnknown;
    std::string reason;          // only for kUnknown
    std::vector<int8_t> model;   // var-indexed, entries +1/-1; empty unless kSat
    int64_t decisions = 0;       // branch literals placed, flips included
    int64_t propagations = 0;    // implied literals placed, backtracked ones included
};

// Complete DPLL under assumptions. Branches on the lowest-indexed
// unassigned variable that occurs in a not-yet-satisfied clause, positive
// polarity first. Deterministic; returns kUnknown only when the decision
// limit is exceeded.
SolveResult solve(const CnfFormula& f, std::span<const Lit> assumptions,
                  const SolveLimits& limits = {});

// True iff the total assignment satisfies every clause. The model must
// assign all variables (entries +1/-1); a partial model is an error.
bool verify_model(const CnfFormula& f, std::span<const int8_t> model);

struct CubeOutcome {
    SolveStatus status = SolveStatus::kUnknown;
    int64_t decisions = 0;
    int64_t propagations = 0;
};

struct CncResult {
    SolveResult overall;
    std::vector<CubeOutcome> per_open_cube;  // canonical (stored) cube order
    int64_t total_decisions = 0;
    int64_t total_propagations = 0;
    int sat_cubes = 0;
    int unsat_cubes = 0;  // includes refuted cubes, which are not solved
    int unknown_cubes = 0;
};

// Solves f /\ c for every open cube; refuted cubes count UNSAT without
// search. Every open cube is solved even after a model is found so the
// aggregated effort metric does not depend on scheduling; the reported
// model is the one of the first satisfiable cube in canonical order.
CncResult solve_cnc(const CnfFormula& f, const CubeSet& cubes,
                    const SolveLimits& limits = {}, int jobs = 1);

// External conquering solver escape hatch. The command receives the path
// of a DIMACS file holding f /\ cube ("{}" in the template is replaced by
// the path; if absent the path is appended). Exit status 10 means SAT
// (a "v ..." model is parsed from stdout when present), 20 means UNSAT,
// anything else UNKNOWN.
SolveResult solve_external(const std::string& command_template,
                           const CnfFormula& f, const Cube& cube);
CncResult solve_cnc_external(const std::string& command_template,
                             const CnfFormula& f, const CubeSet& cubes);

}  // namespace cnc
