// CNF formulas, cubes, and the DIMACS / iCNF text formats.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnc {

// A literal in DIMACS encoding: +v asserts variable v, -v asserts its
// negation. The code is never 0.
struct Lit {
    int code = 0;

    constexpr Lit() = default;
    constexpr explicit Lit(int dimacs) : code(dimacs) {}

    constexpr int var() const { return code < 0 ? -code : code; }
    constexpr bool positive() const { return code > 0; }
    constexpr Lit operator-() const { return Lit(-code); }

    friend constexpr bool operator==(Lit a, Lit b) { return a.code == b.code; }
    friend constexpr bool operator!=(Lit a, Lit b) { return a.code != b.code; }
    friend constexpr bool operator<(Lit a, Lit b) { return a.code < b.code; }
};

using Clause = std::vector<Lit>;

// An ordered conjunction of decision literals. Order is split order; no
// variable occurs twice and no complementary pair is present.
using Cube = std::vector<Lit>;

// Immutable after parsing; safe to share across threads. Clause order is
// preserved from the input since propagation order depends on it.
struct CnfFormula {
    int num_vars = 0;
    std::vector<Clause> clauses;

    bool has_empty_clause() const {
        for (const Clause& c : clauses)
            if (c.empty()) return true;
        return false;
    }
};

// Cubes produced by one episode, in depth-first (positive branch first)
// leaf order. Open cubes lead to sub-formulas still to be solved; refuted
// cubes conflicted under propagation and are UNSAT without search.
struct CubeSet {
    std::vector<Cube> open;
    std::vector<Cube> refuted;

    size_t size() const { return open.size() + refuted.size(); }
};

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

// Reads DIMACS CNF. Tautological clauses are dropped and duplicate literals
// merged (first occurrence kept), so downstream propagation counts are
// well-defined. A declared clause count that disagrees with the body is
// tolerated with a warning; the declared variable count is raised to the
// maximum variable actually seen. Hard errors (bad header, non-integer
// token) throw ParseError with the offending line number.
CnfFormula parse_dimacs(std::istream& in,
                        std::vector<std::string>* warnings = nullptr);

// Writes f back out as DIMACS.
void write_dimacs(const CnfFormula& f, std::ostream& out);

// Writes the sub-formula f /\ cube: same header variable count, clause
// count |f.clauses| + |cube|, f's clauses followed by one unit clause per
// cube literal.
void emit_subformula(const CnfFormula& f, const Cube& cube, std::ostream& out);

// Incremental CNF cube file: "p inccnf" header, one "a l1 ... lk 0" line
// per open cube in stored order, then refuted cubes as "c refuted a ... 0"
// comment lines.
void write_icnf(const CubeSet& cubes, std::ostream& out);

// Reads a cube file written by write_icnf (or any iCNF "a ..." lines).
// A missing "p inccnf" header or a malformed cube line throws ParseError.
CubeSet parse_icnf(std::istream& in);

}  // namespace cnc
