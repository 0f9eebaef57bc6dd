#pragma once

#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cncube/bcp.hpp"
#include "cncube/cnf.hpp"

namespace cnc::test {

inline CnfFormula make_formula(int num_vars,
                               std::initializer_list<std::vector<int>> clauses) {
    CnfFormula f;
    f.num_vars = num_vars;
    for (const auto& c : clauses) {
        Clause cl;
        for (int code : c) cl.push_back(Lit(code));
        f.clauses.push_back(std::move(cl));
    }
    return f;
}

inline std::vector<Lit> lits(std::initializer_list<int> codes) {
    std::vector<Lit> out;
    for (int c : codes) out.push_back(Lit(c));
    return out;
}

// The running example: (x1 v x2) /\ (~x1 v x2) /\ (~x2 v x3).
inline CnfFormula formula_a() {
    return make_formula(3, {{1, 2}, {-1, 2}, {-2, 3}});
}

inline CnfFormula parse(const std::string& text,
                        std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    return parse_dimacs(in, warnings);
}

// Replays a cube the way the episode built it: at each prefix the
// failed-literal fixpoint runs first and its forcings join the assumption
// list, then the next decision literal is appended.
struct CubeReplay {
    bool refuted = false;
    int eliminated = 0;
    bool has_actions = false;
    std::vector<Lit> assumptions;  // decisions + accumulated forcings
};

inline CubeReplay replay_cube(Propagator& engine, const Cube& cube) {
    CubeReplay r;
    for (size_t i = 0; i <= cube.size(); ++i) {
        FixpointResult fp = engine.failed_literal_fixpoint(r.assumptions);
        if (fp.refuted) {
            r.refuted = true;
            return r;
        }
        r.assumptions.insert(r.assumptions.end(), fp.forced.begin(), fp.forced.end());
        if (i == cube.size()) {
            r.eliminated = fp.trail.assigned_count();
            r.has_actions = !fp.probes.empty();
            break;
        }
        r.assumptions.push_back(cube[i]);
    }
    return r;
}

}  // namespace cnc::test
