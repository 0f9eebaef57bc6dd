#include "cncube/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace cnc {

namespace {

bool parse_int(std::string_view token, long& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

// Duplicate literals are merged (first occurrence kept) and tautologies
// signalled so the caller can drop the clause.
bool normalize_clause(Clause& c) {
    Clause kept;
    kept.reserve(c.size());
    for (Lit l : c) {
        bool dup = false;
        for (Lit k : kept) {
            if (k == l) {
                dup = true;
                break;
            }
            if (k == -l) return true;  // tautology
        }
        if (!dup) kept.push_back(l);
    }
    c = std::move(kept);
    return false;
}

void write_clause(const Clause& c, std::ostream& out) {
    for (Lit l : c) out << l.code << ' ';
    out << "0\n";
}

}  // namespace

CnfFormula parse_dimacs(std::istream& in, std::vector<std::string>* warnings) {
    CnfFormula f;
    bool header_seen = false;
    long declared_vars = 0;
    long declared_clauses = 0;
    int max_var_seen = 0;
    Clause current;

    auto warn = [&](const std::string& msg) {
        if (warnings) warnings->push_back(msg);
    };

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line
        if (tok[0] == 'c') continue;  // comment ("c ..." or the wild "cfoo" style)
        if (tok[0] == '%') break;  // SATLIB-style trailer ends the clause section

        if (tok == "p") {
            if (header_seen)
                throw ParseError(line_no, "duplicate 'p' header");
            std::string fmt, rest;
            long v = 0, cl = 0;
            std::string vtok, ctok;
            if (!(ls >> fmt >> vtok >> ctok) || fmt != "cnf" ||
                !parse_int(vtok, v) || !parse_int(ctok, cl) || v < 0 || cl < 0 ||
                (ls >> rest))
                throw ParseError(line_no, "malformed header, expected 'p cnf <vars> <clauses>'");
            declared_vars = v;
            declared_clauses = cl;
            header_seen = true;
            continue;
        }

        if (!header_seen)
            throw ParseError(line_no, "clause data before 'p cnf' header");

        // Clause tokens; a clause may span lines and is closed by 0.
        do {
            long val = 0;
            if (!parse_int(tok, val))
                throw ParseError(line_no, "expected integer literal, got '" + tok + "'");
            if (val == 0) {
                if (normalize_clause(current)) {
                    current.clear();  // tautology dropped
                } else {
                    f.clauses.push_back(std::move(current));
                    current = Clause{};
                }
            } else {
                Lit l(static_cast<int>(val));
                max_var_seen = std::max(max_var_seen, l.var());
                current.push_back(l);
            }
        } while (ls >> tok);
    }

    if (!header_seen)
        throw ParseError(line_no == 0 ? 1 : line_no, "missing 'p cnf' header");
    if (!current.empty()) {
        warn("final clause not terminated by 0; kept as-is");
        if (!normalize_clause(current)) f.clauses.push_back(std::move(current));
    }
    if (static_cast<long>(f.clauses.size()) != declared_clauses)
        warn("header declares " + std::to_string(declared_clauses) +
             " clauses, parsed " + std::to_string(f.clauses.size()) +
             " (after normalization)");

    f.num_vars = static_cast<int>(std::max(declared_vars, static_cast<long>(max_var_seen)));
    return f;
}

void write_dimacs(const CnfFormula& f, std::ostream& out) {
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const Clause& c : f.clauses) write_clause(c, out);
}

void emit_subformula(const CnfFormula& f, const Cube& cube, std::ostream& out) {
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() + cube.size() << '\n';
    for (const Clause& c : f.clauses) write_clause(c, out);
    for (Lit l : cube) out << l.code << " 0\n";
}

void write_icnf(const CubeSet& cubes, std::ostream& out) {
    out << "p inccnf\n";
    for (const Cube& c : cubes.open) {
        out << 'a';
        for (Lit l : c) out << ' ' << l.code;
        out << " 0\n";
    }
    for (const Cube& c : cubes.refuted) {
        out << "c refuted a";
        for (Lit l : c) out << ' ' << l.code;
        out << " 0\n";
    }
}

namespace {

Cube parse_cube_tokens(std::istringstream& ls, int line_no) {
    Cube cube;
    std::string tok;
    bool closed = false;
    while (ls >> tok) {
        if (closed)
            throw ParseError(line_no, "tokens after closing 0 in cube line");
        long val = 0;
        if (!parse_int(tok, val))
            throw ParseError(line_no, "expected integer literal, got '" + tok + "'");
        if (val == 0) {
            closed = true;
            continue;
        }
        Lit l(static_cast<int>(val));
        for (Lit k : cube)
            if (k.var() == l.var())
                throw ParseError(line_no, "variable repeated inside cube");
        cube.push_back(l);
    }
    if (!closed) throw ParseError(line_no, "cube line not terminated by 0");
    return cube;
}

}  // namespace

CubeSet parse_icnf(std::istream& in) {
    CubeSet cubes;
    bool header_seen = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;

        if (!header_seen) {
            std::string fmt, rest;
            if (tok != "p" || !(ls >> fmt) || fmt != "inccnf" || (ls >> rest))
                throw ParseError(line_no, "expected 'p inccnf' header");
            header_seen = true;
            continue;
        }
        if (tok == "a") {
            cubes.open.push_back(parse_cube_tokens(ls, line_no));
        } else if (tok == "c") {
            std::string word;
            if (ls >> word && word == "refuted") {
                std::string a;
                if (!(ls >> a) || a != "a")
                    throw ParseError(line_no, "malformed refuted-cube comment");
                cubes.refuted.push_back(parse_cube_tokens(ls, line_no));
            }
            // other comments are skipped
        } else {
            throw ParseError(line_no, "unexpected line in iCNF cube file");
        }
    }
    if (!header_seen)
        throw ParseError(line_no == 0 ? 1 : line_no, "expected 'p inccnf' header");
    return cubes;
}

}  // namespace cnc
