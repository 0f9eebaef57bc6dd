#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "cncube/cnf.hpp"
#include "cncube/gen.hpp"
#include "cncube/rng.hpp"

using namespace cnc;
using cnc::test::lits;
using cnc::test::parse;

TEST_CASE("parse_dimacs reads a plain formula") {
    CnfFormula f = parse("p cnf 2 2\n1 -2 0\n-1 2 0");
    CHECK(f.num_vars == 2);
    REQUIRE(f.clauses.size() == 2);
    CHECK(f.clauses[0] == lits({1, -2}));
    CHECK(f.clauses[1] == lits({-1, 2}));
}

TEST_CASE("parse_dimacs drops tautologies and merges duplicates") {
    CnfFormula f = parse("p cnf 1 1\n1 -1 0");
    CHECK(f.num_vars == 1);
    CHECK(f.clauses.empty());

    f = parse("p cnf 2 1\n1 1 2 0");
    REQUIRE(f.clauses.size() == 1);
    CHECK(f.clauses[0] == lits({1, 2}));
}

TEST_CASE("parse_dimacs reports malformed tokens with line numbers") {
    CHECK_THROWS_AS(parse("p cnf 2 1\n1 x 0"), ParseError);
    try {
        parse("p cnf 2 1\n1 x 0");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse("p cnf a 1\n1 0"), ParseError);
    CHECK_THROWS_AS(parse("p cnf 2 1 0\n1 0"), ParseError);  // junk inside header
    CHECK_THROWS_AS(parse("1 2 0\np cnf 2 1\n"), ParseError);
    CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("parse_dimacs tolerates count mismatches with a warning") {
    std::vector<std::string> warnings;
    CnfFormula f = parse("c comment\np cnf 2 5\n1 2 0\n", &warnings);
    CHECK(f.clauses.size() == 1);
    CHECK(!warnings.empty());

    // Declared variable count below the maximum seen is raised.
    warnings.clear();
    f = parse("p cnf 1 1\n1 4 0\n", &warnings);
    CHECK(f.num_vars == 4);
}

TEST_CASE("parse_dimacs accepts clauses spanning lines and blank lines") {
    CnfFormula f = parse("p cnf 3 2\n1 2\n3 0\n\n-1 -3 0\n");
    REQUIRE(f.clauses.size() == 2);
    CHECK(f.clauses[0] == lits({1, 2, 3}));
}

TEST_CASE("write_icnf emits open cubes then refuted comments") {
    CubeSet cubes;
    cubes.open.push_back(lits({1}));
    cubes.open.push_back(lits({-1, 2}));
    cubes.open.push_back(lits({-1, -2}));
    std::ostringstream out;
    write_icnf(cubes, out);
    CHECK(out.str() == "p inccnf\na 1 0\na -1 2 0\na -1 -2 0\n");

    CubeSet refuted_only;
    refuted_only.refuted.push_back(lits({1, 3}));
    out.str("");
    write_icnf(refuted_only, out);
    CHECK(out.str() == "p inccnf\nc refuted a 1 3 0\n");

    out.str("");
    write_icnf(CubeSet{}, out);
    CHECK(out.str() == "p inccnf\n");
}

TEST_CASE("emit_subformula appends unit clauses for the cube") {
    CnfFormula f = cnc::test::make_formula(3, {{1, 2}, {-1, 3}});
    std::ostringstream out;

    emit_subformula(f, lits({-3}), out);
    CHECK(out.str() == "p cnf 3 3\n1 2 0\n-1 3 0\n-3 0\n");

    out.str("");
    emit_subformula(f, {}, out);
    std::ostringstream plain;
    write_dimacs(f, plain);
    CHECK(out.str() == plain.str());

    out.str("");
    emit_subformula(f, lits({1, 2}), out);
    CHECK(out.str() == "p cnf 3 4\n1 2 0\n-1 3 0\n1 0\n2 0\n");
}

TEST_CASE("parse_icnf round-trips cube sets and validates the header") {
    CubeSet cubes;
    cubes.open.push_back(lits({1, -2}));
    cubes.open.push_back(lits({-1}));
    cubes.refuted.push_back(lits({2, 3}));
    std::ostringstream out;
    write_icnf(cubes, out);

    std::istringstream in(out.str());
    CubeSet back = parse_icnf(in);
    CHECK(back.open == cubes.open);
    CHECK(back.refuted == cubes.refuted);

    std::istringstream no_header("a 1 0\n");
    CHECK_THROWS_AS(parse_icnf(no_header), ParseError);
    std::istringstream bad_line("p inccnf\nq 1 0\n");
    CHECK_THROWS_AS(parse_icnf(bad_line), ParseError);
    std::istringstream unterminated("p inccnf\na 1 2\n");
    CHECK_THROWS_AS(parse_icnf(unterminated), ParseError);
}

TEST_CASE("dimacs round-trip is stable after normalization") {
    SplitMix64 rng(7);
    for (int round = 0; round < 50; ++round) {
        CnfFormula f = oracle::random_mixed_formula(rng, 10, 30);
        std::ostringstream out;
        write_dimacs(f, out);
        CnfFormula g = parse(out.str());
        // Normalization happened on the way in for both (the generator never
        // makes tautologies or duplicate literals), so this is equality.
        CHECK(g.num_vars == f.num_vars);
        REQUIRE(g.clauses.size() == f.clauses.size());
        for (size_t i = 0; i < f.clauses.size(); ++i) CHECK(g.clauses[i] == f.clauses[i]);

        // And a second round trip is bit-stable even for dirty input.
        std::ostringstream out2;
        write_dimacs(g, out2);
        CHECK(out.str() == out2.str());
    }
}

TEST_CASE("icnf lines match the declared grammar") {
    SplitMix64 rng(11);
    CubeSet cubes;
    for (int i = 0; i < 20; ++i) {
        Cube c;
        int len = static_cast<int>(rng.below(5));
        for (int j = 0; j < len; ++j) {
            int var = 1 + static_cast<int>(rng.below(30));
            bool seen = false;
            for (Lit l : c) seen = seen || l.var() == var;
            if (!seen) c.push_back(Lit(rng.coin() ? var : -var));
        }
        if (rng.coin())
            cubes.open.push_back(c);
        else
            cubes.refuted.push_back(c);
    }
    std::ostringstream out;
    write_icnf(cubes, out);
    std::istringstream lines(out.str());
    std::string line;
    bool first = true;
    while (std::getline(lines, line)) {
        if (first) {
            CHECK(line == "p inccnf");
            first = false;
            continue;
        }
        if (line.rfind("c ", 0) == 0) continue;
        REQUIRE(line.rfind("a ", 0) == 0);
        std::istringstream ls(line.substr(1));
        long v = 0;
        long last = -1;
        while (ls >> v) last = v;
        CHECK(last == 0);
    }
}
