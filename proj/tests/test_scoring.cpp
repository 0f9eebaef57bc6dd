#include <cmath>
#include <tuple>

#include "doctest.h"

#include "cncube/rng.hpp"
#include "cncube/scoring.hpp"

using namespace cnc;

namespace {

std::vector<std::pair<int, ProbeResult>> probes_of(
    std::initializer_list<std::tuple<int, int, int>> entries) {
    std::vector<std::pair<int, ProbeResult>> out;
    for (const auto& [var, pos, neg] : entries) {
        ProbeResult pr;
        pr.pos = pos;
        pr.neg = neg;
        out.emplace_back(var, pr);
    }
    return out;
}

}  // namespace

TEST_CASE("prop_rate is implied over cube size") {
    CHECK(prop_rate(6, 2) == doctest::Approx(3.0));
    CHECK(prop_rate(0, 1) == doctest::Approx(0.0));
    CHECK_THROWS_AS(prop_rate(5, 0), std::domain_error);
}

TEST_CASE("pair_score arithmetic") {
    CHECK(pair_score(3, 2) == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(pair_score(0, 0) == doctest::Approx(0.0));
    CHECK(pair_score(2, 2) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("pair_score is symmetric, anchored at zero, strictly monotone") {
    SplitMix64 rng(3);
    for (int i = 0; i < 200; ++i) {
        const double a = rng.below(1000) / 10.0;
        const double b = rng.below(1000) / 10.0;
        CHECK(pair_score(a, b) == pair_score(b, a));
        CHECK(pair_score(a, 0.0) == doctest::Approx(a));
        CHECK(pair_score(a + 0.5, b) > pair_score(a, b));
        CHECK(pair_score(a, b + 0.5) > pair_score(a, b));
    }
}

TEST_CASE("priors sum-normalize the pair scores") {
    PriorVector p = priors(probes_of({{1, 2, 2}, {2, 1, 0}}));
    REQUIRE(p.size() == 2);
    CHECK(p[0].second == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
    CHECK(p[1].second == doctest::Approx(1.0 / 9.0).epsilon(1e-12));

    p = priors(probes_of({{1, 0, 0}, {2, 0, 0}}));
    CHECK(p[0].second == doctest::Approx(0.5));
    CHECK(p[1].second == doctest::Approx(0.5));

    p = priors(probes_of({{1, 3, 2}}));
    CHECK(p[0].second == doctest::Approx(1.0));
}

TEST_CASE("priors rejects empty and conflicted inputs") {
    CHECK_THROWS_AS(priors({}), std::invalid_argument);
    std::vector<std::pair<int, ProbeResult>> conflicted(1);
    conflicted[0].first = 1;
    conflicted[0].second.pos = 2;  // neg left disengaged
    CHECK_THROWS_AS(priors(conflicted), std::invalid_argument);
}

TEST_CASE("priors sum to one and normalization preserves the argmax") {
    // Selection consumes the argmax, and sum-normalization must never move
    // it: argmax over P equals argmax over the raw pair scores for any
    // probe set, rescaled inputs included.
    SplitMix64 rng(9);
    auto raw_argmax = [](const std::vector<std::pair<int, ProbeResult>>& probes) {
        size_t best = 0;
        for (size_t i = 1; i < probes.size(); ++i) {
            const double si = pair_score(*probes[i].second.pos, *probes[i].second.neg);
            const double sb =
                pair_score(*probes[best].second.pos, *probes[best].second.neg);
            if (si > sb) best = i;
        }
        return probes[best].first;
    };
    auto norm_argmax = [](const PriorVector& pv) {
        size_t best = 0;
        for (size_t i = 1; i < pv.size(); ++i)
            if (pv[i].second > pv[best].second) best = i;
        return pv[best].first;
    };
    for (int round = 0; round < 200; ++round) {
        const int count = 1 + static_cast<int>(rng.below(8));
        const int k = 1 + static_cast<int>(rng.below(4));  // occasional rescaling
        std::vector<std::pair<int, ProbeResult>> probes;
        for (int v = 1; v <= count; ++v) {
            ProbeResult pr;
            pr.pos = static_cast<int>(rng.below(20)) * k;
            pr.neg = static_cast<int>(rng.below(20)) * k;
            probes.emplace_back(v, pr);
        }
        PriorVector p = priors(probes);
        double sum = 0.0;
        for (const auto& [var, prob] : p) sum += prob;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(norm_argmax(p) == raw_argmax(probes));
    }
}
