// Deductive reward arithmetic: propagation rate, the pairwise combining
// score, and normalized prior estimates.
#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "cncube/bcp.hpp"

namespace cnc {

// Implied literals per decision literal. Undefined for the empty cube.
inline double prop_rate(int implied, int cube_size) {
    if (cube_size < 1)
        throw std::domain_error("prop_rate: rate undefined for the empty cube");
    return static_cast<double>(implied) / static_cast<double>(cube_size);
}

// Combines the two directions of a variable into one scalar: a*b + a + b.
// Symmetric (grouped so the symmetry is exact in floating point), zero at
// (0,0), strictly increasing in each argument on positives.
inline double pair_score(double a, double b) { return a * b + (a + b); }

// Normalized prior over candidate variables, ascending by variable.
using PriorVector = std::vector<std::pair<int, double>>;

// Sum-normalizes the raw pair scores of conflict-free probe results. When
// every raw score is zero (propagation-free formulas) the prior is uniform
// so selection stays well-defined. Probes must already be conflict-free;
// an empty map is an error (a node without candidates is terminal or
// refuted and must be handled by the caller).
inline PriorVector priors(const std::vector<std::pair<int, ProbeResult>>& probes) {
    if (probes.empty())
        throw std::invalid_argument("priors: no candidate actions");
    PriorVector out;
    out.reserve(probes.size());
    double sum = 0.0;
    for (const auto& [var, pr] : probes) {
        if (!pr.conflict_free())
            throw std::invalid_argument("priors: unresolved probe conflict");
        double raw = pair_score(static_cast<double>(*pr.pos),
                                static_cast<double>(*pr.neg));
        out.emplace_back(var, raw);
        sum += raw;
    }
    if (sum > 0.0) {
        for (auto& [var, p] : out) p /= sum;
    } else {
        double uniform = 1.0 / static_cast<double>(out.size());
        for (auto& [var, p] : out) p = uniform;
    }
    return out;
}

}  // namespace cnc
