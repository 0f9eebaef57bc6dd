// Random k-SAT instance generation for benchmarking. The default ratio
// 4.26 sits at the 3-SAT phase transition, where conquering effort is high
// enough for cube quality to show.
#pragma once

#include <cstdint>

#include "cncube/cnf.hpp"

namespace cnc {

struct RandomCnfConfig {
    int num_vars = 20;
    double clause_ratio = 4.26;
    int clause_width = 3;
    uint64_t seed = 0;
};

// Uniform random k-SAT: round(num_vars * ratio) clauses, each over
// clause_width distinct variables with independent random polarities.
// Deterministic for a fixed config.
CnfFormula random_ksat(const RandomCnfConfig& cfg);

}  // namespace cnc
