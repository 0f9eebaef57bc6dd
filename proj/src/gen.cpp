#include "cncube/gen.hpp"

#include <cmath>
#include <stdexcept>

#include "cncube/rng.hpp"

namespace cnc {

CnfFormula random_ksat(const RandomCnfConfig& cfg) {
    if (cfg.num_vars < 1 || cfg.clause_width < 1 ||
        cfg.clause_width > cfg.num_vars || cfg.clause_ratio <= 0.0)
        throw std::invalid_argument("random_ksat: invalid configuration");

    SplitMix64 rng(cfg.seed);
    CnfFormula f;
    f.num_vars = cfg.num_vars;
    const auto num_clauses = static_cast<size_t>(
        std::llround(cfg.clause_ratio * static_cast<double>(cfg.num_vars)));

    std::vector<uint8_t> picked(static_cast<size_t>(cfg.num_vars) + 1, 0);
    f.clauses.reserve(num_clauses);
    for (size_t i = 0; i < num_clauses; ++i) {
        Clause c;
        c.reserve(static_cast<size_t>(cfg.clause_width));
        while (static_cast<int>(c.size()) < cfg.clause_width) {
            const int var =
                1 + static_cast<int>(rng.below(static_cast<uint32_t>(cfg.num_vars)));
            if (picked[static_cast<size_t>(var)]) continue;
            picked[static_cast<size_t>(var)] = 1;
            c.push_back(Lit(rng.coin() ? var : -var));
        }
        for (Lit l : c) picked[static_cast<size_t>(l.var())] = 0;
        f.clauses.push_back(std::move(c));
    }
    return f;
}

}  // namespace cnc
