#include "cncube/stats.hpp"

#include <ostream>

namespace cnc {

// Format: one "key value" pair per line. '#' lines are comments; the wall
// clock measurements live there so everything else is reproducible
// byte-for-byte for a fixed input, flags and seed.
void write_stats(const StatsDocument& doc, std::ostream& out) {
    out << "# cncube stats v1\n";
    out << "instance " << doc.instance << '\n';
    out << "command " << doc.command << '\n';
    if (doc.has_cubing) {
        out << "mode " << doc.mode << '\n';
        out << "n " << doc.n << '\n';
        out << "budget " << doc.budget << '\n';
        out << "c_puct " << doc.c_puct << '\n';
        out << "seed " << doc.seed << '\n';
    }
    out << "# jobs " << doc.jobs << '\n';
    out << "num_vars " << doc.num_vars << '\n';
    out << "num_clauses " << doc.num_clauses << '\n';
    if (doc.has_cubes) {
        out << "open_cubes " << doc.open_cubes << '\n';
        out << "refuted_cubes " << doc.refuted_cubes << '\n';
        out << "total_cubes " << doc.open_cubes + doc.refuted_cubes << '\n';
    }
    if (doc.has_cubing) {
        out << "max_depth " << doc.max_depth << '\n';
        out << "depth_hist";
        for (size_t d = 0; d < doc.depth_histogram.size(); ++d)
            out << ' ' << d << ':' << doc.depth_histogram[d];
        out << '\n';
        out << "bcp_calls " << doc.bcp_calls << '\n';
        out << "mcts_simulations " << doc.mcts_simulations << '\n';
        out << "# wall_time_cubing_seconds " << doc.cubing_wall_seconds << '\n';
    }
    if (doc.has_conquer) {
        out << "result " << doc.result << '\n';
        out << "conquer_decisions " << doc.conquer_decisions << '\n';
        out << "conquer_propagations " << doc.conquer_propagations << '\n';
        out << "per_cube_decisions";
        for (size_t i = 0; i < doc.per_cube_decisions.size(); ++i)
            out << ' ' << i << ':' << doc.per_cube_decisions[i];
        out << '\n';
        out << "# wall_time_conquer_seconds " << doc.conquer_wall_seconds << '\n';
    }
}

}  // namespace cnc
