#pragma once

#include <vector>

#include "belief/sparse.hpp"

namespace belief {

enum class ScheduleKind {
    ParallelFlood,            // all messages from the previous-state snapshot
    SequentialLexicographic,  // node 0..n-1, freshest messages
    RedBlack,
    FourColor,
    CustomOrder,
};

/// Node visitation order for one sweep. For the colored kinds the order is
/// grouped by color; updates within a color touch disjoint message sets when
/// the coloring is proper, so distinct colors may run concurrently.
struct Schedule {
    ScheduleKind kind = ScheduleKind::SequentialLexicographic;
    std::vector<int> order;        // every node exactly once (empty for flood)
    std::vector<int> color_of;     // per node, for colored kinds
    int num_colors = 1;

    static Schedule parallel_flood();
    static Schedule sequential(int n);
    static Schedule custom(std::vector<int> order);

    /// Grid colorings by parity: red-black uses (ix+iy) mod 2, four-color
    /// uses (ix mod 2, iy mod 2) classes (proper for the 9-point stencil).
    static Schedule red_black_grid(int nx, int ny);
    static Schedule four_color_grid(int nx, int ny);

    /// Greedy colorings for general sparsity patterns.
    static Schedule red_black(const SparseMatrix& A);
    static Schedule four_color(const SparseMatrix& A);
};

}  // namespace belief
