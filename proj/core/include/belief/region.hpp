#pragma once

#include <string>
#include <utility>
#include <vector>

#include "belief/sparse.hpp"

namespace belief {

/// Two-layer region graph over the variables of a base matrix: large regions
/// (no parents, counting number +1) and small child regions (no children,
/// counting number 1 - #parents). A child is the set of variables shared by
/// exactly its parent set, so children are pairwise disjoint.
struct RegionGraph {
    int n = 0;
    std::vector<std::vector<int>> large;           // sorted index lists
    std::vector<std::vector<int>> small;           // sorted index lists
    std::vector<std::vector<int>> small_parents;   // indices into `large`, sorted
    std::vector<std::vector<int>> large_children;  // indices into `small`
    std::vector<int> counting_large;               // all +1
    std::vector<int> counting_small;               // 1 - #parents
};

/// Derives children and counting numbers from user-supplied large regions.
/// Throws std::invalid_argument when the result cannot be a valid two-layer
/// graph: a base-graph edge covered by no large region, an edge whose
/// multiply-covering regions share no common child (would need more layers),
/// a large region inducing a disconnected subgraph, or malformed index lists.
RegionGraph build_two_layer_region_graph(const SparseMatrix& A,
                                         const std::vector<std::vector<int>>& large_regions);

/// Exactly-once counting check: every vertex of the base graph and every
/// structural edge (i,j), A_ij != 0 or A_ji != 0, must have its containing
/// regions' counting numbers sum to 1.
struct CountingReport {
    bool valid = false;
    std::vector<int> bad_vertices;
    std::vector<std::pair<int, int>> bad_edges;  // i < j
};

/// Generic form: any collection of regions with explicit counting numbers
/// (not restricted to two layers).
CountingReport counting_report(const SparseMatrix& A, const std::vector<std::vector<int>>& regions,
                               const std::vector<int>& counts);

CountingReport validate_counting(const SparseMatrix& A, const RegionGraph& rg);

/// Disjoint blocks covering all indices (scalar blocks generalize the
/// pointwise solvers; see check_block_convergence).
struct BlockPartition {
    std::vector<std::vector<int>> blocks;  // each sorted
};

/// Throws std::invalid_argument unless blocks are nonempty, disjoint, sorted
/// and cover 0..n-1.
void validate_partition(const BlockPartition& p, int n);

/// Line-oriented text format: one large region per line, sorted ascending,
/// space separated; '#' starts a comment. Children are re-derived on load.
std::vector<std::vector<int>> load_regions(const std::string& path);
void store_regions(const std::vector<std::vector<int>>& large, const std::string& path);

/// All horizontal and vertical grid lines of an nx-by-ny grid (row-major,
/// x fastest) as large regions; children come out as the single grid nodes.
std::vector<std::vector<int>> grid_line_regions(int nx, int ny);

}  // namespace belief
