#pragma once

#include <string>
#include <vector>

#include "belief/region.hpp"
#include "belief/report.hpp"
#include "belief/sparse.hpp"

namespace belief {

/// Block messages, one per (large region -> child) edge. Edge order is fixed
/// by the engine: large regions in order, each region's children in order.
struct BlockMessageState {
    std::vector<std::vector<double>> Lambda;  // per edge, row-major |l| x |l|
    std::vector<std::vector<double>> m;       // per edge, length |l|
};

enum class RegionSweepMode {
    Sequential,  // region by region, freshest messages
    Flood,       // all messages from the previous-state snapshot
};

struct RegionSolveOptions {
    double tol = 2e-4;
    int max_iter = 10000;
    RegionSweepMode mode = RegionSweepMode::Sequential;
    double divergence_factor = 1e12;
};

/// Two-layer generalized belief propagation: each sweep solves every large
/// region's local system under the incoming child messages and refreshes the
/// outgoing per-child corrections. Per-region work uses dense LU; the child
/// update inverts the child-block of the local inverse rather than forming a
/// separate modified system per child.
class RegionGabpEngine {
public:
    RegionGabpEngine(const SparseMatrix& A, RegionGraph rg);

    const RegionGraph& region_graph() const { return rg_; }
    int num_edges() const { return static_cast<int>(edge_large_.size()); }
    /// Edge id for the (large, child) pair, or -1.
    int edge_of(int large, int small) const;

    BlockMessageState make_state() const;

    /// One full sweep; x receives the large-region solutions (later regions
    /// in sweep order overwrite overlapping entries). Returns false on a
    /// singular local system, with err naming the region.
    bool sweep(const Vector& b, BlockMessageState& state, Vector& x, RegionSweepMode mode,
               std::string* err = nullptr) const;

    SolveReport solve(const Vector& b, const RegionSolveOptions& opt) const;

    /// The message of one edge recomputed by the direct route: invert the
    /// full local covariance with the destination child's contribution
    /// removed, then marginalize. Algebraically equal to what sweep()
    /// produces; kept as an independent cross-check.
    void direct_message(const Vector& b, const BlockMessageState& state, int edge,
                        std::vector<double>& Lambda_out, std::vector<double>& m_out) const;

private:
    bool update_region(const Vector& b, const BlockMessageState& src, BlockMessageState& dst,
                       Vector& x, int L, std::string* err) const;

    const SparseMatrix& A_;
    RegionGraph rg_;
    std::vector<int> edge_large_, edge_small_;         // per edge id
    std::vector<std::vector<int>> edges_into_small_;   // per small region
    std::vector<std::vector<int>> edge_ids_of_large_;  // parallel to rg_.large_children
};

enum class BlockNorm { Inf, Spectral };

struct BlockConvergenceReport {
    double rho = 0.0;
    bool sufficient = false;
    int singular_block = -1;  // index of a non-invertible diagonal block, or -1
};

/// Sufficient-condition check for block solvers: builds the matrix of block
/// norms of R_ij = I_ij - A_ii^{-1} A_ij (zero diagonal) over the partition
/// and returns its spectral radius; radius < 1 guarantees convergence.
BlockConvergenceReport check_block_convergence(const SparseMatrix& A, const BlockPartition& part,
                                               BlockNorm norm);

enum class RegionFlopMode {
    SharedInverse,     // one local inverse per region, reused for every child
    PerChildInverse,   // a separate modified inverse per child
};

/// Analytic per-sweep operation-count estimate. For each large region of
/// size N with children of sizes n_i having p_i parents:
///   shared:    sum_i [ 1.5 n_i^3 + 2 n_i (n_i+1)(p_i-1) ] + 1.5 N^3
///   per-child: sum_i [ 1.5 n_i^3 + (M-1) n_i (n_i+1)(p_i-1) ] + M * 1.5 N^3
/// with M the number of children. Boundary effects ignored.
double flop_count_region(const RegionGraph& rg, RegionFlopMode mode);

}  // namespace belief
