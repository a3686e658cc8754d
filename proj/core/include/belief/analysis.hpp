#pragma once

#include <vector>

#include "belief/sparse.hpp"

namespace belief {

/// Sufficient-condition screen for the scalar message solver: spectral
/// radius of the entrywise |A_ij|/|A_ii| iteration matrix (zero diagonal),
/// plus the M-matrix test (positive diagonal, nonpositive off-diagonal,
/// convergent Jacobi iteration), which also implies convergence.
struct ScalarConditionReport {
    double rho_abs_R = 0.0;
    bool is_m_matrix = false;
    bool sufficient = false;
    std::vector<int> diagonal_zeros;
};

ScalarConditionReport scalar_condition(const SparseMatrix& A);

enum class LfaStencil {
    FivePointLaplace,  // center 4, axial -1
    Anisotropic,       // center 2(1+eps), x-neighbors -eps, y-neighbors -1
};

enum class LfaSmoother {
    ParallelGabp1,   // one flood sweep: diagonal symbol 1/center
    ParallelGabp2,   // two flood sweeps (five-point Laplacian only)
    SequentialGabp,  // lexicographic sweep; symbol matches Gauss-Seidel
    SequentialGs,
};

struct LfaResult {
    LfaSmoother smoother;
    double smoothing_factor = 0.0;
    double theta1 = 0.0, theta2 = 0.0;  // maximizing frequency, in [-pi, pi)^2
};

/// Smoothing factor mu = max over the high-frequency set
/// [-pi,pi)^2 \ [-pi/2,pi/2)^2 of the per-frequency amplification
/// |1 - S(theta) A(theta)|. Maximized by grid sampling (grid_samples per
/// axis, >= 64) followed by local refinement. eps applies to the
/// anisotropic stencil only. Throws std::invalid_argument for unsupported
/// stencil/smoother pairings.
LfaResult lfa_smoothing_factor(LfaStencil stencil, LfaSmoother smoother, int grid_samples,
                               double eps = 1.0);

enum class FlopStencil { FivePoint, NinePoint };
enum class FlopSmoother { Gabp, LineGabp, Gs, XyGs };

/// Per-unknown operation count of `sweeps` error-correction sweeps with
/// precomputed message precisions (one sweep for the plain relaxation
/// kinds means `sweeps` applications). Boundary effects ignored. Throws
/// std::invalid_argument for line solves on the nine-point stencil, whose
/// line regions do not cover the diagonal couplings.
double flop_table(FlopStencil stencil, FlopSmoother smoother, int sweeps);

/// Per-unknown cost of `sweeps` cold sweeps (messages not precomputed) on
/// the nine-point stencil: 64*sweeps - 12.
double flop_cold_gabp_nine_point(int sweeps);

/// Number of copies in the depth-`depth` unrolled dependency tree rooted at
/// `root`: the root plus, recursively, one copy per in-edge of each copy
/// except the one leading back to its parent.
long computation_tree_size(const SparseMatrix& A, int root, int depth, long node_cap = 100000);

/// Eliminates the unrolled tree bottom-up and returns the root value; equals
/// the root component of the flood-schedule iterate after `depth` sweeps.
/// Throws std::length_error past node_cap.
double computation_tree_solve(const SparseMatrix& A, const Vector& b, int root, int depth,
                              long node_cap = 100000);

}  // namespace belief
