#pragma once

#include "belief/report.hpp"
#include "belief/sparse.hpp"

namespace belief {

/// Interior-grid geometry for stencil-aware sweeps: unknowns stored
/// row-major, x fastest.
struct GridInfo {
    int nx = 0;
    int ny = 0;
};

enum class RelaxKind {
    Jacobi,
    GsLex,            // Gauss-Seidel, lexicographic
    GsRedBlack,       // (ix+iy) parity; greedy coloring without grid info
    GsFourColor,      // (ix mod 2, iy mod 2) classes; greedy without grid
    LineGsX,          // direct solve per horizontal grid line
    LineGsY,
    ZebraX,           // horizontal lines, even rows then odd rows
    AlternatingZebra, // x-zebra then y-zebra, counted as one sweep
};

/// `sweeps` in-place relaxation sweeps. Line and zebra kinds require grid
/// info; the colored point kinds fall back to greedy colorings without it.
void relax(RelaxKind kind, const SparseMatrix& A, const Vector& b, Vector& x, int sweeps,
           const GridInfo* grid = nullptr);

struct RelaxSolveOptions {
    double tol = 2e-4;
    int max_iter = 20000;
    double divergence_factor = 1e12;
};

SolveReport relax_solve(RelaxKind kind, const SparseMatrix& A, const Vector& b,
                        const GridInfo* grid, const RelaxSolveOptions& opt);

/// Unpreconditioned BiCGSTAB from a zero start; near-zero rho or omega is
/// reported as a diverged status with a breakdown note.
SolveReport bicgstab(const SparseMatrix& A, const Vector& b, double tol, int max_iter);

}  // namespace belief
