#include "belief/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace belief {

ScalarConditionReport scalar_condition(const SparseMatrix& A) {
    ScalarConditionReport rep;
    std::vector<double> diag(A.n, 0.0);
    bool sign_pattern = true;
    for (int i = 0; i < A.n; ++i)
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            if (j == i) {
                diag[i] = A.values[p];
                if (A.values[p] <= 0.0) sign_pattern = false;
            } else if (A.values[p] > 0.0) {
                sign_pattern = false;
            }
        }
    for (int i = 0; i < A.n; ++i)
        if (diag[i] == 0.0) rep.diagonal_zeros.push_back(i);
    if (!rep.diagonal_zeros.empty()) return rep;

    std::vector<int> rows, cols;
    std::vector<double> vals;
    for (int i = 0; i < A.n; ++i)
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            if (j == i) continue;
            rows.push_back(i);
            cols.push_back(j);
            vals.push_back(std::abs(A.values[p]) / std::abs(diag[i]));
        }
    SparseMatrix absR = make_csr(A.n, rows, cols, vals);
    rep.rho_abs_R = spectral_radius(absR).value;
    rep.sufficient = rep.rho_abs_R < 1.0;
    // For a matrix with this sign pattern, |R| equals the Jacobi iteration
    // matrix, so the same radius settles the M-matrix test.
    rep.is_m_matrix = sign_pattern && rep.rho_abs_R < 1.0;
    return rep;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Per-frequency amplification |1 - S(theta) A(theta)|.
double amplification(LfaStencil stencil, LfaSmoother smoother, double eps, double t1, double t2) {
    using cd = std::complex<double>;
    const double center = stencil == LfaStencil::FivePointLaplace ? 4.0 : 2.0 * (1.0 + eps);
    const double wx = stencil == LfaStencil::FivePointLaplace ? 1.0 : eps;
    const double a = center - 2.0 * wx * std::cos(t1) - 2.0 * std::cos(t2);
    switch (smoother) {
        case LfaSmoother::ParallelGabp1:
            return std::abs(1.0 - a / center);
        case LfaSmoother::ParallelGabp2:
            // two-sweep flood symbol, five-point Laplacian
            return std::abs(1.0 - a * (4.0 + 2.0 * std::cos(t1) + 2.0 * std::cos(t2)) / 12.0);
        case LfaSmoother::SequentialGabp:
        case LfaSmoother::SequentialGs: {
            // one-sided (already-updated) part of the stencil in the
            // denominator; lexicographic order updates west and south first
            cd s_inv = center - wx * std::exp(cd(0.0, -t1)) - std::exp(cd(0.0, -t2));
            return std::abs(1.0 - a / s_inv);
        }
    }
    return 0.0;
}

bool in_high_set(double t1, double t2) {
    return std::max(std::abs(t1), std::abs(t2)) >= kPi / 2.0;
}

}  // namespace

LfaResult lfa_smoothing_factor(LfaStencil stencil, LfaSmoother smoother, int grid_samples,
                               double eps) {
    if (grid_samples < 64)
        throw std::invalid_argument("lfa_smoothing_factor: need >= 64 samples per axis");
    if (smoother == LfaSmoother::ParallelGabp2 && stencil != LfaStencil::FivePointLaplace)
        throw std::invalid_argument(
            "lfa_smoothing_factor: the two-sweep flood symbol is only derived for the five-point "
            "Laplacian");
    if (stencil == LfaStencil::Anisotropic && eps <= 0.0)
        throw std::invalid_argument("lfa_smoothing_factor: eps must be positive");

    LfaResult res;
    res.smoother = smoother;
    double best = -1.0, b1 = 0.0, b2 = 0.0;
    for (int i = 0; i < grid_samples; ++i)
        for (int j = 0; j < grid_samples; ++j) {
            double t1 = -kPi + 2.0 * kPi * i / grid_samples;
            double t2 = -kPi + 2.0 * kPi * j / grid_samples;
            if (!in_high_set(t1, t2)) continue;
            double g = amplification(stencil, smoother, eps, t1, t2);
            if (g > best) {
                best = g;
                b1 = t1;
                b2 = t2;
            }
        }
    // local refinement around the grid maximum
    double half = 2.0 * kPi / grid_samples;
    for (int round = 0; round < 40; ++round) {
        double nb = best, n1 = b1, n2 = b2;
        for (int i = -8; i <= 8; ++i)
            for (int j = -8; j <= 8; ++j) {
                double t1 = b1 + half * i / 8.0;
                double t2 = b2 + half * j / 8.0;
                if (t1 < -kPi || t1 >= kPi || t2 < -kPi || t2 >= kPi) continue;
                if (!in_high_set(t1, t2)) continue;
                double g = amplification(stencil, smoother, eps, t1, t2);
                if (g > nb) {
                    nb = g;
                    n1 = t1;
                    n2 = t2;
                }
            }
        best = nb;
        b1 = n1;
        b2 = n2;
        half *= 0.5;
    }
    res.smoothing_factor = best;
    res.theta1 = b1;
    res.theta2 = b2;
    return res;
}

double flop_table(FlopStencil stencil, FlopSmoother smoother, int sweeps) {
    if (sweeps < 1) throw std::invalid_argument("flop_table: sweeps must be >= 1");
    const double M = sweeps;
    const bool five = stencil == FlopStencil::FivePoint;
    switch (smoother) {
        case FlopSmoother::Gabp:
            return five ? 12.0 * M + 6.0 : 24.0 * M + 8.0;
        case FlopSmoother::LineGabp:
            if (!five)
                throw std::invalid_argument(
                    "flop_table: line regions do not cover the nine-point stencil's diagonal "
                    "couplings");
            return sweeps == 1 ? 38.0 : 28.0 * M + 9.0;
        case FlopSmoother::Gs:
            return five ? 9.0 * M : 17.0 * M;
        case FlopSmoother::XyGs:
            return five ? 14.0 * M : 21.0 * M;
    }
    return 0.0;
}

double flop_cold_gabp_nine_point(int sweeps) {
    if (sweeps < 1) throw std::invalid_argument("flop_cold_gabp_nine_point: sweeps must be >= 1");
    return 64.0 * sweeps - 12.0;
}

namespace {

struct TreeNode {
    int var;
    int parent;  // index into the node list, -1 for the root
};

std::vector<TreeNode> unroll_tree(const SparseMatrix& A, int root, int depth, long node_cap) {
    if (root < 0 || root >= A.n) throw std::out_of_range("computation tree: root out of range");
    std::vector<TreeNode> nodes{{root, -1}};
    size_t level_begin = 0;
    for (int d = 0; d < depth; ++d) {
        size_t level_end = nodes.size();
        for (size_t mi = level_begin; mi < level_end; ++mi) {
            int v = nodes[mi].var;
            int pv = nodes[mi].parent < 0 ? -1 : nodes[nodes[mi].parent].var;
            for (int p = A.row_offsets[v]; p < A.row_offsets[v + 1]; ++p) {
                int k = A.col_indices[p];
                if (k == v || k == pv) continue;
                nodes.push_back({k, static_cast<int>(mi)});
                if (static_cast<long>(nodes.size()) > node_cap)
                    throw std::length_error("computation tree exceeds node cap");
            }
        }
        level_begin = level_end;
    }
    return nodes;
}

}  // namespace

long computation_tree_size(const SparseMatrix& A, int root, int depth, long node_cap) {
    return static_cast<long>(unroll_tree(A, root, depth, node_cap).size());
}

double computation_tree_solve(const SparseMatrix& A, const Vector& b, int root, int depth,
                              long node_cap) {
    auto nodes = unroll_tree(A, root, depth, node_cap);
    std::vector<double> diag(nodes.size()), rhs(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        diag[i] = A.at(nodes[i].var, nodes[i].var);
        rhs[i] = b[nodes[i].var];
    }
    // leaves first: children were appended after their parents
    for (size_t c = nodes.size(); c-- > 1;) {
        int m = nodes[c].parent;
        double a_vw = A.at(nodes[m].var, nodes[c].var);
        double a_wv = A.at(nodes[c].var, nodes[m].var);
        if (diag[c] == 0.0) throw std::runtime_error("computation tree: zero pivot");
        diag[m] -= a_vw * a_wv / diag[c];
        rhs[m] -= a_vw * rhs[c] / diag[c];
    }
    if (diag[0] == 0.0) throw std::runtime_error("computation tree: zero pivot at root");
    return rhs[0] / diag[0];
}

}  // namespace belief
