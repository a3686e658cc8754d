#include "belief/classic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "belief/schedule.hpp"

namespace belief {

namespace {

void gs_pass(const SparseMatrix& A, const Vector& b, Vector& x, const std::vector<int>& order) {
    for (int i : order) {
        double acc = b[i];
        double diag = 0.0;
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            if (j == i)
                diag = A.values[p];
            else
                acc -= A.values[p] * x[j];
        }
        if (diag == 0.0) throw std::runtime_error("relax: zero diagonal at " + std::to_string(i));
        x[i] = acc / diag;
    }
}

void jacobi_pass(const SparseMatrix& A, const Vector& b, Vector& x) {
    Vector xn(A.n);
    for (int i = 0; i < A.n; ++i) {
        double acc = b[i];
        double diag = 0.0;
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            if (j == i)
                diag = A.values[p];
            else
                acc -= A.values[p] * x[j];
        }
        if (diag == 0.0) throw std::runtime_error("relax: zero diagonal at " + std::to_string(i));
        xn[i] = acc / diag;
    }
    x.swap(xn);
}

// Direct solve of one line's unknowns with all off-line couplings moved to
// the right-hand side.
void line_solve(const SparseMatrix& A, const Vector& b, Vector& x, const std::vector<int>& line) {
    const int m = static_cast<int>(line.size());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    // line indices are sorted (consecutive for x-lines, strided for y-lines)
    for (int r = 0; r < m; ++r) {
        int i = line[r];
        double acc = b[i];
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            auto it = std::lower_bound(line.begin(), line.end(), j);
            if (it != line.end() && *it == j)
                M(r, static_cast<int>(it - line.begin())) = A.values[p];
            else
                acc -= A.values[p] * x[j];
        }
        rhs[r] = acc;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) throw std::runtime_error("relax: singular line system");
    for (int r = 0; r < m; ++r) x[line[r]] = sol[r];
}

std::vector<int> x_line(const GridInfo& g, int iy) {
    std::vector<int> line(g.nx);
    for (int ix = 0; ix < g.nx; ++ix) line[ix] = iy * g.nx + ix;
    return line;
}

std::vector<int> y_line(const GridInfo& g, int ix) {
    std::vector<int> line(g.ny);
    for (int iy = 0; iy < g.ny; ++iy) line[iy] = iy * g.nx + ix;
    return line;
}

void require_grid(const GridInfo* grid, int n, RelaxKind kind) {
    if (!grid || grid->nx <= 0 || grid->ny <= 0 || grid->nx * grid->ny != n)
        throw std::invalid_argument("relax: this sweep kind needs matching grid info");
    (void)kind;
}

void one_sweep(RelaxKind kind, const SparseMatrix& A, const Vector& b, Vector& x,
               const GridInfo* grid) {
    switch (kind) {
        case RelaxKind::Jacobi:
            jacobi_pass(A, b, x);
            return;
        case RelaxKind::GsLex:
            gs_pass(A, b, x, Schedule::sequential(A.n).order);
            return;
        case RelaxKind::GsRedBlack: {
            Schedule s = grid && grid->nx * grid->ny == A.n
                             ? Schedule::red_black_grid(grid->nx, grid->ny)
                             : Schedule::red_black(A);
            gs_pass(A, b, x, s.order);
            return;
        }
        case RelaxKind::GsFourColor: {
            Schedule s = grid && grid->nx * grid->ny == A.n
                             ? Schedule::four_color_grid(grid->nx, grid->ny)
                             : Schedule::four_color(A);
            gs_pass(A, b, x, s.order);
            return;
        }
        case RelaxKind::LineGsX:
            require_grid(grid, A.n, kind);
            for (int iy = 0; iy < grid->ny; ++iy) line_solve(A, b, x, x_line(*grid, iy));
            return;
        case RelaxKind::LineGsY:
            require_grid(grid, A.n, kind);
            for (int ix = 0; ix < grid->nx; ++ix) line_solve(A, b, x, y_line(*grid, ix));
            return;
        case RelaxKind::ZebraX:
            require_grid(grid, A.n, kind);
            for (int iy = 0; iy < grid->ny; iy += 2) line_solve(A, b, x, x_line(*grid, iy));
            for (int iy = 1; iy < grid->ny; iy += 2) line_solve(A, b, x, x_line(*grid, iy));
            return;
        case RelaxKind::AlternatingZebra:
            require_grid(grid, A.n, kind);
            for (int iy = 0; iy < grid->ny; iy += 2) line_solve(A, b, x, x_line(*grid, iy));
            for (int iy = 1; iy < grid->ny; iy += 2) line_solve(A, b, x, x_line(*grid, iy));
            for (int ix = 0; ix < grid->nx; ix += 2) line_solve(A, b, x, y_line(*grid, ix));
            for (int ix = 1; ix < grid->nx; ix += 2) line_solve(A, b, x, y_line(*grid, ix));
            return;
    }
}

}  // namespace

void relax(RelaxKind kind, const SparseMatrix& A, const Vector& b, Vector& x, int sweeps,
           const GridInfo* grid) {
    if (static_cast<int>(x.size()) != A.n) throw std::invalid_argument("relax: x has wrong size");
    for (int s = 0; s < sweeps; ++s) one_sweep(kind, A, b, x, grid);
}

SolveReport relax_solve(RelaxKind kind, const SparseMatrix& A, const Vector& b,
                        const GridInfo* grid, const RelaxSolveOptions& opt) {
    SolveReport rep;
    Vector x(A.n, 0.0);
    double r0 = inf_norm(b);
    rep.residual_history.push_back(r0);
    if (r0 <= opt.tol) {
        rep.status = SolveStatus::Converged;
        rep.solution = x;
        return rep;
    }
    for (int it = 1; it <= opt.max_iter; ++it) {
        one_sweep(kind, A, b, x, grid);
        double r = residual_inf_norm(A, x, b);
        rep.residual_history.push_back(r);
        rep.iterations = it;
        rep.flop_estimate += 4.0 * A.nnz();
        if (!std::isfinite(r) || r > opt.divergence_factor * r0) {
            rep.status = SolveStatus::Diverged;
            rep.detail = "residual blowup";
            rep.solution = x;
            return rep;
        }
        if (r <= opt.tol) {
            rep.status = SolveStatus::Converged;
            rep.solution = x;
            return rep;
        }
    }
    rep.status = SolveStatus::MaxIter;
    rep.solution = x;
    return rep;
}

SolveReport bicgstab(const SparseMatrix& A, const Vector& b, double tol, int max_iter) {
    SolveReport rep;
    const int n = A.n;
    Vector x(n, 0.0), r(b), p(n, 0.0), v(n, 0.0), t(n), s(n), tmp(n);
    Vector r0 = r;
    double rho_prev = 1.0, alpha = 1.0, omega = 1.0;
    double init = inf_norm(b);
    rep.residual_history.push_back(init);
    if (init <= tol) {
        rep.status = SolveStatus::Converged;
        rep.solution = x;
        return rep;
    }
    auto dot = [n](const Vector& a, const Vector& c) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) d += a[i] * c[i];
        return d;
    };
    const double breakdown = 1e-300;
    for (int it = 1; it <= max_iter; ++it) {
        double rho = dot(r0, r);
        if (std::abs(rho) < breakdown) {
            rep.status = SolveStatus::Diverged;
            rep.detail = "breakdown: rho ~ 0";
            rep.iterations = it;
            rep.solution = x;
            return rep;
        }
        double beta = (rho / rho_prev) * (alpha / omega);
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        A.multiply(p, v);
        double r0v = dot(r0, v);
        if (std::abs(r0v) < breakdown) {
            rep.status = SolveStatus::Diverged;
            rep.detail = "breakdown: (r0, v) ~ 0";
            rep.iterations = it;
            rep.solution = x;
            return rep;
        }
        alpha = rho / r0v;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (inf_norm(s) <= tol) {
            for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
            rep.residual_history.push_back(residual_inf_norm(A, x, b));
            rep.iterations = it;
            rep.status = SolveStatus::Converged;
            rep.solution = x;
            return rep;
        }
        A.multiply(s, t);
        double tt = dot(t, t);
        if (tt < breakdown) {
            rep.status = SolveStatus::Diverged;
            rep.detail = "breakdown: t ~ 0";
            rep.iterations = it;
            rep.solution = x;
            return rep;
        }
        omega = dot(t, s) / tt;
        if (std::abs(omega) < breakdown) {
            rep.status = SolveStatus::Diverged;
            rep.detail = "breakdown: omega ~ 0";
            rep.iterations = it;
            rep.solution = x;
            return rep;
        }
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        double res = inf_norm(r);
        rep.residual_history.push_back(res);
        rep.iterations = it;
        rep.flop_estimate += 4.0 * A.nnz() + 20.0 * n;
        if (!std::isfinite(res) || res > 1e12 * init) {
            rep.status = SolveStatus::Diverged;
            rep.detail = "residual blowup";
            rep.solution = x;
            return rep;
        }
        if (res <= tol) {
            rep.status = SolveStatus::Converged;
            rep.solution = x;
            return rep;
        }
        rho_prev = rho;
    }
    rep.status = SolveStatus::MaxIter;
    rep.solution = x;
    return rep;
}

}  // namespace belief
