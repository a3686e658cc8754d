#include "belief/multigrid.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "belief/analysis.hpp"
#include "belief/classic.hpp"
#include "belief/region.hpp"

namespace belief {

struct Hierarchy::CoarseSolver {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

namespace {

bool is_gabp(MgSmoother s) {
    return s == MgSmoother::GabpSequential || s == MgSmoother::GabpRedBlack ||
           s == MgSmoother::GabpFourColor || s == MgSmoother::GabpFlood;
}

Schedule schedule_for(MgSmoother s, const GridInfo& g) {
    switch (s) {
        case MgSmoother::GabpRedBlack: return Schedule::red_black_grid(g.nx, g.ny);
        case MgSmoother::GabpFourColor: return Schedule::four_color_grid(g.nx, g.ny);
        case MgSmoother::GabpFlood: return Schedule::parallel_flood();
        default: return Schedule::sequential(g.nx * g.ny);
    }
}

RelaxKind relax_kind(MgSmoother s) {
    switch (s) {
        case MgSmoother::Jacobi: return RelaxKind::Jacobi;
        case MgSmoother::GsLex: return RelaxKind::GsLex;
        case MgSmoother::GsRedBlack: return RelaxKind::GsRedBlack;
        case MgSmoother::GsFourColor: return RelaxKind::GsFourColor;
        case MgSmoother::LineGsX: return RelaxKind::LineGsX;
        case MgSmoother::LineGsY: return RelaxKind::LineGsY;
        case MgSmoother::ZebraX: return RelaxKind::ZebraX;
        case MgSmoother::AlternatingZebra: return RelaxKind::AlternatingZebra;
        default: throw std::logic_error("not a relaxation smoother");
    }
}

// A level is only usable for smoothing if the sweep iteration does not blow
// up on it. Rediscretized coarse operators of convection-dominated problems
// violate the mesh resolution the fine discretization relied on (cell Peclet
// numbers grow with h), and the message iteration expands on them; such a
// level can still be solved directly, just not smoothed. Measured as the
// per-sweep growth of the message norms over a deterministic probe run.
bool sweeps_expand(const GabpEngine& eng, const Schedule& sched, int n) {
    MessageState st = eng.make_state();
    Vector x(n, 0.0), r(n, 1.0);
    std::string err;
    double mid = 0.0, end = 0.0;
    for (int s = 0; s < 30; ++s) {
        if (!eng.sweep(r, sched, st, x, &err)) return true;
        double norm = 0.0;
        for (double v : st.m) norm = std::max(norm, std::abs(v));
        if (!std::isfinite(norm)) return true;
        if (s == 19) mid = norm;
        if (s == 29) end = norm;
    }
    // tolerate mild expansion (the cycle's coarse-grid correction dominates
    // it); reject sustained growth beyond ~20% per sweep
    return mid > 0.0 && end > 6.19 * mid;
}

}  // namespace

Hierarchy::Hierarchy(const std::string& problem, int J1, int J2,
                     const std::map<std::string, double>& params, MgSmoother smoother)
    : smoother_(smoother) {
    if (J2 < 1 || J1 - J2 + 1 < 1)
        throw std::invalid_argument("Hierarchy: need 1 <= J2 and a coarsest exponent >= 1");
    for (int J = J1; J >= J1 - J2 + 1; --J) {
        GridLevel lvl;
        lvl.prob = assemble(problem, J, params);
        levels_.push_back(std::move(lvl));
    }
    for (size_t k = 0; k < levels_.size(); ++k) {
        auto& lvl = levels_[k];
        if (is_gabp(smoother_)) {
            lvl.engine = std::make_unique<GabpEngine>(lvl.prob.A);
            lvl.schedule = schedule_for(smoother_, lvl.prob.grid);
            if (k > 0 && sweeps_expand(*lvl.engine, lvl.schedule, lvl.prob.A.n)) {
                // stop coarsening: this level becomes the direct-solve bottom
                levels_.resize(k + 1);
                break;
            }
            lvl.frozen = lvl.engine->precompute_lambda(lvl.schedule, 1e-10, 500);
            lvl.frozen_ok = lvl.frozen.converged;
        } else if (smoother_ == MgSmoother::GabpLine) {
            auto regions = grid_line_regions(lvl.prob.grid.nx, lvl.prob.grid.ny);
            auto rg = build_two_layer_region_graph(lvl.prob.A, regions);
            lvl.line_engine = std::make_unique<RegionGabpEngine>(lvl.prob.A, std::move(rg));
        }
    }
    const auto& Ac = levels_.back().prob.A;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(Ac.n, Ac.n);
    for (int i = 0; i < Ac.n; ++i)
        for (int p = Ac.row_offsets[i]; p < Ac.row_offsets[i + 1]; ++p)
            D(i, Ac.col_indices[p]) = Ac.values[p];
    coarse_ = std::make_shared<CoarseSolver>();
    coarse_->lu.compute(D);
}

Vector mg_restrict(const Vector& fine, int mf) {
    if (static_cast<int>(fine.size()) != mf * mf)
        throw std::invalid_argument("mg_restrict: size mismatch");
    const int mc = (mf - 1) / 2;
    Vector out(static_cast<size_t>(mc) * mc, 0.0);
    auto f = [&](int ix, int iy) -> double {
        if (ix < 0 || ix >= mf || iy < 0 || iy >= mf) return 0.0;
        return fine[static_cast<size_t>(iy) * mf + ix];
    };
    for (int IY = 0; IY < mc; ++IY)
        for (int IX = 0; IX < mc; ++IX) {
            int cx = 2 * IX + 1, cy = 2 * IY + 1;  // coinciding fine point
            double v = 4.0 * f(cx, cy) +
                       2.0 * (f(cx - 1, cy) + f(cx + 1, cy) + f(cx, cy - 1) + f(cx, cy + 1)) +
                       f(cx - 1, cy - 1) + f(cx + 1, cy - 1) + f(cx - 1, cy + 1) +
                       f(cx + 1, cy + 1);
            out[static_cast<size_t>(IY) * mc + IX] = v / 16.0;
        }
    return out;
}

Vector mg_prolong(const Vector& coarse, int mc) {
    if (static_cast<int>(coarse.size()) != mc * mc)
        throw std::invalid_argument("mg_prolong: size mismatch");
    const int mf = 2 * mc + 1;
    Vector out(static_cast<size_t>(mf) * mf, 0.0);
    auto c = [&](int IX, int IY) -> double {
        if (IX < 0 || IX >= mc || IY < 0 || IY >= mc) return 0.0;  // zero boundary
        return coarse[static_cast<size_t>(IY) * mc + IX];
    };
    for (int iy = 0; iy < mf; ++iy)
        for (int ix = 0; ix < mf; ++ix) {
            // 1-based grid coordinates; even coordinates coincide with coarse points
            int gx = ix + 1, gy = iy + 1;
            double v;
            if (gx % 2 == 0 && gy % 2 == 0) {
                v = c(gx / 2 - 1, gy / 2 - 1);
            } else if (gx % 2 == 1 && gy % 2 == 0) {
                v = 0.5 * (c((gx - 1) / 2 - 1, gy / 2 - 1) + c((gx + 1) / 2 - 1, gy / 2 - 1));
            } else if (gx % 2 == 0 && gy % 2 == 1) {
                v = 0.5 * (c(gx / 2 - 1, (gy - 1) / 2 - 1) + c(gx / 2 - 1, (gy + 1) / 2 - 1));
            } else {
                v = 0.25 * (c((gx - 1) / 2 - 1, (gy - 1) / 2 - 1) +
                            c((gx + 1) / 2 - 1, (gy - 1) / 2 - 1) +
                            c((gx - 1) / 2 - 1, (gy + 1) / 2 - 1) +
                            c((gx + 1) / 2 - 1, (gy + 1) / 2 - 1));
            }
            out[static_cast<size_t>(iy) * mf + ix] = v;
        }
    return out;
}

void Hierarchy::smooth(int level, const Vector& b, Vector& x, int sweeps, bool frozen) {
    if (sweeps <= 0) return;
    GridLevel& lvl = levels_[level];
    const SparseMatrix& A = lvl.prob.A;
    if (is_gabp(smoother_)) {
        // error-correction form: solve A e = r with fresh messages, add e
        Vector r(A.n);
        for (int i = 0; i < A.n; ++i) {
            double acc = b[i];
            for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
                acc -= A.values[p] * x[A.col_indices[p]];
            r[i] = acc;
        }
        Vector e;
        if (frozen && lvl.frozen_ok) {
            e = lvl.engine->correction_sweeps(r, lvl.schedule, lvl.frozen, sweeps);
        } else {
            MessageState st = lvl.engine->make_state();
            e.assign(A.n, 0.0);
            std::string err;
            for (int s = 0; s < sweeps; ++s)
                if (!lvl.engine->sweep(r, lvl.schedule, st, e, &err))
                    throw std::runtime_error("smoother breakdown on level " +
                                             std::to_string(level) + ": " + err);
        }
        for (int i = 0; i < A.n; ++i) x[i] += e[i];
    } else if (smoother_ == MgSmoother::GabpLine) {
        Vector r(A.n);
        for (int i = 0; i < A.n; ++i) {
            double acc = b[i];
            for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
                acc -= A.values[p] * x[A.col_indices[p]];
            r[i] = acc;
        }
        BlockMessageState st = lvl.line_engine->make_state();
        Vector e(A.n, 0.0);
        std::string err;
        for (int s = 0; s < sweeps; ++s)
            if (!lvl.line_engine->sweep(r, st, e, RegionSweepMode::Sequential, &err))
                throw std::runtime_error("smoother breakdown on level " + std::to_string(level) +
                                         ": " + err);
        for (int i = 0; i < A.n; ++i) x[i] += e[i];
    } else {
        relax(relax_kind(smoother_), A, b, x, sweeps, &lvl.prob.grid);
    }
}

void Hierarchy::cycle(int level, const CycleSpec& spec, const Vector& b, Vector& x) {
    const SparseMatrix& A = levels_[level].prob.A;
    if (level == num_levels() - 1) {
        Eigen::Map<const Eigen::VectorXd> bv(b.data(), A.n);
        Eigen::VectorXd sol = coarse_->lu.solve(bv);
        for (int i = 0; i < A.n; ++i) x[i] = sol[i];
        return;
    }
    smooth(level, b, x, spec.pre, spec.frozen);
    Vector r(A.n);
    for (int i = 0; i < A.n; ++i) {
        double acc = b[i];
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
            acc -= A.values[p] * x[A.col_indices[p]];
        r[i] = acc;
    }
    Vector rc = mg_restrict(r, levels_[level].prob.grid.nx);
    Vector ec(rc.size(), 0.0);
    cycle(level + 1, spec, rc, ec);
    Vector ef = mg_prolong(ec, levels_[level + 1].prob.grid.nx);
    for (int i = 0; i < A.n; ++i) x[i] += ef[i];
    smooth(level, b, x, spec.post, spec.frozen);
}

void Hierarchy::v_cycle(const CycleSpec& spec, const Vector& b, Vector& x) {
    if (static_cast<int>(x.size()) != levels_[0].prob.A.n)
        throw std::invalid_argument("v_cycle: x has wrong size");
    cycle(0, spec, b, x);
}

double Hierarchy::cycle_flops_per_unknown(const CycleSpec& spec) const {
    const auto& fine = levels_[0];
    // classify the fine stencil by a center row's population
    int center = (fine.prob.grid.ny / 2) * fine.prob.grid.nx + fine.prob.grid.nx / 2;
    int row_nnz = fine.prob.A.row_offsets[center + 1] - fine.prob.A.row_offsets[center];
    bool nine = row_nnz > 5;
    FlopStencil st = nine ? FlopStencil::NinePoint : FlopStencil::FivePoint;

    auto analytic = [&](int sweeps) -> double {
        if (sweeps <= 0) return 0.0;
        switch (smoother_) {
            case MgSmoother::GabpSequential:
            case MgSmoother::GabpRedBlack:
            case MgSmoother::GabpFourColor:
            case MgSmoother::GabpFlood:
                return flop_table(st, FlopSmoother::Gabp, sweeps);
            case MgSmoother::GabpLine:
                if (nine) break;
                return flop_table(st, FlopSmoother::LineGabp, sweeps);
            case MgSmoother::Jacobi:
            case MgSmoother::GsLex:
            case MgSmoother::GsRedBlack:
            case MgSmoother::GsFourColor:
                return flop_table(st, FlopSmoother::Gs, sweeps);
            case MgSmoother::LineGsX:
            case MgSmoother::LineGsY:
            case MgSmoother::ZebraX:
            case MgSmoother::AlternatingZebra:
                return flop_table(st, FlopSmoother::XyGs, sweeps);
        }
        // no closed form: generic multiply-add count per sweep
        return sweeps * 2.0 * fine.prob.A.nnz() / fine.prob.A.n;
    };
    return analytic(spec.pre) + analytic(spec.post);
}

SolveReport mg_solve(Hierarchy& hier, const CycleSpec& spec, const Vector& b,
                     const MgSolveOptions& opt) {
    SolveReport rep;
    const SparseMatrix& A = hier.level(0).prob.A;
    Vector x(A.n, 0.0);
    double r0 = inf_norm(b);
    rep.residual_history.push_back(r0);
    if (r0 <= opt.tol) {
        rep.status = SolveStatus::Converged;
        rep.solution = x;
        return rep;
    }
    double per_cycle = hier.cycle_flops_per_unknown(spec) * A.n;
    for (int it = 1; it <= opt.max_cycles; ++it) {
        try {
            hier.v_cycle(spec, b, x);
        } catch (const std::runtime_error& e) {
            rep.status = SolveStatus::Diverged;
            rep.detail = e.what();
            rep.iterations = it;
            rep.solution = x;
            return rep;
        }
        double r = residual_inf_norm(A, x, b);
        rep.residual_history.push_back(r);
        rep.iterations = it;
        rep.flop_estimate += per_cycle;
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

}  // namespace belief
