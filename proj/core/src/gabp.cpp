#include "belief/gabp.hpp"

#include <cmath>
#include <stdexcept>

namespace belief {

MessageGraph build_message_graph(const SparseMatrix& A) {
    MessageGraph g;
    g.n = A.n;
    g.out_edges.resize(A.n);
    g.diag_pos.assign(A.n, -1);
    for (int i = 0; i < A.n; ++i) {
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            if (j == i) {
                g.diag_pos[i] = p;
            } else {
                // A_ij nonzero: eliminating x_j corrects equation i,
                // i.e. node j sends along this entry.
                g.out_edges[j].push_back({p, i});
                ++g.num_edges;
            }
        }
    }
    return g;
}

GabpEngine::GabpEngine(const SparseMatrix& A) : A_(A), graph_(build_message_graph(A)) {
    for (int i = 0; i < A.n; ++i)
        if (graph_.diag_pos[i] < 0)
            throw std::invalid_argument("gabp: matrix has a structurally zero diagonal entry");
}

MessageState GabpEngine::make_state() const {
    MessageState s;
    s.lambda_tilde.assign(A_.nnz(), 0.0);
    s.m.assign(A_.nnz(), 0.0);
    return s;
}

bool GabpEngine::sweep(const Vector& b, const Schedule& sched, MessageState& state, Vector& x,
                       std::string* err) const {
    if (sched.kind == ScheduleKind::ParallelFlood)
        return sweep_flood(b, state, x, err, nullptr);
    return sweep_sequential(b, sched.order, state, x, err, nullptr);
}

bool GabpEngine::sweep_sequential(const Vector& b, const std::vector<int>& order,
                                  MessageState& state, Vector& x, std::string* err,
                                  double* max_delta) const {
    if (static_cast<int>(order.size()) != A_.n)
        throw std::invalid_argument("gabp: schedule order does not cover every node");
    double delta = 0.0;
    for (int j : order) {
        // Aggregate everything node j knows: its own equation plus all
        // incoming corrections (row j off-diagonals carry messages into j,
        // each weighted by the transpose entry in the precision part).
        double m_acc = b[j];
        double sigma = 0.0;
        for (int p = A_.row_offsets[j]; p < A_.row_offsets[j + 1]; ++p) {
            int k = A_.col_indices[p];
            if (k == j) {
                sigma += A_.values[p];
            } else {
                m_acc += state.m[p];
                int tp = A_.transpose_pos[p];
                if (tp >= 0) sigma += state.lambda_tilde[p] * A_.values[tp];
            }
        }
        if (std::abs(sigma) < pivot_floor_) {
            if (err) *err = "zero pivot at node " + std::to_string(j);
            return false;
        }
        x[j] = m_acc / sigma;
        // Outgoing messages exclude what the destination itself contributed.
        for (const auto& e : graph_.out_edges[j]) {
            double a_ij = A_.values[e.pos];
            int tp = A_.transpose_pos[e.pos];
            double lam_rev = tp >= 0 ? state.lambda_tilde[tp] : 0.0;
            double m_rev = tp >= 0 ? state.m[tp] : 0.0;
            double denom = sigma - lam_rev * a_ij;
            if (std::abs(denom) < pivot_floor_) {
                if (err)
                    *err = "zero pivot on edge " + std::to_string(j) + "->" + std::to_string(e.row);
                return false;
            }
            double lam_new = -a_ij / denom;
            double m_new = lam_new * (m_acc - m_rev);
            if (max_delta) {
                delta = std::max(delta, std::abs(lam_new - state.lambda_tilde[e.pos]));
                delta = std::max(delta, std::abs(m_new - state.m[e.pos]));
            }
            state.lambda_tilde[e.pos] = lam_new;
            state.m[e.pos] = m_new;
        }
    }
    if (max_delta) *max_delta = delta;
    return true;
}

bool GabpEngine::sweep_flood(const Vector& b, MessageState& state, Vector& x, std::string* err,
                             double* max_delta) const {
    // Every new message is computed from the previous-iteration snapshot.
    const MessageState old = state;
    double delta = 0.0;
    for (int j = 0; j < A_.n; ++j) {
        double m_acc = b[j];
        double sigma = 0.0;
        for (int p = A_.row_offsets[j]; p < A_.row_offsets[j + 1]; ++p) {
            int k = A_.col_indices[p];
            if (k == j) {
                sigma += A_.values[p];
            } else {
                m_acc += old.m[p];
                int tp = A_.transpose_pos[p];
                if (tp >= 0) sigma += old.lambda_tilde[p] * A_.values[tp];
            }
        }
        for (const auto& e : graph_.out_edges[j]) {
            double a_ij = A_.values[e.pos];
            int tp = A_.transpose_pos[e.pos];
            double lam_rev = tp >= 0 ? old.lambda_tilde[tp] : 0.0;
            double m_rev = tp >= 0 ? old.m[tp] : 0.0;
            double denom = sigma - lam_rev * a_ij;
            if (std::abs(denom) < pivot_floor_) {
                if (err)
                    *err = "zero pivot on edge " + std::to_string(j) + "->" + std::to_string(e.row);
                return false;
            }
            double lam_new = -a_ij / denom;
            double m_new = lam_new * (m_acc - m_rev);
            if (max_delta) {
                delta = std::max(delta, std::abs(lam_new - old.lambda_tilde[e.pos]));
                delta = std::max(delta, std::abs(m_new - old.m[e.pos]));
            }
            state.lambda_tilde[e.pos] = lam_new;
            state.m[e.pos] = m_new;
        }
    }
    // The estimate uses the messages just produced.
    for (int i = 0; i < A_.n; ++i) {
        double m_acc = b[i];
        double sigma = 0.0;
        for (int p = A_.row_offsets[i]; p < A_.row_offsets[i + 1]; ++p) {
            int k = A_.col_indices[p];
            if (k == i) {
                sigma += A_.values[p];
            } else {
                m_acc += state.m[p];
                int tp = A_.transpose_pos[p];
                if (tp >= 0) sigma += state.lambda_tilde[p] * A_.values[tp];
            }
        }
        if (std::abs(sigma) < pivot_floor_) {
            if (err) *err = "zero pivot at node " + std::to_string(i);
            return false;
        }
        x[i] = m_acc / sigma;
    }
    if (max_delta) *max_delta = delta;
    return true;
}

double GabpEngine::sweep_flops() const {
    // Per node: divide for x (1) plus per incoming edge one add for m and a
    // multiply-add for sigma (3). Per outgoing edge: multiply-add for the
    // denominator, divide, subtract, multiply (5... counted as 4 below since
    // the negation is free).
    double e = graph_.num_edges;
    return A_.n + 3.0 * e + 4.0 * e;
}

SolveReport GabpEngine::solve(const Vector& b, const Schedule& sched,
                              const GabpOptions& opt) const {
    SolveReport rep;
    MessageState state = make_state();
    Vector x(A_.n, 0.0);
    double r0 = inf_norm(b);
    rep.residual_history.push_back(r0);
    if (r0 <= opt.tol) {
        rep.status = SolveStatus::Converged;
        rep.solution = x;
        return rep;
    }
    std::string err;
    for (int it = 1; it <= opt.max_iter; ++it) {
        double delta = 0.0;
        bool ok = sched.kind == ScheduleKind::ParallelFlood
                      ? sweep_flood(b, state, x, &err, &delta)
                      : sweep_sequential(b, sched.order, state, x, &err, &delta);
        if (!ok) {
            rep.status = SolveStatus::Diverged;
            rep.detail = err;
            rep.iterations = it;
            rep.solution = x;
            return rep;
        }
        double r = residual_inf_norm(A_, x, b);
        rep.residual_history.push_back(r);
        rep.iterations = it;
        rep.flop_estimate += sweep_flops() + 2.0 * A_.nnz();
        if (!std::isfinite(r) || r > opt.divergence_factor * r0) {
            rep.status = SolveStatus::Diverged;
            rep.detail = "residual blowup";
            rep.solution = x;
            return rep;
        }
        bool done = opt.stop == StopCriterion::Residual ? (r <= opt.tol) : (delta <= opt.tol);
        if (done) {
            rep.status = SolveStatus::Converged;
            rep.solution = x;
            return rep;
        }
    }
    rep.status = SolveStatus::MaxIter;
    rep.solution = x;
    return rep;
}

FrozenLambda GabpEngine::precompute_lambda(const Schedule& sched, double tol,
                                           int max_iter) const {
    // The precision messages never depend on the means, so they can be
    // iterated to a fixed point once and reused for every right-hand side.
    FrozenLambda out;
    out.lambda_tilde.assign(A_.nnz(), 0.0);
    std::vector<double> snapshot;
    const bool flood = sched.kind == ScheduleKind::ParallelFlood;
    if (!flood && static_cast<int>(sched.order.size()) != A_.n)
        throw std::invalid_argument("gabp: schedule order does not cover every node");

    auto& lam = out.lambda_tilde;
    for (int it = 1; it <= max_iter; ++it) {
        double delta = 0.0;
        if (flood) snapshot = lam;
        const std::vector<double>& src = flood ? snapshot : lam;
        for (int jj = 0; jj < A_.n; ++jj) {
            int j = flood ? jj : sched.order[jj];
            double sigma = 0.0;
            for (int p = A_.row_offsets[j]; p < A_.row_offsets[j + 1]; ++p) {
                int k = A_.col_indices[p];
                if (k == j) {
                    sigma += A_.values[p];
                } else {
                    int tp = A_.transpose_pos[p];
                    if (tp >= 0) sigma += src[p] * A_.values[tp];
                }
            }
            for (const auto& e : graph_.out_edges[j]) {
                double a_ij = A_.values[e.pos];
                int tp = A_.transpose_pos[e.pos];
                double lam_rev = tp >= 0 ? src[tp] : 0.0;
                double denom = sigma - lam_rev * a_ij;
                if (std::abs(denom) < pivot_floor_) {
                    out.converged = false;
                    out.iterations = it;
                    return out;
                }
                double lam_new = -a_ij / denom;
                delta = std::max(delta, std::abs(lam_new - lam[e.pos]));
                lam[e.pos] = lam_new;
            }
        }
        out.iterations = it;
        if (delta <= tol) {
            out.converged = true;
            break;
        }
        if (!std::isfinite(delta)) break;
    }

    out.sigma.assign(A_.n, 0.0);
    for (int j = 0; j < A_.n; ++j) {
        double sigma = 0.0;
        for (int p = A_.row_offsets[j]; p < A_.row_offsets[j + 1]; ++p) {
            int k = A_.col_indices[p];
            if (k == j) {
                sigma += A_.values[p];
            } else {
                int tp = A_.transpose_pos[p];
                if (tp >= 0) sigma += lam[p] * A_.values[tp];
            }
        }
        out.sigma[j] = sigma;
    }
    return out;
}

Vector GabpEngine::correction_sweeps(const Vector& r, const Schedule& sched,
                                     const FrozenLambda& frozen, int sweeps) const {
    // Mean-only iteration: the precisions are frozen, so only the scalar
    // messages m flow. Messages start cold for each new residual equation.
    std::vector<double> m(A_.nnz(), 0.0), snapshot;
    Vector e_vec(A_.n, 0.0);
    const bool flood = sched.kind == ScheduleKind::ParallelFlood;
    if (!flood && static_cast<int>(sched.order.size()) != A_.n)
        throw std::invalid_argument("gabp: schedule order does not cover every node");

    for (int s = 0; s < sweeps; ++s) {
        if (flood) snapshot = m;
        const std::vector<double>& src = flood ? snapshot : m;
        for (int jj = 0; jj < A_.n; ++jj) {
            int j = flood ? jj : sched.order[jj];
            double m_acc = r[j];
            for (int p = A_.row_offsets[j]; p < A_.row_offsets[j + 1]; ++p) {
                if (A_.col_indices[p] != j) m_acc += src[p];
            }
            if (!flood) e_vec[j] = m_acc / frozen.sigma[j];
            for (const auto& e : graph_.out_edges[j]) {
                int tp = A_.transpose_pos[e.pos];
                double m_rev = tp >= 0 ? src[tp] : 0.0;
                m[e.pos] = frozen.lambda_tilde[e.pos] * (m_acc - m_rev);
            }
        }
    }
    if (flood) {
        for (int i = 0; i < A_.n; ++i) {
            double m_acc = r[i];
            for (int p = A_.row_offsets[i]; p < A_.row_offsets[i + 1]; ++p)
                if (A_.col_indices[p] != i) m_acc += m[p];
            e_vec[i] = m_acc / frozen.sigma[i];
        }
    }
    return e_vec;
}

Vector GabpEngine::error_correction_apply(const Vector& b, const Vector& x0, int sweeps,
                                          const Schedule& sched,
                                          const FrozenLambda& frozen) const {
    Vector r(A_.n);
    for (int i = 0; i < A_.n; ++i) {
        double acc = b[i];
        for (int p = A_.row_offsets[i]; p < A_.row_offsets[i + 1]; ++p)
            acc -= A_.values[p] * x0[A_.col_indices[p]];
        r[i] = acc;
    }
    Vector e = correction_sweeps(r, sched, frozen, sweeps);
    Vector x = x0;
    for (int i = 0; i < A_.n; ++i) x[i] += e[i];
    return x;
}

Vector GabpEngine::error_correction_apply(const Vector& b, const Vector& x0, int sweeps,
                                          const Schedule& sched) const {
    Vector r(A_.n);
    for (int i = 0; i < A_.n; ++i) {
        double acc = b[i];
        for (int p = A_.row_offsets[i]; p < A_.row_offsets[i + 1]; ++p)
            acc -= A_.values[p] * x0[A_.col_indices[p]];
        r[i] = acc;
    }
    MessageState state = make_state();
    Vector e(A_.n, 0.0);
    std::string err;
    for (int s = 0; s < sweeps; ++s)
        if (!sweep(r, sched, state, e, &err))
            throw std::runtime_error("gabp error correction: " + err);
    Vector x = x0;
    for (int i = 0; i < A_.n; ++i) x[i] += e[i];
    return x;
}

SolveReport GabpEngine::solve_error_correction(const Vector& b, const Schedule& sched, int sweeps,
                                               const FrozenLambda& frozen,
                                               const GabpOptions& opt) const {
    SolveReport rep;
    Vector x(A_.n, 0.0);
    double r0 = inf_norm(b);
    rep.residual_history.push_back(r0);
    if (r0 <= opt.tol) {
        rep.status = SolveStatus::Converged;
        rep.solution = x;
        return rep;
    }
    // Per outer iteration: residual (2 nnz) plus `sweeps` mean-only sweeps,
    // each costing a divide per node, an add per incoming edge and a
    // multiply-add per outgoing edge.
    double per_iter =
        2.0 * A_.nnz() + sweeps * (A_.n + 1.0 * graph_.num_edges + 3.0 * graph_.num_edges);
    for (int it = 1; it <= opt.max_iter; ++it) {
        x = error_correction_apply(b, x, sweeps, sched, frozen);
        double r = residual_inf_norm(A_, x, b);
        rep.residual_history.push_back(r);
        rep.iterations = it;
        rep.flop_estimate += per_iter + 2.0 * A_.nnz();
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

Vector GabpEngine::node_precisions(const MessageState& state) const {
    Vector beta(A_.n, 0.0);
    for (int j = 0; j < A_.n; ++j) {
        double sigma = 0.0;
        for (int p = A_.row_offsets[j]; p < A_.row_offsets[j + 1]; ++p) {
            int k = A_.col_indices[p];
            if (k == j) {
                sigma += A_.values[p];
            } else {
                int tp = A_.transpose_pos[p];
                if (tp >= 0) sigma += state.lambda_tilde[p] * A_.values[tp];
            }
        }
        beta[j] = sigma;
    }
    return beta;
}

}  // namespace belief
