#include "belief/region_gabp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace belief {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Mat dense_block(const SparseMatrix& A, const std::vector<int>& rows,
                const std::vector<int>& cols) {
    DenseBlock B = extract_block(A, rows, cols);
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        B.data.data(), static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
}

int local_index(const std::vector<int>& sorted, int v) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
    return static_cast<int>(it - sorted.begin());
}

}  // namespace

RegionGabpEngine::RegionGabpEngine(const SparseMatrix& A, RegionGraph rg)
    : A_(A), rg_(std::move(rg)) {
    edges_into_small_.resize(rg_.small.size());
    edge_ids_of_large_.resize(rg_.large.size());
    for (size_t L = 0; L < rg_.large.size(); ++L) {
        for (int l : rg_.large_children[L]) {
            int id = static_cast<int>(edge_large_.size());
            edge_large_.push_back(static_cast<int>(L));
            edge_small_.push_back(l);
            edges_into_small_[l].push_back(id);
            edge_ids_of_large_[L].push_back(id);
        }
    }
}

int RegionGabpEngine::edge_of(int large, int small) const {
    const auto& children = rg_.large_children[large];
    for (size_t k = 0; k < children.size(); ++k)
        if (children[k] == small) return edge_ids_of_large_[large][k];
    return -1;
}

BlockMessageState RegionGabpEngine::make_state() const {
    BlockMessageState s;
    s.Lambda.resize(edge_large_.size());
    s.m.resize(edge_large_.size());
    for (size_t e = 0; e < edge_large_.size(); ++e) {
        size_t nl = rg_.small[edge_small_[e]].size();
        s.Lambda[e].assign(nl * nl, 0.0);
        s.m[e].assign(nl, 0.0);
    }
    return s;
}

bool RegionGabpEngine::update_region(const Vector& b, const BlockMessageState& src,
                                     BlockMessageState& dst, Vector& x, int L,
                                     std::string* err) const {
    const auto& idx = rg_.large[L];
    const int N = static_cast<int>(idx.size());

    // Local system: the region's slice of A and b plus every child's
    // corrections from its other parents.
    Mat Lambda0 = dense_block(A_, idx, idx);
    Vec b0(N);
    for (int r = 0; r < N; ++r) b0[r] = b[idx[r]];
    for (size_t k = 0; k < rg_.large_children[L].size(); ++k) {
        int l = rg_.large_children[L][k];
        const auto& child = rg_.small[l];
        const int nl = static_cast<int>(child.size());
        for (int e : edges_into_small_[l]) {
            if (edge_large_[e] == L) continue;
            for (int r = 0; r < nl; ++r) {
                int lr = local_index(idx, child[r]);
                b0[lr] += src.m[e][r];
                for (int c = 0; c < nl; ++c)
                    Lambda0(lr, local_index(idx, child[c])) += src.Lambda[e][r * nl + c];
            }
        }
    }

    Eigen::FullPivLU<Mat> lu(Lambda0);
    if (!lu.isInvertible()) {
        if (err) *err = "singular local system in region " + std::to_string(L);
        return false;
    }
    Vec xL = lu.solve(b0);
    for (int r = 0; r < N; ++r) x[idx[r]] = xL[r];
    if (rg_.large_children[L].empty()) return true;

    Mat Sigma0 = lu.inverse();
    for (size_t k = 0; k < rg_.large_children[L].size(); ++k) {
        int l = rg_.large_children[L][k];
        int e_out = edge_ids_of_large_[L][k];
        const auto& child = rg_.small[l];
        const int nl = static_cast<int>(child.size());
        std::vector<int> loc(nl);
        for (int r = 0; r < nl; ++r) loc[r] = local_index(idx, child[r]);

        // Precision the rest of the region exerts on the child: invert the
        // child block of the local covariance.
        Mat S(nl, nl);
        Vec xl(nl);
        for (int r = 0; r < nl; ++r) {
            xl[r] = xL[loc[r]];
            for (int c = 0; c < nl; ++c) S(r, c) = Sigma0(loc[r], loc[c]);
        }
        Eigen::FullPivLU<Mat> lus(S);
        if (!lus.isInvertible()) {
            if (err)
                *err = "singular child covariance for region " + std::to_string(L) + " child " +
                       std::to_string(l);
            return false;
        }
        Mat W = lus.inverse();

        // The outgoing correction excludes the child's own data and what it
        // already received from its other parents.
        Vec m_new = W * xl;
        Mat Lam_new = W - dense_block(A_, child, child);
        for (int r = 0; r < nl; ++r) m_new[r] -= b[child[r]];
        for (int e : edges_into_small_[l]) {
            if (edge_large_[e] == L) continue;
            for (int r = 0; r < nl; ++r) {
                m_new[r] -= src.m[e][r];
                for (int c = 0; c < nl; ++c) Lam_new(r, c) -= src.Lambda[e][r * nl + c];
            }
        }
        for (int r = 0; r < nl; ++r) {
            dst.m[e_out][r] = m_new[r];
            for (int c = 0; c < nl; ++c) dst.Lambda[e_out][r * nl + c] = Lam_new(r, c);
        }
    }
    return true;
}

bool RegionGabpEngine::sweep(const Vector& b, BlockMessageState& state, Vector& x,
                             RegionSweepMode mode, std::string* err) const {
    if (static_cast<int>(x.size()) != A_.n) x.assign(A_.n, 0.0);
    if (mode == RegionSweepMode::Sequential) {
        for (size_t L = 0; L < rg_.large.size(); ++L)
            if (!update_region(b, state, state, x, static_cast<int>(L), err)) return false;
        return true;
    }
    const BlockMessageState snapshot = state;
    for (size_t L = 0; L < rg_.large.size(); ++L)
        if (!update_region(b, snapshot, state, x, static_cast<int>(L), err)) return false;
    return true;
}

SolveReport RegionGabpEngine::solve(const Vector& b, const RegionSolveOptions& opt) const {
    SolveReport rep;
    BlockMessageState state = make_state();
    Vector x(A_.n, 0.0);
    double r0 = inf_norm(b);
    rep.residual_history.push_back(r0);
    if (r0 <= opt.tol) {
        rep.status = SolveStatus::Converged;
        rep.solution = x;
        return rep;
    }
    double per_sweep = flop_count_region(rg_, RegionFlopMode::SharedInverse);
    std::string err;
    for (int it = 1; it <= opt.max_iter; ++it) {
        if (!sweep(b, state, x, opt.mode, &err)) {
            rep.status = SolveStatus::Diverged;
            rep.detail = err;
            rep.iterations = it;
            rep.solution = x;
            return rep;
        }
        double r = residual_inf_norm(A_, x, b);
        rep.residual_history.push_back(r);
        rep.iterations = it;
        rep.flop_estimate += per_sweep + 2.0 * A_.nnz();
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

void RegionGabpEngine::direct_message(const Vector& b, const BlockMessageState& state, int edge,
                                      std::vector<double>& Lambda_out,
                                      std::vector<double>& m_out) const {
    const int L = edge_large_[edge];
    const int l = edge_small_[edge];
    const auto& idx = rg_.large[L];
    const auto& child = rg_.small[l];
    const int N = static_cast<int>(idx.size());
    const int nl = static_cast<int>(child.size());

    Mat Lambda0 = dense_block(A_, idx, idx);
    Vec b0(N);
    for (int r = 0; r < N; ++r) b0[r] = b[idx[r]];
    for (size_t k = 0; k < rg_.large_children[L].size(); ++k) {
        int c = rg_.large_children[L][k];
        const auto& cv = rg_.small[c];
        const int nc = static_cast<int>(cv.size());
        for (int e : edges_into_small_[c]) {
            if (edge_large_[e] == L) continue;
            for (int r = 0; r < nc; ++r) {
                int lr = local_index(idx, cv[r]);
                b0[lr] += state.m[e][r];
                for (int cc = 0; cc < nc; ++cc)
                    Lambda0(lr, local_index(idx, cv[cc])) += state.Lambda[e][r * nc + cc];
            }
        }
    }

    // Remove the destination child's own contribution (its slice of A and b
    // plus everything it received from other parents) and marginalize the
    // remaining Gaussian onto the child's variables.
    std::vector<int> loc(nl);
    for (int r = 0; r < nl; ++r) loc[r] = local_index(idx, child[r]);
    Mat child_contrib = dense_block(A_, child, child);
    Vec bl(nl);
    for (int r = 0; r < nl; ++r) bl[r] = b[child[r]];
    for (int e : edges_into_small_[l]) {
        if (edge_large_[e] == L) continue;
        for (int r = 0; r < nl; ++r) {
            bl[r] += state.m[e][r];
            for (int c = 0; c < nl; ++c) child_contrib(r, c) += state.Lambda[e][r * nl + c];
        }
    }
    Mat modified = Lambda0;
    Vec rhs = b0;
    for (int r = 0; r < nl; ++r) {
        rhs[loc[r]] -= bl[r];
        for (int c = 0; c < nl; ++c) modified(loc[r], loc[c]) -= child_contrib(r, c);
    }
    Eigen::FullPivLU<Mat> lu(modified);
    if (!lu.isInvertible())
        throw std::runtime_error("direct_message: modified local system is singular");
    Mat Sigma = lu.inverse();
    Vec mu_full = Sigma * rhs;

    Mat Sl(nl, nl);
    Vec mu(nl);
    for (int r = 0; r < nl; ++r) {
        mu[r] = mu_full[loc[r]];
        for (int c = 0; c < nl; ++c) Sl(r, c) = Sigma(loc[r], loc[c]);
    }
    Eigen::FullPivLU<Mat> lus(Sl);
    if (!lus.isInvertible())
        throw std::runtime_error("direct_message: marginal covariance is singular");
    Mat Lam = lus.inverse();
    Vec m = Lam * mu;

    Lambda_out.assign(static_cast<size_t>(nl) * nl, 0.0);
    m_out.assign(nl, 0.0);
    for (int r = 0; r < nl; ++r) {
        m_out[r] = m[r];
        for (int c = 0; c < nl; ++c) Lambda_out[r * nl + c] = Lam(r, c);
    }
}

BlockConvergenceReport check_block_convergence(const SparseMatrix& A, const BlockPartition& part,
                                               BlockNorm norm) {
    validate_partition(part, A.n);
    BlockConvergenceReport rep;
    const int k = static_cast<int>(part.blocks.size());
    std::vector<Mat> inv(k);
    for (int i = 0; i < k; ++i) {
        Eigen::FullPivLU<Mat> lu(dense_block(A, part.blocks[i], part.blocks[i]));
        if (!lu.isInvertible()) {
            rep.singular_block = i;
            return rep;
        }
        inv[i] = lu.inverse();
    }
    Mat norms = Mat::Zero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            Mat R = -inv[i] * dense_block(A, part.blocks[i], part.blocks[j]);
            if (norm == BlockNorm::Inf) {
                norms(i, j) = R.cwiseAbs().rowwise().sum().maxCoeff();
            } else {
                Eigen::JacobiSVD<Mat> svd(R);
                norms(i, j) = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
            }
        }
    Eigen::EigenSolver<Mat> es(norms);
    double rho = 0.0;
    for (int i = 0; i < k; ++i) rho = std::max(rho, std::abs(es.eigenvalues()[i]));
    rep.rho = rho;
    rep.sufficient = rho < 1.0;
    return rep;
}

double flop_count_region(const RegionGraph& rg, RegionFlopMode mode) {
    double total = 0.0;
    for (size_t L = 0; L < rg.large.size(); ++L) {
        const double N = static_cast<double>(rg.large[L].size());
        const double M = static_cast<double>(rg.large_children[L].size());
        double child_sum = 0.0;
        for (int l : rg.large_children[L]) {
            const double n = static_cast<double>(rg.small[l].size());
            const double p = static_cast<double>(rg.small_parents[l].size());
            double share = mode == RegionFlopMode::SharedInverse ? 2.0 : (M - 1.0);
            child_sum += 1.5 * n * n * n + share * n * (n + 1.0) * (p - 1.0);
        }
        double solves = mode == RegionFlopMode::SharedInverse ? 1.0 : M;
        total += child_sum + solves * 1.5 * N * N * N;
    }
    return total;
}

}  // namespace belief
