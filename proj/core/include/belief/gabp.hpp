#pragma once

#include <string>
#include <vector>

#include "belief/report.hpp"
#include "belief/schedule.hpp"
#include "belief/sparse.hpp"

namespace belief {

/// Directed message graph of a square matrix: edge e_ji (message from j to i,
/// the correction to equation i from eliminating x_j) exists iff A_ij is a
/// structural nonzero. Edges are identified by the CSR position of A_ij, so
/// incoming edges of node i are the off-diagonal entries of row i and
/// outgoing edges of node j are the off-diagonal entries of column j. The
/// reverse edge e_ij is the transpose partner, absent when A_ji is.
struct MessageGraph {
    struct OutEdge {
        int pos;  // CSR position of A_ij
        int row;  // destination node i
    };
    int n = 0;
    int num_edges = 0;
    std::vector<std::vector<OutEdge>> out_edges;  // indexed by source node j
    std::vector<int> diag_pos;                    // CSR position of A_jj, or -1
};

MessageGraph build_message_graph(const SparseMatrix& A);

/// Per-edge scalar messages, indexed by CSR position (diagonal slots unused).
struct MessageState {
    std::vector<double> lambda_tilde;
    std::vector<double> m;
};

enum class StopCriterion { Residual, MessageDelta };

struct GabpOptions {
    double tol = 2e-4;
    int max_iter = 20000;
    StopCriterion stop = StopCriterion::Residual;
    double pivot_floor = 1e-300;
    double divergence_factor = 1e12;  // residual blowup over initial
};

/// Converged lambda messages and node precisions; both depend only on A, so
/// they can be reused across right-hand sides by the error-correction scheme.
struct FrozenLambda {
    std::vector<double> lambda_tilde;
    Vector sigma;  // node precision A_jj + sum_k lambda_kj A_kj
    bool converged = false;
    int iterations = 0;
};

/// Gaussian belief propagation solver for general invertible matrices.
/// Holds a reference to the matrix; the matrix must outlive the engine.
class GabpEngine {
public:
    explicit GabpEngine(const SparseMatrix& A);

    const MessageGraph& graph() const { return graph_; }
    MessageState make_state() const;

    /// One full sweep; updates state and writes the per-node estimate into x.
    /// Returns false on pivot breakdown (err describes the node/edge).
    bool sweep(const Vector& b, const Schedule& sched, MessageState& state, Vector& x,
               std::string* err = nullptr) const;

    SolveReport solve(const Vector& b, const Schedule& sched, const GabpOptions& opt) const;

    FrozenLambda precompute_lambda(const Schedule& sched, double tol = 1e-10,
                                   int max_iter = 500) const;

    /// Mean-only sweeps with frozen lambda applied to A e = r, messages
    /// starting cold. Returns the error estimate e.
    Vector correction_sweeps(const Vector& r, const Schedule& sched, const FrozenLambda& frozen,
                             int sweeps) const;

    /// x0 + e where e approximates A^{-1}(b - A x0).
    Vector error_correction_apply(const Vector& b, const Vector& x0, int sweeps,
                                  const Schedule& sched, const FrozenLambda& frozen) const;

    /// Cold variant: full sweeps (precisions and means both from zero) on the
    /// residual equation. Throws std::runtime_error on pivot breakdown.
    Vector error_correction_apply(const Vector& b, const Vector& x0, int sweeps,
                                  const Schedule& sched) const;

    /// Outer iteration of the error-correction scheme: each iteration applies
    /// `sweeps` mean-only sweeps to the current residual equation.
    SolveReport solve_error_correction(const Vector& b, const Schedule& sched, int sweeps,
                                       const FrozenLambda& frozen, const GabpOptions& opt) const;

    /// Node precisions beta_i for the current messages. Informational only:
    /// exact on trees, generally incorrect on loopy graphs.
    Vector node_precisions(const MessageState& state) const;

    /// Measured cost of one sweep (multiply-add = 2 flops), without the
    /// residual evaluation.
    double sweep_flops() const;

private:
    bool sweep_sequential(const Vector& b, const std::vector<int>& order, MessageState& state,
                          Vector& x, std::string* err, double* max_delta) const;
    bool sweep_flood(const Vector& b, MessageState& state, Vector& x, std::string* err,
                     double* max_delta) const;

    const SparseMatrix& A_;
    MessageGraph graph_;
    double pivot_floor_ = 1e-300;
};

}  // namespace belief
