// End-to-end acceptance checks: one pass/fail line per criterion, nonzero
// exit when anything fails. Reference values come from dense factorizations
// and eigensolves computed here, never from the library under test.
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "belief/analysis.hpp"
#include "belief/classic.hpp"
#include "belief/gabp.hpp"
#include "belief/multigrid.hpp"
#include "belief/problems.hpp"
#include "belief/region.hpp"
#include "belief/region_gabp.hpp"
#include "oracles.hpp"

using namespace belief;

namespace {

int g_failures = 0;

void report(int num, const char* what, bool ok) {
    std::printf("criterion %2d [%s]: %s\n", num, what, ok ? "PASS" : "FAIL");
    if (!ok) ++g_failures;
}

// Connected random matrix with symmetric structure: a cycle plus chords.
SparseMatrix random_cycle_chords(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::bernoulli_distribution coin(0.2);
    oracle::TripletList t;
    std::vector<double> row_sum(n, 0.0);
    auto link = [&](int i, int j) {
        double a = val(rng), b = val(rng);
        t.add(i, j, a);
        t.add(j, i, b);
        row_sum[i] += std::abs(a);
        row_sum[j] += std::abs(b);
    };
    for (int i = 0; i < n; ++i) link(i, (i + 1) % n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 2; j < n; ++j)
            if (!(i == 0 && j == n - 1) && coin(rng)) link(i, j);
    std::uniform_real_distribution<double> bump(0.5, 1.5);
    for (int i = 0; i < n; ++i) t.add(i, i, row_sum[i] + bump(rng));
    return make_csr(n, t.rows, t.cols, t.vals);
}

bool check_converged_messages_give_small_residuals() {
    std::mt19937 rng(1001);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> size(5, 50);
        SparseMatrix A = oracle::random_diag_dominant(size(rng), rng, trial % 2 == 0);
        Vector b = oracle::random_vector(A.n, rng);
        GabpEngine eng(A);
        GabpOptions opt;
        opt.tol = 1e-12;
        opt.stop = StopCriterion::MessageDelta;
        opt.max_iter = 50000;
        SolveReport rep = eng.solve(b, Schedule::sequential(A.n), opt);
        if (rep.status != SolveStatus::Converged) return false;
        if (residual_inf_norm(A, rep.solution, b) > 1e-8 * inf_norm(b)) return false;
    }
    return true;
}

bool check_tree_exactness() {
    std::mt19937 rng(1002);
    for (int trial = 0; trial < 5; ++trial) {
        int n = 40 + 40 * trial;  // up to 200
        std::vector<std::pair<int, int>> edges;
        SparseMatrix A = oracle::random_tree(n, rng, &edges);
        Vector b = oracle::random_vector(n, rng);
        GabpEngine eng(A);
        MessageState state = eng.make_state();
        Vector x(n, 0.0);
        Schedule seq = Schedule::sequential(n);
        int sweeps = 2 * oracle::tree_diameter(n, edges);
        for (int s = 0; s < sweeps; ++s)
            if (!eng.sweep(b, seq, state, x)) return false;
        if (oracle::max_abs_diff(x, oracle::dense_solve(A, b)) > 1e-10) return false;
    }
    return true;
}

bool check_7x7_dichotomy() {
    SparseMatrix A = oracle::example7x7();
    Vector b(7, 1.0);
    GabpEngine eng(A);
    GabpOptions opt;
    opt.max_iter = 5000;
    for (auto sched : {Schedule::sequential(7), Schedule::parallel_flood()})
        if (eng.solve(b, sched, opt).status == SolveStatus::Converged) return false;

    ScalarConditionReport sc = scalar_condition(A);
    if (std::abs(sc.rho_abs_R - 1.03) > 0.01 || sc.sufficient) return false;

    BlockPartition part{{{0, 1, 2}, {3, 4}, {5, 6}}};
    for (auto norm : {BlockNorm::Inf, BlockNorm::Spectral}) {
        BlockConvergenceReport r = check_block_convergence(A, part, norm);
        if (!r.sufficient || r.rho >= 1.0) return false;
    }

    RegionGraph rg = build_two_layer_region_graph(
        A, {{0, 1, 2, 3, 4}, {0, 1, 2, 5, 6}, {3, 4, 5, 6}});
    RegionGabpEngine reng(A, rg);
    RegionSolveOptions ropt;
    ropt.tol = 1e-10;
    SolveReport rep = reng.solve(b, ropt);
    if (rep.status != SolveStatus::Converged) return false;
    return oracle::max_abs_diff(rep.solution, oracle::dense_solve(A, b)) < 1e-8;
}

bool check_shared_inverse_vs_direct() {
    std::mt19937 rng(1004);
    std::uniform_real_distribution<double> scale(0.5, 1.5);
    std::uniform_int_distribution<int> dim(2, 5);
    for (int trial = 0; trial < 50; ++trial) {
        int nx = dim(rng), ny = dim(rng);
        // grid structure, randomized values, strengthened diagonal
        SparseMatrix A = oracle::poisson5(nx, ny);
        for (int p = 0; p < A.nnz(); ++p) A.values[p] *= scale(rng);
        RegionGraph rg = build_two_layer_region_graph(A, grid_line_regions(nx, ny));
        RegionGabpEngine eng(A, rg);
        Vector b = oracle::random_vector(A.n, rng);
        BlockMessageState state = eng.make_state();
        Vector x(A.n, 0.0);
        std::uniform_int_distribution<int> warm(0, 3);
        for (int s = warm(rng); s > 0; --s)
            if (!eng.sweep(b, state, x, RegionSweepMode::Flood)) return false;
        BlockMessageState before = state;
        if (!eng.sweep(b, state, x, RegionSweepMode::Flood)) return false;
        for (int e = 0; e < eng.num_edges(); ++e) {
            std::vector<double> L, m;
            eng.direct_message(b, before, e, L, m);
            for (size_t k = 0; k < L.size(); ++k)
                if (std::abs(L[k] - state.Lambda[e][k]) > 1e-10) return false;
            for (size_t k = 0; k < m.size(); ++k)
                if (std::abs(m[k] - state.m[e][k]) > 1e-10) return false;
        }
    }
    return true;
}

bool check_pair_region_reduction() {
    std::mt19937 rng(1005);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> size(6, 20);
        SparseMatrix A = random_cycle_chords(size(rng), rng);
        std::vector<std::vector<int>> pairs;
        for (int i = 0; i < A.n; ++i)
            for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
                if (A.col_indices[p] > i) pairs.push_back({i, A.col_indices[p]});
        RegionGraph rg = build_two_layer_region_graph(A, pairs);
        RegionGabpEngine reng(A, rg);
        GabpEngine seng(A);
        Vector b = oracle::random_vector(A.n, rng);
        BlockMessageState bstate = reng.make_state();
        MessageState sstate = seng.make_state();
        Vector xr(A.n, 0.0), xs(A.n, 0.0);
        Schedule fl = Schedule::parallel_flood();
        for (int it = 0; it < 8; ++it) {
            if (!reng.sweep(b, bstate, xr, RegionSweepMode::Flood)) return false;
            if (!seng.sweep(b, fl, sstate, xs)) return false;
            for (size_t L = 0; L < rg.large.size(); ++L) {
                int u = rg.large[L][0], v = rg.large[L][1];
                for (int side = 0; side < 2; ++side) {
                    int to = side == 0 ? u : v, from = side == 0 ? v : u;
                    int small = -1;
                    for (size_t s = 0; s < rg.small.size(); ++s)
                        if (rg.small[s].size() == 1 && rg.small[s][0] == to)
                            small = static_cast<int>(s);
                    if (small < 0) continue;  // endpoint of degree one
                    int e = reng.edge_of(static_cast<int>(L), small);
                    int pos = A.find(to, from);
                    if (e < 0 || pos < 0) return false;
                    double lam_scalar = sstate.lambda_tilde[pos] * A.at(from, to);
                    if (std::abs(bstate.Lambda[e][0] - lam_scalar) > 1e-12) return false;
                    if (std::abs(bstate.m[e][0] - sstate.m[pos]) > 1e-12) return false;
                }
            }
        }
    }
    return true;
}

bool check_smoothing_factors() {
    LfaResult seq =
        lfa_smoothing_factor(LfaStencil::FivePointLaplace, LfaSmoother::SequentialGabp, 128);
    if (std::abs(seq.smoothing_factor - 0.5) > 0.01) return false;
    double lo = std::min(std::abs(seq.theta1), std::abs(seq.theta2));
    double hi = std::max(std::abs(seq.theta1), std::abs(seq.theta2));
    const double pi = 3.14159265358979323846;
    if (std::abs(lo - 2.0 * std::atan(1.0 / 3.0)) > 0.02) return false;
    if (std::abs(hi - pi / 2.0) > 0.02) return false;
    for (auto sm : {LfaSmoother::ParallelGabp1, LfaSmoother::ParallelGabp2}) {
        LfaResult par = lfa_smoothing_factor(LfaStencil::FivePointLaplace, sm, 128);
        if (par.smoothing_factor < 1.0 - 1e-6) return false;
    }
    return true;
}

bool check_flop_table() {
    auto eq = [](double a, double b) { return std::abs(a - b) < 1e-9; };
    for (int M = 1; M <= 4; ++M) {
        if (!eq(flop_table(FlopStencil::FivePoint, FlopSmoother::Gabp, M), 12.0 * M + 6.0))
            return false;
        if (!eq(flop_table(FlopStencil::NinePoint, FlopSmoother::Gabp, M), 24.0 * M + 8.0))
            return false;
        double line = M == 1 ? 38.0 : 28.0 * M + 9.0;
        if (!eq(flop_table(FlopStencil::FivePoint, FlopSmoother::LineGabp, M), line)) return false;
        if (!eq(flop_table(FlopStencil::FivePoint, FlopSmoother::Gs, M), 9.0 * M)) return false;
        if (!eq(flop_table(FlopStencil::NinePoint, FlopSmoother::Gs, M), 17.0 * M)) return false;
        if (!eq(flop_table(FlopStencil::FivePoint, FlopSmoother::XyGs, M), 14.0 * M)) return false;
        if (!eq(flop_table(FlopStencil::NinePoint, FlopSmoother::XyGs, M), 21.0 * M)) return false;
        if (!eq(flop_cold_gabp_nine_point(M), 64.0 * M - 12.0)) return false;
    }
    bool threw = false;
    try {
        flop_table(FlopStencil::NinePoint, FlopSmoother::LineGabp, 1);
    } catch (const std::invalid_argument&) {
        threw = true;
    }
    return threw && std::abs(flop_cold_gabp_nine_point(1) - 52.0) < 1e-9;
}

int mg_cycles(const char* problem, const std::map<std::string, double>& params, int J1, int J2,
              MgSmoother sm, int pre, int post, SolveStatus* status = nullptr) {
    Hierarchy h(problem, J1, J2, params, sm);
    CycleSpec spec{.pre = pre, .post = post, .smoother = sm};
    MgSolveOptions opt;
    opt.max_cycles = 300;
    SolveReport rep = mg_solve(h, spec, h.fine_rhs(), opt);
    if (status) *status = rep.status;
    return rep.status == SolveStatus::Converged ? rep.iterations : -1;
}

bool check_anisotropic_cycle_counts() {
    int c22 = mg_cycles("anisotropic", {{"eps", 1e-3}}, 6, 4, MgSmoother::GabpSequential, 2, 2);
    int c33 = mg_cycles("anisotropic", {{"eps", 1e-3}}, 6, 4, MgSmoother::GabpSequential, 3, 3);
    if (c22 < 10 || c22 > 20) return false;
    if (c33 < 5 || c33 > 15) return false;
    SolveStatus gs_status;
    int gs = mg_cycles("anisotropic", {{"eps", 1e-3}}, 6, 4, MgSmoother::GsLex, 3, 3, &gs_status);
    return gs_status != SolveStatus::Converged || gs > 100;
}

int standalone_iterations(std::function<SolveReport()> run, SolveStatus* status = nullptr) {
    SolveReport rep = run();
    if (status) *status = rep.status;
    return rep.status == SolveStatus::Converged ? rep.iterations : -1;
}

bool check_benchmark_bands() {
    // single-level sweeps on the smooth-coefficient problem, finest grid
    AssembledProblem g = assemble("general", 6);
    GabpEngine eng(g.A);
    GabpOptions gopt;
    gopt.max_iter = 10000;
    int seq = standalone_iterations(
        [&] { return eng.solve(g.b, Schedule::sequential(g.A.n), gopt); });
    if (seq < 1000 || seq > 2200) return false;

    RelaxSolveOptions ropt;
    ropt.max_iter = 10000;
    int gs = standalone_iterations(
        [&] { return relax_solve(RelaxKind::GsLex, g.A, g.b, &g.grid, ropt); });
    if (gs < 2200 || gs > 4200) return false;
    int jac = standalone_iterations(
        [&] { return relax_solve(RelaxKind::Jacobi, g.A, g.b, &g.grid, ropt); });
    if (jac < 3300 || jac > 6500) return false;
    int bi = standalone_iterations([&] { return bicgstab(g.A, g.b, 2e-4, 2000); });
    if (bi < 150 || bi > 400) return false;

    // cross-derivative problem: message smoother inside the deep cycle
    int mixed = mg_cycles("mixed", {}, 6, 6, MgSmoother::GabpFourColor, 0, 4);
    if (mixed < 15 || mixed > 35) return false;

    // convection-dominated problem: colored classical smoothing diverges,
    // colored message smoothing does not
    SolveStatus st;
    mg_cycles("boundary-layer", {{"eps", 0.01}}, 6, 6, MgSmoother::GsRedBlack, 1, 1, &st);
    if (st == SolveStatus::Converged) return false;
    int bl = mg_cycles("boundary-layer", {{"eps", 0.01}}, 6, 6, MgSmoother::GabpRedBlack, 5, 0);
    if (bl < 2 || bl > 6) return false;

    // strongly variable coefficients
    int str = mg_cycles("stretched", {{"eps", 1e-6}}, 6, 6, MgSmoother::GabpRedBlack, 3, 0);
    return str >= 12 && str <= 28;
}

bool check_tree_unrolling_matches_synchronous_iteration() {
    std::mt19937 rng(1010);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_int_distribution<int> size(4, 8);
        SparseMatrix A = oracle::random_diag_dominant(size(rng), rng, trial % 2 == 0, 0.5);
        Vector b = oracle::random_vector(A.n, rng);
        GabpEngine eng(A);
        MessageState state = eng.make_state();
        Vector x(A.n, 0.0);
        Schedule fl = Schedule::parallel_flood();
        for (int depth = 1; depth <= 5; ++depth) {
            if (!eng.sweep(b, fl, state, x)) return false;
            for (int root = 0; root < A.n; ++root) {
                double t = computation_tree_solve(A, b, root, depth, 2000000);
                double scale = std::max(1.0, std::abs(x[root]));
                if (std::abs(t - x[root]) > 1e-12 * scale) return false;
            }
        }
    }
    return true;
}

bool check_discretization_order() {
    auto err = [](const char* name, int J, std::map<std::string, double> params) {
        AssembledProblem p = assemble(name, J, params);
        return oracle::max_abs_diff(oracle::dense_solve(p.A, p.b), p.exact);
    };
    struct Case {
        const char* name;
        std::map<std::string, double> params;
    };
    // layer problems measured at a mild eps so J=3 already sits in the
    // asymptotic range
    std::vector<Case> cases = {{"poisson", {}},
                               {"general", {}},
                               {"mixed", {}},
                               {"anisotropic", {}},
                               {"boundary-layer", {{"eps", 0.5}}},
                               {"inner-layer", {{"eps", 0.5}}},
                               {"stretched", {}}};
    for (const auto& c : cases) {
        double ratio = err(c.name, 3, c.params) / err(c.name, 4, c.params);
        if (ratio < 3.2 || ratio > 4.8) {
            std::fprintf(stderr, "  order check: %s ratio %.3f\n", c.name, ratio);
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    report(1, "converged messages give small residuals",
           check_converged_messages_give_small_residuals());
    report(2, "exact on trees within two diameters", check_tree_exactness());
    report(3, "7x7 example: scalar diverges, blocks converge", check_7x7_dichotomy());
    report(4, "shared-inverse updates equal direct marginalization",
           check_shared_inverse_vs_direct());
    report(5, "pair regions reduce to scalar message passing", check_pair_region_reduction());
    report(6, "smoothing factors", check_smoothing_factors());
    report(7, "operation-count table", check_flop_table());
    report(8, "anisotropic cycle counts", check_anisotropic_cycle_counts());
    report(9, "benchmark iteration bands", check_benchmark_bands());
    report(10, "unrolled trees equal synchronous iterates",
           check_tree_unrolling_matches_synchronous_iteration());
    report(11, "second-order discretization on every problem", check_discretization_order());
    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
