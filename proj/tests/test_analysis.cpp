#include <doctest.h>

#include <cmath>
#include <random>

#include "belief/analysis.hpp"
#include "belief/gabp.hpp"
#include "oracles.hpp"

using namespace belief;

namespace {

const double kPi = 3.14159265358979323846;

SparseMatrix one_way_4x4() {
    oracle::TripletList t;
    const double M[4][4] = {
        {5, 1, 1, 0},
        {0, 6, 1, 1},
        {1, 1, 7, 1},
        {0, 0, 0, 2},
    };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (M[i][j] != 0.0) t.add(i, j, M[i][j]);
    return make_csr(4, t.rows, t.cols, t.vals);
}

}  // namespace

TEST_CASE("scalar sufficient-condition screen") {
    SUBCASE("grid operator is an M-matrix with contractive |R|") {
        ScalarConditionReport r = scalar_condition(oracle::poisson5(4, 4));
        CHECK(r.is_m_matrix);
        CHECK(r.sufficient);
        CHECK(r.rho_abs_R < 1.0);
        CHECK(r.diagonal_zeros.empty());
    }
    SUBCASE("the 7x7 example sits just past the threshold") {
        ScalarConditionReport r = scalar_condition(oracle::example7x7());
        CHECK_FALSE(r.sufficient);
        CHECK_FALSE(r.is_m_matrix);  // positive off-diagonals
        CHECK(r.rho_abs_R == doctest::Approx(1.03).epsilon(0.01));
        // cross-check against a dense eigensolve of |R|
        SparseMatrix A = oracle::example7x7();
        oracle::TripletList t;
        for (int i = 0; i < A.n; ++i)
            for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
                if (A.col_indices[p] != i)
                    t.add(i, A.col_indices[p], std::abs(A.values[p] / A.at(i, i)));
        SparseMatrix R = make_csr(A.n, t.rows, t.cols, t.vals);
        CHECK(r.rho_abs_R == doctest::Approx(oracle::dense_spectral_radius(R)).epsilon(1e-6));
    }
    SUBCASE("zero diagonal entries are reported") {
        SparseMatrix A = make_csr(2, {0, 0, 1, 1}, {0, 1, 0, 1}, {0.0, 1.0, 1.0, 2.0});
        ScalarConditionReport r = scalar_condition(A);
        CHECK_FALSE(r.sufficient);
        CHECK(r.diagonal_zeros == std::vector<int>{0});
    }
}

TEST_CASE("local frequency analysis of grid smoothers") {
    SUBCASE("sequential sweep on the five-point stencil") {
        LfaResult r = lfa_smoothing_factor(LfaStencil::FivePointLaplace,
                                           LfaSmoother::SequentialGabp, 128);
        CHECK(r.smoothing_factor == doctest::Approx(0.5).epsilon(1e-3));
        double lo = std::min(std::abs(r.theta1), std::abs(r.theta2));
        double hi = std::max(std::abs(r.theta1), std::abs(r.theta2));
        CHECK(lo == doctest::Approx(2.0 * std::atan(1.0 / 3.0)).epsilon(1e-2));
        CHECK(hi == doctest::Approx(kPi / 2.0).epsilon(1e-2));
        // identical error propagation to the sequential classical sweep
        LfaResult gs =
            lfa_smoothing_factor(LfaStencil::FivePointLaplace, LfaSmoother::SequentialGs, 128);
        CHECK(gs.smoothing_factor == doctest::Approx(r.smoothing_factor).epsilon(1e-10));
    }
    SUBCASE("single parallel sweep does not smooth the checkerboard mode") {
        LfaResult r = lfa_smoothing_factor(LfaStencil::FivePointLaplace,
                                           LfaSmoother::ParallelGabp1, 128);
        CHECK(r.smoothing_factor >= 1.0 - 1e-9);
        CHECK(r.smoothing_factor == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(r.theta1) == doctest::Approx(kPi).epsilon(1e-2));
        CHECK(std::abs(r.theta2) == doctest::Approx(kPi).epsilon(1e-2));
    }
    SUBCASE("two parallel sweeps still leave the checkerboard mode") {
        LfaResult r = lfa_smoothing_factor(LfaStencil::FivePointLaplace,
                                           LfaSmoother::ParallelGabp2, 128);
        CHECK(r.smoothing_factor == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("pointwise sequential smoothing degrades with anisotropy") {
        double prev = 0.0;
        for (double eps : {1.0, 1e-1, 1e-2, 1e-3}) {
            LfaResult r = lfa_smoothing_factor(LfaStencil::Anisotropic,
                                               LfaSmoother::SequentialGabp, 128, eps);
            CHECK(r.smoothing_factor > prev);
            prev = r.smoothing_factor;
        }
        CHECK(prev > 0.95);
        CHECK(prev <= 1.0 + 1e-9);
    }
    SUBCASE("invalid requests are rejected") {
        CHECK_THROWS_AS(lfa_smoothing_factor(LfaStencil::Anisotropic, LfaSmoother::ParallelGabp2,
                                             128),
                        std::invalid_argument);
        CHECK_THROWS_AS(lfa_smoothing_factor(LfaStencil::FivePointLaplace,
                                             LfaSmoother::SequentialGabp, 32),
                        std::invalid_argument);
    }
}

TEST_CASE("per-unknown smoothing cost table") {
    CHECK(flop_table(FlopStencil::FivePoint, FlopSmoother::Gabp, 1) == doctest::Approx(18.0));
    CHECK(flop_table(FlopStencil::FivePoint, FlopSmoother::Gabp, 2) == doctest::Approx(30.0));
    CHECK(flop_table(FlopStencil::NinePoint, FlopSmoother::Gabp, 1) == doctest::Approx(32.0));
    CHECK(flop_table(FlopStencil::NinePoint, FlopSmoother::Gabp, 3) == doctest::Approx(80.0));
    CHECK(flop_table(FlopStencil::FivePoint, FlopSmoother::LineGabp, 1) == doctest::Approx(38.0));
    CHECK(flop_table(FlopStencil::FivePoint, FlopSmoother::LineGabp, 2) == doctest::Approx(65.0));
    CHECK_THROWS_AS(flop_table(FlopStencil::NinePoint, FlopSmoother::LineGabp, 1),
                    std::invalid_argument);
    CHECK(flop_table(FlopStencil::FivePoint, FlopSmoother::Gs, 2) == doctest::Approx(18.0));
    CHECK(flop_table(FlopStencil::NinePoint, FlopSmoother::Gs, 1) == doctest::Approx(17.0));
    CHECK(flop_table(FlopStencil::FivePoint, FlopSmoother::XyGs, 1) == doctest::Approx(14.0));
    CHECK(flop_table(FlopStencil::NinePoint, FlopSmoother::XyGs, 2) == doctest::Approx(42.0));
    CHECK(flop_cold_gabp_nine_point(1) == doctest::Approx(52.0));
    CHECK(flop_cold_gabp_nine_point(3) == doctest::Approx(180.0));
}

TEST_CASE("unrolled dependency tree") {
    SUBCASE("size of the depth-3 tree of the one-way example") {
        SparseMatrix A = one_way_4x4();
        CHECK(computation_tree_size(A, 0, 0) == 1);
        CHECK(computation_tree_size(A, 0, 1) == 3);
        CHECK(computation_tree_size(A, 0, 3) == 10);
    }
    SUBCASE("node cap is enforced") {
        SparseMatrix K = oracle::poisson5(5, 5);
        CHECK_THROWS_AS(computation_tree_solve(K, Vector(K.n, 1.0), 12, 40, 1000),
                        std::length_error);
    }
    SUBCASE("deep unrolling on a tree matrix reproduces the exact component") {
        std::mt19937 rng(17);
        std::vector<std::pair<int, int>> edges;
        SparseMatrix A = oracle::random_tree(15, rng, &edges);
        Vector b = oracle::random_vector(15, rng);
        Vector ref = oracle::dense_solve(A, b);
        int d = oracle::tree_diameter(15, edges);
        for (int root : {0, 7, 14})
            CHECK(computation_tree_solve(A, b, root, d + 1) ==
                  doctest::Approx(ref[root]).epsilon(1e-12));
    }
    SUBCASE("equals the synchronous iterate on loopy graphs") {
        std::mt19937 rng(29);
        for (int trial = 0; trial < 4; ++trial) {
            SparseMatrix A = oracle::random_diag_dominant(6 + trial % 3, rng, trial % 2 == 0, 0.5);
            Vector b = oracle::random_vector(A.n, rng);
            GabpEngine eng(A);
            MessageState state = eng.make_state();
            Vector x(A.n, 0.0);
            Schedule fl = Schedule::parallel_flood();
            for (int depth = 1; depth <= 5; ++depth) {
                REQUIRE(eng.sweep(b, fl, state, x));
                for (int root = 0; root < A.n; ++root)
                    CHECK(computation_tree_solve(A, b, root, depth) ==
                          doctest::Approx(x[root]).epsilon(1e-12));
            }
        }
    }
}
