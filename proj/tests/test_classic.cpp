#include <doctest.h>

#include <random>

#include "belief/classic.hpp"
#include "oracles.hpp"

using namespace belief;

TEST_CASE("jacobi on a diagonal matrix converges in one sweep") {
    SparseMatrix D = make_csr(2, {0, 1}, {0, 1}, {2.0, 4.0});
    Vector x(2, 0.0);
    relax(RelaxKind::Jacobi, D, {2.0, 8.0}, x, 1);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("one lexicographic sweep matches the hand iteration") {
    // A = [[2,1],[1,2]], b = (3,3): x1 = 3/2, then x2 = (3 - 1.5)/2 = 3/4.
    SparseMatrix A = make_csr(2, {0, 0, 1, 1}, {0, 1, 0, 1}, {2.0, 1.0, 1.0, 2.0});
    Vector x(2, 0.0);
    relax(RelaxKind::GsLex, A, {3.0, 3.0}, x, 1);
    CHECK(x[0] == doctest::Approx(1.5));
    CHECK(x[1] == doctest::Approx(0.75));
}

TEST_CASE("exact solutions are fixed points of every sweep kind") {
    SparseMatrix A = oracle::poisson5(5, 4);
    GridInfo grid{5, 4};
    std::mt19937 rng(42);
    Vector b = oracle::random_vector(A.n, rng);
    Vector xs = oracle::dense_solve(A, b);
    for (auto kind : {RelaxKind::Jacobi, RelaxKind::GsLex, RelaxKind::GsRedBlack,
                      RelaxKind::GsFourColor, RelaxKind::LineGsX, RelaxKind::LineGsY,
                      RelaxKind::ZebraX, RelaxKind::AlternatingZebra}) {
        Vector x = xs;
        relax(kind, A, b, x, 2, &grid);
        CHECK(oracle::max_abs_diff(x, xs) < 1e-12);
    }
}

TEST_CASE("one horizontal line sweep solves each row exactly against frozen neighbors") {
    SparseMatrix A = oracle::poisson5(4, 3);
    GridInfo grid{4, 3};
    std::mt19937 rng(7);
    Vector b = oracle::random_vector(A.n, rng);
    Vector x0 = oracle::random_vector(A.n, rng);

    // oracle: solve row 0's tridiagonal block with rows 1.. frozen at x0
    Eigen::MatrixXd D = oracle::to_dense(A);
    Eigen::MatrixXd T = D.block(0, 0, 4, 4);
    Eigen::VectorXd rhs(4);
    for (int i = 0; i < 4; ++i) {
        rhs(i) = b[i];
        for (int j = 4; j < A.n; ++j) rhs(i) -= D(i, j) * x0[j];
    }
    Eigen::VectorXd row0 = T.partialPivLu().solve(rhs);

    Vector x = x0;
    relax(RelaxKind::LineGsX, A, b, x, 1, &grid);
    for (int i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(row0(i)).epsilon(1e-12));
}

TEST_CASE("zebra sweeps keep the even/odd update order") {
    // With zebra ordering the odd rows see already-updated even rows; on a
    // 4x3 grid one zebra sweep from zero must differ from plain line order
    // only via that coupling, and both must converge to the same solution.
    SparseMatrix A = oracle::poisson5(4, 3);
    GridInfo grid{4, 3};
    Vector b(A.n, 1.0);
    RelaxSolveOptions opt;
    opt.tol = 1e-11;
    Vector ref = oracle::dense_solve(A, b);
    for (auto kind : {RelaxKind::LineGsX, RelaxKind::ZebraX, RelaxKind::AlternatingZebra}) {
        SolveReport rep = relax_solve(kind, A, b, &grid, opt);
        REQUIRE(rep.status == SolveStatus::Converged);
        CHECK(oracle::max_abs_diff(rep.solution, ref) < 1e-9);
    }
    // zebra: even rows are updated against the *old* odd rows, so after one
    // sweep row 0 equals the line-GS result but row 1 does not.
    Vector xz(A.n, 0.0), xl(A.n, 0.0);
    relax(RelaxKind::ZebraX, A, b, xz, 1, &grid);
    relax(RelaxKind::LineGsX, A, b, xl, 1, &grid);
    for (int i = 0; i < 4; ++i) CHECK(xz[i] == doctest::Approx(xl[i]).epsilon(1e-13));
    bool same_row1 = true;
    for (int i = 4; i < 8; ++i)
        if (std::abs(xz[i] - xl[i]) > 1e-13) same_row1 = false;
    CHECK_FALSE(same_row1);
}

TEST_CASE("all point relaxations converge on diagonally dominant systems") {
    std::mt19937 rng(4);
    SparseMatrix A = oracle::random_diag_dominant(40, rng, false);
    Vector b = oracle::random_vector(40, rng);
    Vector ref = oracle::dense_solve(A, b);
    RelaxSolveOptions opt;
    opt.tol = 1e-10;
    for (auto kind : {RelaxKind::Jacobi, RelaxKind::GsLex, RelaxKind::GsRedBlack,
                      RelaxKind::GsFourColor}) {
        SolveReport rep = relax_solve(kind, A, b, nullptr, opt);
        REQUIRE(rep.status == SolveStatus::Converged);
        CHECK(oracle::max_abs_diff(rep.solution, ref) < 1e-8);
    }
}

TEST_CASE("line kinds require grid info") {
    SparseMatrix A = oracle::poisson5(3, 3);
    Vector x(A.n, 0.0);
    CHECK_THROWS_AS(relax(RelaxKind::LineGsX, A, Vector(A.n, 1.0), x, 1, nullptr),
                    std::invalid_argument);
}

TEST_CASE("bicgstab") {
    SUBCASE("identity in one step") {
        SparseMatrix I = make_csr(3, {0, 1, 2}, {0, 1, 2}, {1, 1, 1});
        SolveReport rep = bicgstab(I, {1, 2, 3}, 1e-12, 10);
        CHECK(rep.status == SolveStatus::Converged);
        CHECK(rep.iterations <= 2);
        CHECK(oracle::max_abs_diff(rep.solution, {1, 2, 3}) < 1e-12);
    }
    SUBCASE("grid system matches the dense factorization") {
        SparseMatrix A = oracle::poisson5(7, 7);
        std::mt19937 rng(19);
        Vector b = oracle::random_vector(A.n, rng);
        SolveReport rep = bicgstab(A, b, 1e-11, 500);
        REQUIRE(rep.status == SolveStatus::Converged);
        CHECK(oracle::max_abs_diff(rep.solution, oracle::dense_solve(A, b)) < 1e-8);
        CHECK(rep.residual_history.size() == static_cast<size_t>(rep.iterations) + 1);
    }
    SUBCASE("nonsymmetric diagonally dominant system") {
        std::mt19937 rng(23);
        SparseMatrix A = oracle::random_diag_dominant(30, rng, false);
        Vector b = oracle::random_vector(30, rng);
        SolveReport rep = bicgstab(A, b, 1e-10, 500);
        REQUIRE(rep.status == SolveStatus::Converged);
        CHECK(oracle::max_abs_diff(rep.solution, oracle::dense_solve(A, b)) < 1e-7);
    }
}
