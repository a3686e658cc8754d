#pragma once

#include <string>
#include <vector>

namespace belief {

using Vector = std::vector<double>;

/// Square sparse matrix in canonical CSR form: within each row the column
/// indices are strictly increasing. Explicit zeros are kept: structural
/// nonzeros define the graph used by the message-passing solvers, so storing
/// a zero creates an edge (and enlarges the message graph).
///
/// Immutable after construction by convention; all free functions below are
/// pure and the matrix can be shared across threads.
struct SparseMatrix {
    int n = 0;
    std::vector<int> row_offsets;  // length n+1
    std::vector<int> col_indices;  // length nnz
    std::vector<double> values;    // length nnz

    // For each stored entry (i,j), position of the transpose partner (j,i)
    // in the CSR arrays, or -1 if (j,i) is structurally absent. The
    // nonsymmetric message rules need A_ij and A_ji per directed edge and
    // this avoids keeping a second CSC copy.
    std::vector<int> transpose_pos;

    int nnz() const { return static_cast<int>(values.size()); }

    // Value lookup by (row, col); 0.0 for structurally absent entries.
    double at(int row, int col) const;
    // Position of (row, col) in the CSR arrays, or -1.
    int find(int row, int col) const;
    double diagonal(int row) const { return at(row, row); }

    // y = A x
    void multiply(const Vector& x, Vector& y) const;
};

/// Builds canonical CSR from coordinate triplets. Duplicates are summed,
/// entries are sorted per row, and the transpose-partner index is filled in.
SparseMatrix make_csr(int n, const std::vector<int>& rows, const std::vector<int>& cols,
                      const std::vector<double>& vals);

/// Dense submatrix A[rows, cols] with absent entries filled by zero.
/// Index lists must be sorted ascending (ordering is global).
struct DenseBlock {
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> data;  // row-major, |rows| x |cols|

    double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols.size() + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols.size() + c]; }
};

DenseBlock extract_block(const SparseMatrix& A, const std::vector<int>& rows,
                         const std::vector<int>& cols);

/// max_i |b_i - (A x)_i|
double residual_inf_norm(const SparseMatrix& A, const Vector& x, const Vector& b);

double inf_norm(const Vector& v);

/// Matrix Market coordinate format (general, real), square matrices only.
/// Duplicate entries are summed per the Matrix Market convention.
SparseMatrix load_matrix_market(const std::string& path);
void store_matrix_market(const SparseMatrix& A, const std::string& path);

struct SpectralRadiusEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Power-iteration estimate of the dominant eigenvalue magnitude of an
/// elementwise-nonnegative matrix. Deterministic: the start vector comes
/// from a fixed-seed generator.
SpectralRadiusEstimate spectral_radius(const SparseMatrix& M, double tol = 1e-10,
                                       int max_iter = 10000);

}  // namespace belief
