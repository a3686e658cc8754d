#include "belief/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace belief {

double SparseMatrix::at(int row, int col) const {
    int pos = find(row, col);
    return pos < 0 ? 0.0 : values[pos];
}

int SparseMatrix::find(int row, int col) const {
    auto first = col_indices.begin() + row_offsets[row];
    auto last = col_indices.begin() + row_offsets[row + 1];
    auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) return -1;
    return static_cast<int>(it - col_indices.begin());
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
            acc += values[p] * x[col_indices[p]];
        y[i] = acc;
    }
}

SparseMatrix make_csr(int n, const std::vector<int>& rows, const std::vector<int>& cols,
                      const std::vector<double>& vals) {
    if (rows.size() != cols.size() || rows.size() != vals.size())
        throw std::invalid_argument("make_csr: triplet arrays differ in length");
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= n || cols[k] < 0 || cols[k] >= n)
            throw std::out_of_range("make_csr: index out of bounds");
    }
    std::vector<size_t> order(rows.size());
    for (size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (rows[a] != rows[b]) return rows[a] < rows[b];
        return cols[a] < cols[b];
    });

    SparseMatrix A;
    A.n = n;
    A.row_offsets.assign(n + 1, 0);
    int last_r = -1, last_c = -1;
    for (size_t k = 0; k < order.size(); ++k) {
        int r = rows[order[k]], c = cols[order[k]];
        double v = vals[order[k]];
        if (r == last_r && c == last_c) {
            A.values.back() += v;  // duplicate: sum
        } else {
            A.col_indices.push_back(c);
            A.values.push_back(v);
            A.row_offsets[r + 1]++;
            last_r = r;
            last_c = c;
        }
    }
    for (int i = 0; i < n; ++i) A.row_offsets[i + 1] += A.row_offsets[i];

    A.transpose_pos.assign(A.values.size(), -1);
    for (int i = 0; i < n; ++i)
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
            A.transpose_pos[p] = A.find(A.col_indices[p], i);
    return A;
}

DenseBlock extract_block(const SparseMatrix& A, const std::vector<int>& rows,
                         const std::vector<int>& cols) {
    auto check_sorted = [&](const std::vector<int>& idx) {
        for (size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] < 0 || idx[k] >= A.n) throw std::out_of_range("extract_block: index out of range");
            if (k > 0 && idx[k] <= idx[k - 1]) throw std::invalid_argument("extract_block: indices must be sorted ascending");
        }
    };
    check_sorted(rows);
    check_sorted(cols);

    DenseBlock B;
    B.rows = rows;
    B.cols = cols;
    B.data.assign(rows.size() * cols.size(), 0.0);
    for (size_t r = 0; r < rows.size(); ++r) {
        int i = rows[r];
        size_t c = 0;
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1] && c < cols.size(); ++p) {
            int j = A.col_indices[p];
            while (c < cols.size() && cols[c] < j) ++c;
            if (c < cols.size() && cols[c] == j) B(static_cast<int>(r), static_cast<int>(c)) = A.values[p];
        }
    }
    return B;
}

double residual_inf_norm(const SparseMatrix& A, const Vector& x, const Vector& b) {
    if (static_cast<int>(x.size()) != A.n || static_cast<int>(b.size()) != A.n)
        throw std::invalid_argument("residual_inf_norm: dimension mismatch");
    double r = 0.0;
    for (int i = 0; i < A.n; ++i) {
        double acc = b[i];
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
            acc -= A.values[p] * x[A.col_indices[p]];
        r = std::max(r, std::abs(acc));
    }
    return r;
}

double inf_norm(const Vector& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

SparseMatrix load_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty Matrix Market file: " + path);
    bool symmetric = false;
    if (line.rfind("%%MatrixMarket", 0) == 0) {
        std::istringstream hs(line);
        std::string tag, object, format, field, symm;
        hs >> tag >> object >> format >> field >> symm;
        if (object != "matrix" || format != "coordinate" || field != "real")
            throw std::runtime_error("unsupported Matrix Market header: " + line);
        if (symm == "symmetric") symmetric = true;
        else if (symm != "general") throw std::runtime_error("unsupported symmetry: " + symm);
        if (!std::getline(in, line)) throw std::runtime_error("truncated Matrix Market file");
    }
    while (line.empty() || line[0] == '%') {
        if (!std::getline(in, line)) throw std::runtime_error("truncated Matrix Market file");
    }
    std::istringstream sz(line);
    long rows = 0, cols = 0, entries = 0;
    if (!(sz >> rows >> cols >> entries)) throw std::runtime_error("bad size line: " + line);
    if (rows != cols) throw std::runtime_error("matrix is not square");

    std::vector<int> ri, ci;
    std::vector<double> vi;
    ri.reserve(entries);
    ci.reserve(entries);
    vi.reserve(entries);
    for (long k = 0; k < entries; ++k) {
        long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw std::runtime_error("truncated entry list");
        if (i < 1 || i > rows || j < 1 || j > cols) throw std::runtime_error("entry index out of bounds");
        ri.push_back(static_cast<int>(i - 1));
        ci.push_back(static_cast<int>(j - 1));
        vi.push_back(v);
        if (symmetric && i != j) {
            ri.push_back(static_cast<int>(j - 1));
            ci.push_back(static_cast<int>(i - 1));
            vi.push_back(v);
        }
    }
    return make_csr(static_cast<int>(rows), ri, ci, vi);
}

void store_matrix_market(const SparseMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.n << " " << A.n << " " << A.nnz() << "\n";
    char buf[64];
    for (int i = 0; i < A.n; ++i)
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i + 1, A.col_indices[p] + 1, A.values[p]);
            out << buf;
        }
}

SpectralRadiusEstimate spectral_radius(const SparseMatrix& M, double tol, int max_iter) {
    if (tol <= 0) throw std::invalid_argument("spectral_radius: tol must be positive");
    SpectralRadiusEstimate est;
    if (M.n == 0) return est;

    std::mt19937 rng(0x5eed);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    Vector v(M.n), w;
    for (auto& x : v) x = dist(rng);

    // Iterate on I + M: for a nonnegative matrix its Perron root 1 + rho is
    // strictly dominant even when M itself carries a -rho partner eigenvalue
    // (bipartite sparsity), where plain power iteration would oscillate.
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        M.multiply(v, w);
        for (int i = 0; i < M.n; ++i) w[i] += v[i];
        double nw = inf_norm(w);
        est.iterations = it + 1;
        if (nw == 0.0) {
            est.value = 0.0;
            est.converged = true;
            return est;
        }
        double prev = lambda;
        lambda = nw;
        for (int i = 0; i < M.n; ++i) v[i] = w[i] / nw;
        if (it > 0 && std::abs(lambda - prev) <= tol * std::abs(lambda)) {
            est.value = lambda - 1.0;
            est.converged = true;
            return est;
        }
    }
    est.value = lambda - 1.0;
    est.converged = false;
    return est;
}

}  // namespace belief
