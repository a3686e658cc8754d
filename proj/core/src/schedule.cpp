#include "belief/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace belief {

namespace {

Schedule from_colors(ScheduleKind kind, std::vector<int> color_of, int num_colors) {
    Schedule s;
    s.kind = kind;
    s.color_of = std::move(color_of);
    s.num_colors = num_colors;
    s.order.resize(s.color_of.size());
    std::iota(s.order.begin(), s.order.end(), 0);
    std::stable_sort(s.order.begin(), s.order.end(), [&](int a, int b) {
        return s.color_of[a] < s.color_of[b];
    });
    return s;
}

// Greedy coloring of the undirected structure (i~j if A_ij or A_ji nonzero).
std::vector<int> greedy_colors(const SparseMatrix& A, int& num_colors) {
    std::vector<std::vector<int>> adj(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            if (j == i) continue;
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    std::vector<int> color(A.n, -1);
    num_colors = 1;
    std::vector<char> used;
    for (int i = 0; i < A.n; ++i) {
        used.assign(num_colors + 1, 0);
        for (int j : adj[i])
            if (color[j] >= 0 && color[j] < static_cast<int>(used.size())) used[color[j]] = 1;
        int c = 0;
        while (c < static_cast<int>(used.size()) && used[c]) ++c;
        color[i] = c;
        num_colors = std::max(num_colors, c + 1);
    }
    return color;
}

}  // namespace

Schedule Schedule::parallel_flood() {
    Schedule s;
    s.kind = ScheduleKind::ParallelFlood;
    return s;
}

Schedule Schedule::sequential(int n) {
    Schedule s;
    s.kind = ScheduleKind::SequentialLexicographic;
    s.order.resize(n);
    std::iota(s.order.begin(), s.order.end(), 0);
    return s;
}

Schedule Schedule::custom(std::vector<int> order) {
    std::vector<char> seen(order.size(), 0);
    for (int v : order) {
        if (v < 0 || v >= static_cast<int>(order.size()) || seen[v])
            throw std::invalid_argument("Schedule::custom: order is not a permutation");
        seen[v] = 1;
    }
    Schedule s;
    s.kind = ScheduleKind::CustomOrder;
    s.order = std::move(order);
    return s;
}

Schedule Schedule::red_black_grid(int nx, int ny) {
    std::vector<int> color(static_cast<size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) color[static_cast<size_t>(iy) * nx + ix] = (ix + iy) % 2;
    return from_colors(ScheduleKind::RedBlack, std::move(color), 2);
}

Schedule Schedule::four_color_grid(int nx, int ny) {
    std::vector<int> color(static_cast<size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            color[static_cast<size_t>(iy) * nx + ix] = 2 * (iy % 2) + (ix % 2);
    return from_colors(ScheduleKind::FourColor, std::move(color), 4);
}

Schedule Schedule::red_black(const SparseMatrix& A) {
    int nc = 0;
    auto color = greedy_colors(A, nc);
    return from_colors(ScheduleKind::RedBlack, std::move(color), nc);
}

Schedule Schedule::four_color(const SparseMatrix& A) {
    int nc = 0;
    auto color = greedy_colors(A, nc);
    return from_colors(ScheduleKind::FourColor, std::move(color), nc);
}

}  // namespace belief
