#include "belief/region.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace belief {

namespace {

bool contains(const std::vector<int>& sorted, int v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

// Undirected structural edges (i < j).
std::vector<std::pair<int, int>> base_edges(const SparseMatrix& A) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < A.n; ++i)
        for (int p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p) {
            int j = A.col_indices[p];
            if (j == i) continue;
            edges.emplace_back(std::min(i, j), std::max(i, j));
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// Undirected adjacency (one-way couplings connect both endpoints).
std::vector<std::vector<int>> undirected_adjacency(const SparseMatrix& A) {
    std::vector<std::vector<int>> adj(A.n);
    for (auto [i, j] : base_edges(A)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    return adj;
}

void check_connected(const std::vector<std::vector<int>>& adj, int n,
                     const std::vector<int>& region, int region_id) {
    if (region.empty()) throw std::invalid_argument("region " + std::to_string(region_id) + " is empty");
    std::vector<char> in(n, 0), seen(n, 0);
    for (int v : region) in[v] = 1;
    std::vector<int> stack{region[0]};
    seen[region[0]] = 1;
    int visited = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++visited;
        for (int w : adj[v]) {
            if (in[w] && !seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    if (visited != static_cast<int>(region.size()))
        throw std::invalid_argument("large region " + std::to_string(region_id) +
                                    " induces a disconnected subgraph");
}

}  // namespace

RegionGraph build_two_layer_region_graph(const SparseMatrix& A,
                                         const std::vector<std::vector<int>>& large_regions) {
    RegionGraph rg;
    rg.n = A.n;
    rg.large = large_regions;
    auto adj = undirected_adjacency(A);
    for (size_t L = 0; L < rg.large.size(); ++L) {
        auto& r = rg.large[L];
        std::sort(r.begin(), r.end());
        if (std::adjacent_find(r.begin(), r.end()) != r.end())
            throw std::invalid_argument("large region " + std::to_string(L) + " has duplicate indices");
        if (!r.empty() && (r.front() < 0 || r.back() >= A.n))
            throw std::invalid_argument("large region " + std::to_string(L) + " index out of range");
        check_connected(adj, A.n, r, static_cast<int>(L));
    }

    // Parent sets per variable.
    std::vector<std::vector<int>> parents_of(A.n);
    for (size_t L = 0; L < rg.large.size(); ++L)
        for (int v : rg.large[L]) parents_of[v].push_back(static_cast<int>(L));
    for (int v = 0; v < A.n; ++v)
        if (parents_of[v].empty())
            throw std::invalid_argument("variable " + std::to_string(v) +
                                        " is covered by no large region");

    // Every base edge must live inside at least one large region.
    auto edges = base_edges(A);
    for (auto [i, j] : edges) {
        bool covered = false;
        for (const auto& r : rg.large)
            if (contains(r, i) && contains(r, j)) {
                covered = true;
                break;
            }
        if (!covered)
            throw std::invalid_argument("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") is covered by no large region");
    }

    // Children: variables grouped by identical parent set, multiply-parented
    // groups only. This is the finest family of intersections that keeps the
    // two layers consistent with the exactly-once counting rule.
    std::map<std::vector<int>, std::vector<int>> groups;
    for (int v = 0; v < A.n; ++v)
        if (parents_of[v].size() >= 2) groups[parents_of[v]].push_back(v);
    rg.large_children.resize(rg.large.size());
    for (auto& [pset, vars] : groups) {
        int id = static_cast<int>(rg.small.size());
        rg.small.push_back(vars);  // already sorted (built in variable order)
        rg.small_parents.push_back(pset);
        rg.counting_small.push_back(1 - static_cast<int>(pset.size()));
        for (int L : pset) rg.large_children[L].push_back(id);
    }
    rg.counting_large.assign(rg.large.size(), 1);

    auto report = validate_counting(A, rg);
    if (!report.valid) {
        std::ostringstream os;
        os << "two layers cannot count this overlap pattern exactly once:";
        for (int v : report.bad_vertices) os << " v" << v;
        for (auto [i, j] : report.bad_edges) os << " e(" << i << "," << j << ")";
        throw std::invalid_argument(os.str());
    }
    return rg;
}

CountingReport counting_report(const SparseMatrix& A, const std::vector<std::vector<int>>& regions,
                               const std::vector<int>& counts) {
    if (regions.size() != counts.size())
        throw std::invalid_argument("counting_report: one counting number per region required");
    CountingReport rep;
    for (int v = 0; v < A.n; ++v) {
        int sum = 0;
        for (size_t r = 0; r < regions.size(); ++r)
            if (contains(regions[r], v)) sum += counts[r];
        if (sum != 1) rep.bad_vertices.push_back(v);
    }
    for (auto [i, j] : base_edges(A)) {
        int sum = 0;
        for (size_t r = 0; r < regions.size(); ++r)
            if (contains(regions[r], i) && contains(regions[r], j)) sum += counts[r];
        if (sum != 1) rep.bad_edges.emplace_back(i, j);
    }
    rep.valid = rep.bad_vertices.empty() && rep.bad_edges.empty();
    return rep;
}

CountingReport validate_counting(const SparseMatrix& A, const RegionGraph& rg) {
    std::vector<std::vector<int>> regions = rg.large;
    regions.insert(regions.end(), rg.small.begin(), rg.small.end());
    std::vector<int> counts = rg.counting_large;
    counts.insert(counts.end(), rg.counting_small.begin(), rg.counting_small.end());
    return counting_report(A, regions, counts);
}

void validate_partition(const BlockPartition& p, int n) {
    std::vector<char> seen(n, 0);
    int total = 0;
    for (size_t k = 0; k < p.blocks.size(); ++k) {
        const auto& blk = p.blocks[k];
        if (blk.empty()) throw std::invalid_argument("partition block " + std::to_string(k) + " is empty");
        for (size_t i = 0; i < blk.size(); ++i) {
            int v = blk[i];
            if (v < 0 || v >= n) throw std::invalid_argument("partition index out of range");
            if (i > 0 && v <= blk[i - 1])
                throw std::invalid_argument("partition block must be sorted ascending");
            if (seen[v]) throw std::invalid_argument("partition blocks overlap at " + std::to_string(v));
            seen[v] = 1;
            ++total;
        }
    }
    if (total != n) throw std::invalid_argument("partition does not cover every index");
}

std::vector<std::vector<int>> load_regions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<int>> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<int> region;
        int v;
        while (ls >> v) region.push_back(v);
        if (!ls.eof()) throw std::runtime_error("bad region line: " + line);
        if (!region.empty()) out.push_back(std::move(region));
    }
    return out;
}

void store_regions(const std::vector<std::vector<int>>& large, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& r : large) {
        for (size_t i = 0; i < r.size(); ++i) out << (i ? " " : "") << r[i];
        out << "\n";
    }
}

std::vector<std::vector<int>> grid_line_regions(int nx, int ny) {
    std::vector<std::vector<int>> out;
    for (int iy = 0; iy < ny; ++iy) {
        std::vector<int> row(nx);
        for (int ix = 0; ix < nx; ++ix) row[ix] = iy * nx + ix;
        out.push_back(std::move(row));
    }
    for (int ix = 0; ix < nx; ++ix) {
        std::vector<int> col(ny);
        for (int iy = 0; iy < ny; ++iy) col[iy] = iy * nx + ix;
        out.push_back(std::move(col));
    }
    return out;
}

}  // namespace belief
