#pragma once
// Independent count of the cells of the free strict omega-category on a
// globular pasting diagram, via Steiner's tables over the chain complex of the
// diagram. Only the tree shape is read from the library.

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <vector>

#include "globwb/tree.hpp"

namespace oracle {

constexpr int kMaxDim = 3;

struct Basis {
    std::vector<int> count;                   // basis elements per dimension
    std::vector<std::vector<int>> src, tgt;   // boundary of a basis element
};

inline void heights(const globwb::Tree& t, int depth, std::vector<int>& tops, std::vector<int>& joins,
                    int& pending) {
    if (t.children.empty()) {
        if (!tops.empty()) joins.push_back(pending);
        tops.push_back(depth);
        return;
    }
    for (std::size_t i = 0; i < t.children.size(); ++i) {
        if (i) pending = depth;
        heights(t.children[i], depth + 1, tops, joins, pending);
    }
}

// Glue globes along the junctions with a union-find over (globe, dim, side).
inline Basis pasting_basis(const globwb::Tree& t) {
    std::vector<int> tops, joins;
    int pending = 0;
    heights(t, 0, tops, joins, pending);
    const int q = static_cast<int>(tops.size());
    // id of (globe g, dim d, side e); the top cell uses side 0
    auto id = [&](int g, int d, int e) { return (g * (kMaxDim + 2) + d) * 2 + e; };
    const int total = q * (kMaxDim + 2) * 2;
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    for (int g = 0; g + 1 < q; ++g) {
        const int j = joins[g];
        for (int d = 0; d < j; ++d)
            for (int e = 0; e < 2; ++e) unite(id(g, d, e), id(g + 1, d, e));
        unite(id(g, j, 1), id(g + 1, j, 0));
    }
    auto exists = [&](int g, int d, int e) { return d < tops[g] || (d == tops[g] && e == 0); };

    Basis b;
    b.count.assign(kMaxDim + 1, 0);
    b.src.assign(kMaxDim + 1, {});
    b.tgt.assign(kMaxDim + 1, {});
    std::vector<int> index(total, -1);
    for (int d = 0; d <= kMaxDim; ++d)
        for (int g = 0; g < q; ++g)
            for (int e = 0; e < 2; ++e) {
                if (!exists(g, d, e)) continue;
                int r = find(id(g, d, e));
                if (index[r] >= 0) continue;
                index[r] = b.count[d]++;
                if (d > 0) {
                    b.src[d].push_back(index[find(id(g, d - 1, 0))]);
                    b.tgt[d].push_back(index[find(id(g, d - 1, 1))]);
                }
            }
    return b;
}

// x[i][0] = minus part, x[i][1] = plus part, as coefficient vectors
using Chain = std::vector<int>;
using Table = std::array<std::array<Chain, 2>, kMaxDim + 1>;

inline int table_dim(const Table& x) {
    int d = 0;
    for (int i = 0; i <= kMaxDim; ++i)
        for (int e = 0; e < 2; ++e)
            if (std::any_of(x[i][e].begin(), x[i][e].end(), [](int v) { return v != 0; })) d = std::max(d, i);
    return d;
}

inline std::vector<Table> atoms(const Basis& b) {
    std::vector<Table> out;
    for (int p = 0; p <= kMaxDim; ++p)
        for (int c = 0; c < b.count[p]; ++c) {
            Table x;
            for (int i = 0; i <= kMaxDim; ++i)
                for (int e = 0; e < 2; ++e) x[i][e].assign(b.count[i], 0);
            x[p][0][c] = x[p][1][c] = 1;
            for (int i = p; i > 0; --i)
                for (int e = 0; e < 2; ++e) {
                    // boundary t - s, split into negative (e = 0) and positive (e = 1) parts
                    std::vector<int> bd(b.count[i - 1], 0);
                    for (int y = 0; y < b.count[i]; ++y) {
                        bd[b.tgt[i][y]] += x[i][e][y];
                        bd[b.src[i][y]] -= x[i][e][y];
                    }
                    for (int z = 0; z < b.count[i - 1]; ++z)
                        x[i - 1][e][z] = e == 0 ? std::max(0, -bd[z]) : std::max(0, bd[z]);
                }
            out.push_back(x);
        }
    return out;
}

// x after y along dimension j, when x_j^- = y_j^+
inline bool compose_tables(const Table& x, const Table& y, int j, Table& z) {
    if (x[j][0] != y[j][1]) return false;
    for (int i = 0; i < j; ++i)
        if (x[i] != y[i]) return false;
    z = x;
    z[j][0] = y[j][0];
    z[j][1] = x[j][1];
    for (int i = j + 1; i <= kMaxDim; ++i)
        for (int e = 0; e < 2; ++e)
            for (std::size_t c = 0; c < z[i][e].size(); ++c) z[i][e][c] = x[i][e][c] + y[i][e][c];
    return true;
}

// Number of k-cells (k <= kMaxDim) of the free strict omega-category on the tree.
inline std::vector<long long> free_cell_counts(const globwb::Tree& t) {
    Basis b = pasting_basis(t);
    std::set<Table> cells;
    std::vector<Table> work;
    for (const auto& a : atoms(b))
        if (cells.insert(a).second) work.push_back(a);
    std::vector<Table> all(work.begin(), work.end());
    while (!work.empty()) {
        Table x = work.back();
        work.pop_back();
        const std::size_t n = all.size();
        for (std::size_t q = 0; q < n; ++q)
            for (int j = 0; j < kMaxDim; ++j)
                for (int order = 0; order < 2; ++order) {
                    Table z;
                    const Table& l = order ? all[q] : x;
                    const Table& r = order ? x : all[q];
                    if (compose_tables(l, r, j, z) && cells.insert(z).second) {
                        work.push_back(z);
                        all.push_back(z);
                    }
                }
    }
    std::vector<long long> out(kMaxDim + 1, 0);
    for (const auto& c : cells)
        for (int k = table_dim(c); k <= kMaxDim; ++k) ++out[k];
    return out;
}

} // namespace oracle
