#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kdual/common.hpp"

namespace kdual {

// Unlabeled tree on k vertices. `edges` is one labeled representative;
// `aut` is the automorphism count; degrees are per-vertex in the representative.
struct TreeShape {
    int k = 0;
    std::vector<std::pair<int, int>> edges;
    long aut = 1;
    std::vector<int> degrees;
};

namespace detail {

// AHU canonical code of the tree rooted at v.
inline std::string ahu_code(int v, int parent, const std::vector<std::vector<int>>& adj) {
    std::vector<std::string> child;
    for (int u : adj[v])
        if (u != parent) child.push_back(ahu_code(u, v, adj));
    std::sort(child.begin(), child.end());
    std::string code = "(";
    for (auto& c : child) code += c;
    code += ")";
    return code;
}

inline std::vector<int> tree_centers(const std::vector<std::vector<int>>& adj) {
    const int k = static_cast<int>(adj.size());
    if (k == 1) return {0};
    std::vector<int> deg(k);
    std::vector<int> leaves;
    for (int i = 0; i < k; ++i) {
        deg[i] = static_cast<int>(adj[i].size());
        if (deg[i] == 1) leaves.push_back(i);
    }
    int remaining = k;
    while (remaining > 2) {
        std::vector<int> next;
        remaining -= static_cast<int>(leaves.size());
        for (int v : leaves)
            for (int u : adj[v])
                if (--deg[u] == 1) next.push_back(u);
        leaves = std::move(next);
    }
    return leaves;
}

// Canonical code of an unlabeled tree: minimum AHU code over its centers.
inline std::string canonical_code(const std::vector<std::pair<int, int>>& edges, int k) {
    std::vector<std::vector<int>> adj(k);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    auto centers = tree_centers(adj);
    std::string best;
    for (int c : centers) {
        std::string code = ahu_code(c, -1, adj);
        if (best.empty() || code < best) best = code;
    }
    return best;
}

inline std::vector<std::pair<int, int>> prufer_decode(const std::vector<int>& seq, int k) {
    std::vector<int> deg(k, 1);
    for (int s : seq) ++deg[s];
    std::vector<std::pair<int, int>> edges;
    std::vector<bool> done(k, false);
    for (int s : seq) {
        for (int leaf = 0; leaf < k; ++leaf) {
            if (!done[leaf] && deg[leaf] == 1) {
                edges.emplace_back(leaf, s);
                done[leaf] = true;
                --deg[s];
                break;
            }
        }
    }
    int u = -1;
    for (int i = 0; i < k; ++i)
        if (!done[i] && deg[i] == 1) {
            if (u < 0) u = i;
            else edges.emplace_back(u, i);
        }
    return edges;
}

} // namespace detail

// All unlabeled trees on k vertices with automorphism counts. Enumerates the
// k^{k-2} labeled trees via Pruefer sequences, deduplicates by canonical code,
// and gets aut from Cayley's formula: #labeled copies of T = k!/aut(T).
inline std::vector<TreeShape> enumerate_trees(int k) {
    require(k >= 1 && k <= 8, "tree enumeration supports 1 <= k <= 8");
    if (k == 1) return {TreeShape{1, {}, 1, {0}}};

    long factorial = 1;
    for (int i = 2; i <= k; ++i) factorial *= i;

    struct Entry {
        std::vector<std::pair<int, int>> edges;
        long labeled_count = 0;
    };
    std::map<std::string, Entry> shapes;

    std::vector<int> seq(k - 2, 0);
    while (true) {
        auto edges = detail::prufer_decode(seq, k);
        auto code = detail::canonical_code(edges, k);
        auto& e = shapes[code];
        if (e.labeled_count == 0) e.edges = edges;
        ++e.labeled_count;

        int pos = k - 3;
        while (pos >= 0 && seq[pos] == k - 1) seq[pos--] = 0;
        if (pos < 0) break;
        ++seq[pos];
    }

    std::vector<TreeShape> out;
    for (auto& [code, e] : shapes) {
        TreeShape t;
        t.k = k;
        t.edges = e.edges;
        t.aut = factorial / e.labeled_count;
        t.degrees.assign(k, 0);
        for (auto [a, b] : t.edges) {
            ++t.degrees[a];
            ++t.degrees[b];
        }
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace kdual
