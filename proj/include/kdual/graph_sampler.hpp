#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "kdual/common.hpp"
#include "kdual/step_kernel.hpp"

namespace kdual {

// Block-constant edge-probability matrix: vertex u of class c_u, entry
// a_uv = scale * kernel[c_u][c_v], and P(uv edge) = min(a_uv / divisor, 1).
// `base_divisor` keeps the probability exact under rescaling: the dual matrix
// B = (m/n) A with divisor m has the same base value / base divisor as A.
struct EdgeProbabilityMatrix {
    int n = 0;
    std::vector<int> class_of;
    StepKernel kernel;
    double divisor = 1.0;      // nominal divisor (the n in min(a/n, 1))
    double scale = 1.0;        // multiplier on kernel values
    double base_divisor = 1.0; // divisor of the unscaled values; probability source

    double entry(int u, int v) const {
        return scale * kernel.values[class_of[u]][class_of[v]];
    }
    double edge_probability(int u, int v) const {
        return std::min(kernel.values[class_of[u]][class_of[v]] / base_divisor, 1.0);
    }
    double class_probability(int ci, int cj) const {
        return std::min(kernel.values[ci][cj] / base_divisor, 1.0);
    }
};

// Contiguous class blocks sized by largest-remainder apportionment of n w_i.
inline EdgeProbabilityMatrix materialize(const StepKernel& k, int n) {
    require(k.measure.is_probability(), "materialize needs a probability measure");
    require(n >= 1, "need at least one vertex");
    const std::size_t r = k.classes();
    std::vector<long> count(r);
    std::vector<double> remainder(r);
    long assigned = 0;
    for (std::size_t i = 0; i < r; ++i) {
        double exact = static_cast<double>(n) * k.measure.weights[i];
        count[i] = static_cast<long>(std::floor(exact));
        remainder[i] = exact - static_cast<double>(count[i]);
        assigned += count[i];
    }
    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), 0);
    // Largest remainder first; remainder ties go to the earlier class.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t q = 0; assigned < n; ++q, ++assigned) ++count[order[q % r]];

    EdgeProbabilityMatrix a{n, {}, k, static_cast<double>(n), 1.0, static_cast<double>(n)};
    a.class_of.reserve(n);
    for (std::size_t i = 0; i < r; ++i)
        a.class_of.insert(a.class_of.end(), count[i], static_cast<int>(i));
    return a;
}

struct SampledGraph {
    int n = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // u < v
    std::uint64_t seed = 0;
};

namespace detail {

inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
}

// Sample the columns v in [lo, hi) of row u at constant probability p,
// by geometric skipping.
inline void sample_row_block(int u, int lo, int hi, double p, std::mt19937_64& rng,
                             std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
    if (p <= 0.0 || lo >= hi) return;
    if (p >= 1.0) {
        for (int v = lo; v < hi; ++v) out.emplace_back(u, v);
        return;
    }
    const double log1mp = std::log1p(-p);
    int v = lo - 1;
    while (true) {
        double x = unit_double(rng);
        if (x <= 0.0) break; // skip past the block; probability 2^-53 per draw
        v += 1 + static_cast<int>(std::floor(std::log(x) / log1mp));
        if (v >= hi || v < 0) break;
        out.emplace_back(u, v);
    }
}

inline void sample_rows(const EdgeProbabilityMatrix& a, std::uint64_t seed, int row_begin,
                        int row_end, std::vector<std::pair<std::uint32_t, std::uint32_t>>& out) {
    const std::size_t r = a.kernel.classes();
    // Class block boundaries in vertex order (classes are contiguous).
    std::vector<int> block_start(r + 1, a.n);
    for (int v = a.n - 1; v >= 0; --v) block_start[a.class_of[v]] = v;
    for (std::size_t c = r; c-- > 0;)
        if (block_start[c] == a.n) block_start[c] = block_start[c + 1];

    for (int u = row_begin; u < row_end; ++u) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(u)));
        const int cu = a.class_of[u];
        for (std::size_t c = 0; c < r; ++c) {
            int lo = std::max(block_start[c], u + 1);
            int hi = block_start[c + 1];
            sample_row_block(u, lo, hi, a.class_probability(cu, static_cast<int>(c)), rng, out);
        }
    }
}

} // namespace detail

// Independent-edge sample of G(A). Each row has its own derived RNG stream,
// so the edge set is identical for any thread count.
inline SampledGraph sample(const EdgeProbabilityMatrix& a, std::uint64_t seed,
                           int threads = 1) {
    SampledGraph g{a.n, {}, seed};
    if (a.n <= 1) return g;
    threads = std::max(1, std::min(threads, a.n));
    if (threads == 1) {
        detail::sample_rows(a, seed, 0, a.n - 1, g.edges);
        return g;
    }
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> parts(threads);
    std::vector<std::thread> pool;
    const int rows = a.n - 1;
    for (int t = 0; t < threads; ++t) {
        int lo = static_cast<int>(static_cast<long>(rows) * t / threads);
        int hi = static_cast<int>(static_cast<long>(rows) * (t + 1) / threads);
        pool.emplace_back([&, t, lo, hi] { detail::sample_rows(a, seed, lo, hi, parts[t]); });
    }
    for (auto& th : pool) th.join();
    for (auto& part : parts) g.edges.insert(g.edges.end(), part.begin(), part.end());
    return g;
}

// Components are labeled 0, 1, ... in order of decreasing size; equal sizes
// are ordered by smallest minimum vertex label. The giant is component 0.
struct ComponentDecomposition {
    std::vector<int> component_of;
    std::vector<long> sizes;          // per component, descending
    std::vector<long> edges_in;       // edges within each component
    int giant = 0;
    std::map<long, long> size_histogram; // component size -> count
};

inline ComponentDecomposition components(const SampledGraph& g) {
    const int n = g.n;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [u, v] : g.edges) {
        int a = find(static_cast<int>(u)), b = find(static_cast<int>(v));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    // Roots in ascending order = ascending minimum vertex label.
    std::vector<int> root_id(n, -1);
    std::vector<long> size_by_root;
    std::vector<int> roots;
    for (int v = 0; v < n; ++v) {
        int rt = find(v);
        if (root_id[rt] < 0) {
            root_id[rt] = static_cast<int>(roots.size());
            roots.push_back(rt);
            size_by_root.push_back(0);
        }
        ++size_by_root[root_id[rt]];
    }
    std::vector<std::size_t> order(roots.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return size_by_root[x] > size_by_root[y];
    }); // stable: size ties keep ascending min-label order

    ComponentDecomposition d;
    d.component_of.assign(n, -1);
    d.sizes.resize(roots.size());
    d.edges_in.assign(roots.size(), 0);
    std::vector<int> relabel(roots.size());
    for (std::size_t q = 0; q < order.size(); ++q) {
        relabel[order[q]] = static_cast<int>(q);
        d.sizes[q] = size_by_root[order[q]];
        ++d.size_histogram[d.sizes[q]];
    }
    for (int v = 0; v < n; ++v) d.component_of[v] = relabel[root_id[find(v)]];
    for (auto [u, v] : g.edges) ++d.edges_in[d.component_of[u]];
    d.giant = 0;
    return d;
}

struct GiantRemoval {
    SampledGraph subgraph;            // the graph with the giant deleted
    EdgeProbabilityMatrix sub_matrix; // A restricted to the remaining vertices
    std::vector<int> vertex_map;      // new index -> original label (increasing)
};

inline GiantRemoval remove_giant(const SampledGraph& g, const EdgeProbabilityMatrix& a,
                                 const ComponentDecomposition& d) {
    std::vector<int> vertex_map;
    std::vector<int> new_index(g.n, -1);
    for (int v = 0; v < g.n; ++v)
        if (d.component_of[v] != d.giant) {
            new_index[v] = static_cast<int>(vertex_map.size());
            vertex_map.push_back(v);
        }
    const int m = static_cast<int>(vertex_map.size());
    SampledGraph sub{m, {}, g.seed};
    for (auto [u, v] : g.edges)
        if (new_index[u] >= 0 && new_index[v] >= 0)
            sub.edges.emplace_back(new_index[u], new_index[v]);
    EdgeProbabilityMatrix restricted = a;
    restricted.n = m;
    restricted.class_of.clear();
    for (int v : vertex_map) restricted.class_of.push_back(a.class_of[v]);
    return GiantRemoval{std::move(sub), std::move(restricted), std::move(vertex_map)};
}

// B = (m/n) A-tilde, with G(B) using divisor m so the per-pair edge
// probabilities min(B/m, 1) = min(A/n, 1) are preserved exactly.
inline EdgeProbabilityMatrix dual_matrix(const EdgeProbabilityMatrix& sub, int m, int n) {
    require(sub.n == m, "m must match the restricted matrix dimension");
    EdgeProbabilityMatrix b = sub;
    if (m == 0) return b;
    b.scale = sub.scale * static_cast<double>(m) / static_cast<double>(n);
    b.divisor = static_cast<double>(m);
    // base values and base_divisor unchanged: probabilities identical by construction
    return b;
}

// Per-class census nu_i = #{vertices of class i outside the giant} / n
// (or over all vertices when exclude_giant is false).
inline std::vector<double> type_census(const ComponentDecomposition& d,
                                       const EdgeProbabilityMatrix& a,
                                       bool exclude_giant = true) {
    std::vector<double> nu(a.kernel.classes(), 0.0);
    for (int v = 0; v < a.n; ++v) {
        if (exclude_giant && d.component_of[v] == d.giant) continue;
        nu[a.class_of[v]] += 1.0;
    }
    for (auto& x : nu) x /= static_cast<double>(a.n);
    return nu;
}

enum class SumOver { All, Giant, NonGiant };

// (1/n) sum of f(class(v)) over the selected vertices; filter_size restricts
// to vertices whose component has exactly that many vertices.
inline double component_sum(const ComponentDecomposition& d, const EdgeProbabilityMatrix& a,
                            const std::vector<double>& f, SumOver over,
                            std::optional<long> filter_size = std::nullopt) {
    require(f.size() == a.kernel.classes(), "per-class vector length mismatch");
    double s = 0.0;
    for (int v = 0; v < a.n; ++v) {
        const bool in_giant = d.component_of[v] == d.giant;
        if (over == SumOver::Giant && !in_giant) continue;
        if (over == SumOver::NonGiant && in_giant) continue;
        if (filter_size && d.sizes[d.component_of[v]] != *filter_size) continue;
        s += f[a.class_of[v]];
    }
    return s / static_cast<double>(a.n);
}

} // namespace kdual
