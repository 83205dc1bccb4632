#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kdual/common.hpp"
#include "kdual/step_kernel.hpp"
#include "kdual/trees.hpp"

namespace kdual {

struct SurvivalSolution {
    std::vector<double> rho_by_class;
    double rho = 0.0;
    long iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Maximal fixed point of rho = 1 - exp(-T_k rho), iterated monotonically
// from the all-ones vector.
inline SurvivalSolution survival(const StepKernel& k, double tol = 1e-12,
                                 long max_iter = 1000000) {
    require(k.measure.is_probability(), "survival needs a probability measure");
    require(tol > 0.0, "tolerance must be positive");
    const std::size_t r = k.classes();
    std::vector<double> f(r, 1.0), next(r);
    SurvivalSolution sol;
    for (long it = 1; it <= max_iter; ++it) {
        auto tf = apply_operator(k, f);
        double diff = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            next[i] = 1.0 - std::exp(-tf[i]);
            diff = std::max(diff, std::abs(next[i] - f[i]));
        }
        f = next;
        sol.iterations = it;
        if (diff < tol) {
            sol.converged = true;
            break;
        }
    }
    sol.rho_by_class = f;
    auto tf = apply_operator(k, f);
    for (std::size_t i = 0; i < r; ++i)
        sol.residual = std::max(sol.residual, std::abs(f[i] - (1.0 - std::exp(-tf[i]))));
    sol.rho = 0.0;
    for (std::size_t i = 0; i < r; ++i) sol.rho += k.measure.weights[i] * f[i];
    return sol;
}

struct RhoKEstimate {
    int k_max = 0;
    long samples = 0;
    // by_class[i][k-1]: estimated P(total progeny = k) from a class-i root.
    std::vector<std::vector<double>> by_class;
    std::vector<std::vector<double>> by_class_se;
    std::vector<double> aggregate; // mu-distributed root
    std::vector<double> aggregate_se;
};

namespace detail {

// Total progeny of one walk, capped: returns k_max+1 for anything larger.
inline int progeny_walk(const StepKernel& k, int root_class, int k_max, std::mt19937_64& rng) {
    const std::size_t r = k.classes();
    std::vector<int> queue{root_class};
    int total = 1;
    while (!queue.empty() && total <= k_max) {
        int t = queue.back();
        queue.pop_back();
        for (std::size_t j = 0; j < r; ++j) {
            double mean = k.values[t][j] * k.measure.weights[j];
            if (mean <= 0.0) continue;
            std::poisson_distribution<int> pois(mean);
            int c = pois(rng);
            total += c;
            if (total > k_max) return k_max + 1;
            for (int q = 0; q < c; ++q) queue.push_back(static_cast<int>(j));
        }
    }
    return total;
}

} // namespace detail

// Monte-Carlo estimates of rho_k for k = 1..k_max, per root class and
// for a mu-distributed root.
inline RhoKEstimate rho_k_mc(const StepKernel& k, int k_max, long samples,
                             std::uint64_t seed = 0) {
    require(k.measure.is_probability(), "rho_k_mc needs a probability measure");
    require(samples >= 1, "need at least one sample");
    require(k_max >= 1, "k_max must be >= 1");
    const std::size_t r = k.classes();
    RhoKEstimate est;
    est.k_max = k_max;
    est.samples = samples;
    est.by_class.assign(r, std::vector<double>(k_max, 0.0));
    est.by_class_se.assign(r, std::vector<double>(k_max, 0.0));
    est.aggregate.assign(k_max, 0.0);
    est.aggregate_se.assign(k_max, 0.0);

    auto finish = [&](std::vector<double>& p, std::vector<double>& se) {
        for (int q = 0; q < k_max; ++q) {
            p[q] /= static_cast<double>(samples);
            se[q] = std::sqrt(p[q] * (1.0 - p[q]) / static_cast<double>(samples));
        }
    };

    for (std::size_t i = 0; i < r; ++i) {
        std::mt19937_64 rng(derive_seed(seed, i + 1));
        for (long s = 0; s < samples; ++s) {
            int total = detail::progeny_walk(k, static_cast<int>(i), k_max, rng);
            if (total <= k_max) est.by_class[i][total - 1] += 1.0;
        }
        finish(est.by_class[i], est.by_class_se[i]);
    }

    std::mt19937_64 rng(derive_seed(seed, 0));
    std::discrete_distribution<int> root(k.measure.weights.begin(), k.measure.weights.end());
    for (long s = 0; s < samples; ++s) {
        int total = detail::progeny_walk(k, root(rng), k_max, rng);
        if (total <= k_max) est.aggregate[total - 1] += 1.0;
    }
    finish(est.aggregate, est.aggregate_se);
    return est;
}

// t_isol-times: integral over class assignments of
//   prod_{ij in E(F)} W(x_i, x_j) * prod_k f_k(x_k) e^{-lambda(x_k)},
// evaluated by message passing over the tree in O(|F| r^2).
inline double t_isol_times(const TreeShape& f_tree,
                           const std::vector<std::vector<double>>& fs,
                           const StepKernel& w) {
    const int k = f_tree.k;
    const std::size_t r = w.classes();
    require(static_cast<int>(fs.size()) == k, "one per-class vector per tree vertex required");
    for (const auto& fv : fs)
        require(fv.size() == r, "per-class vector length mismatch");
    require(static_cast<int>(f_tree.edges.size()) == k - 1, "shape is not a tree");

    std::vector<std::vector<int>> adj(k);
    for (auto [a, b] : f_tree.edges) {
        require(a >= 0 && a < k && b >= 0 && b < k && a != b, "bad tree edge");
        adj[a].push_back(b);
        adj[b].push_back(a);
    }

    const std::vector<double> lam = marginal(w);
    std::vector<double> damp(r);
    for (std::size_t x = 0; x < r; ++x) damp[x] = std::exp(-lam[x]);

    // Post-order over an iterative DFS from vertex 0; connectivity of a graph
    // with k-1 edges and no self-loops is checked via visit count.
    std::vector<int> order, parent(k, -1);
    std::vector<bool> visited(k, false);
    std::vector<int> stack{0};
    visited[0] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int u : adj[v])
            if (!visited[u]) {
                visited[u] = true;
                parent[u] = v;
                stack.push_back(u);
            }
    }
    require(static_cast<int>(order.size()) == k, "shape is not a tree (disconnected)");

    std::vector<std::vector<double>> msg(k, std::vector<double>(r));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        for (std::size_t x = 0; x < r; ++x) msg[v][x] = fs[v][x] * damp[x];
        for (int u : adj[v]) {
            if (u == parent[v]) continue;
            for (std::size_t x = 0; x < r; ++x) {
                double acc = 0.0;
                for (std::size_t y = 0; y < r; ++y)
                    acc += w.values[x][y] * w.measure.weights[y] * msg[u][y];
                msg[v][x] *= acc;
            }
        }
    }
    double out = 0.0;
    for (std::size_t x = 0; x < r; ++x) out += w.measure.weights[x] * msg[0][x];
    return out;
}

// t_isol-plus: sum over tree vertices of t_isol_times with f at that vertex
// and the constant 1 elsewhere.
inline double t_isol_plus(const TreeShape& f_tree, const std::vector<double>& f,
                          const StepKernel& w) {
    const std::size_t r = w.classes();
    require(f.size() == r, "per-class vector length mismatch");
    std::vector<std::vector<double>> fs(f_tree.k, std::vector<double>(r, 1.0));
    double total = 0.0;
    for (int v = 0; v < f_tree.k; ++v) {
        fs[v] = f;
        total += t_isol_times(f_tree, fs, w);
        fs[v].assign(r, 1.0);
    }
    return total;
}

struct RhoKTree {
    std::vector<double> by_class;
    double aggregate = 0.0;
};

// rho_k via the tree-sum identity: with f the normalized class indicator,
// rho_k(k; i) = sum over tree shapes T on k vertices of t+ (T, f, k)/aut(T).
inline RhoKTree rho_k_tree(const StepKernel& k, int count) {
    require(k.measure.is_probability(), "rho_k_tree needs a probability measure");
    const std::size_t r = k.classes();
    for (double w : k.measure.weights)
        require(w > 0.0, "zero-weight class indicator rejected");
    auto shapes = enumerate_trees(count);
    RhoKTree out;
    out.by_class.assign(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<double> f(r, 0.0);
        f[i] = 1.0 / k.measure.weights[i];
        double acc = 0.0;
        for (const auto& t : shapes)
            acc += t_isol_plus(t, f, k) / static_cast<double>(t.aut);
        out.by_class[i] = acc;
        out.aggregate += k.measure.weights[i] * acc;
    }
    return out;
}

// Cumulative rho_{<=k}.
inline double rho_leq_k(const StepKernel& k, int count) {
    double s = 0.0;
    for (int q = 1; q <= count; ++q) s += rho_k_tree(k, q).aggregate;
    return s;
}

} // namespace kdual
