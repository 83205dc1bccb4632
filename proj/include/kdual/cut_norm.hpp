#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kdual/common.hpp"
#include "kdual/step_kernel.hpp"

namespace kdual {

struct CutNormResult {
    double value = 0.0;
    std::vector<int> f_signs; // in {-1,+1}
    std::vector<int> g_signs;
    bool exact = false;
};

struct CutDistanceResult {
    double value = 0.0;
    std::vector<std::size_t> permutation; // class bijection achieving the value
    bool exact = false;
};

namespace detail {

// Weighted bilinear form matrix M_ij = W[i][j] w_i w_j.
inline Matrix weighted_form(const StepFunction& w) {
    const std::size_t r = w.classes();
    Matrix m(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            m[i][j] = w.values[i][j] * w.measure.weights[i] * w.measure.weights[j];
    return m;
}

inline double bilinear(const Matrix& m, const std::vector<int>& f, const std::vector<int>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            s += f[i] * m[i][j] * g[j];
    return s;
}

// Lexicographic order on sign vectors, +1 before -1; f compared before g.
inline bool signs_less(const std::vector<int>& fa, const std::vector<int>& ga,
                       const std::vector<int>& fb, const std::vector<int>& gb) {
    auto cmp = [](int a, int b) { return a > b; };
    if (fa != fb)
        return std::lexicographical_compare(fa.begin(), fa.end(), fb.begin(), fb.end(), cmp);
    return std::lexicographical_compare(ga.begin(), ga.end(), gb.begin(), gb.end(), cmp);
}

} // namespace detail

// Exact cut norm: enumerate f in {-1,+1}^r by Gray code; for each f the optimal
// g is sign of the weighted column sums (bilinearity puts the optimum at a
// vertex of the cube). Ties in g resolve to +1.
inline CutNormResult cut_norm_exact(const StepFunction& w, std::size_t cap = 24) {
    const std::size_t r = w.classes();
    require(r <= cap, "class count exceeds exact cut-norm cap; use the heuristic");
    const Matrix m = detail::weighted_form(w);

    std::vector<int> f(r, 1);
    std::vector<double> col(r, 0.0);
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < r; ++i) col[j] += m[i][j];

    auto eval = [&]() {
        double s = 0.0;
        for (double c : col) s += std::abs(c);
        return s;
    };
    auto g_of_col = [&]() {
        std::vector<int> g(r);
        for (std::size_t j = 0; j < r; ++j) g[j] = col[j] >= 0.0 ? 1 : -1;
        return g;
    };

    CutNormResult best{eval(), f, g_of_col(), true};
    const std::uint64_t n = 1ULL << r;
    for (std::uint64_t t = 1; t < n; ++t) {
        const int bit = std::countr_zero(t);
        f[bit] = -f[bit];
        const double d = 2.0 * f[bit];
        for (std::size_t j = 0; j < r; ++j) col[j] += d * m[bit][j];
        const double v = eval();
        if (v > best.value) {
            best.value = v;
            best.f_signs = f;
            best.g_signs = g_of_col();
        } else if (v == best.value) {
            auto g = g_of_col();
            if (detail::signs_less(f, g, best.f_signs, best.g_signs)) {
                best.f_signs = f;
                best.g_signs = g;
            }
        }
    }
    // Recompute from the witness so the reported value matches its signs exactly.
    best.value = std::abs(detail::bilinear(m, best.f_signs, best.g_signs));
    return best;
}

// Alternating maximization from seeded random sign starts; certified lower bound.
inline CutNormResult cut_norm_heuristic(const StepFunction& w, int restarts = 32,
                                        std::uint64_t seed = 0) {
    require(restarts >= 1, "need at least one restart");
    const std::size_t r = w.classes();
    const Matrix m = detail::weighted_form(w);

    CutNormResult best;
    best.f_signs.assign(r, 1);
    best.g_signs.assign(r, 1);
    best.value = -1.0;
    for (int rs = 0; rs < restarts; ++rs) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(rs)));
        std::vector<int> f(r), g(r, 1);
        for (auto& fi : f) fi = (rng() & 1) ? 1 : -1;
        double val = -1.0;
        for (int pass = 0; pass < 1000; ++pass) {
            bool changed = false;
            for (std::size_t j = 0; j < r; ++j) {
                double c = 0.0;
                for (std::size_t i = 0; i < r; ++i) c += f[i] * m[i][j];
                int s = c >= 0.0 ? 1 : -1;
                if (s != g[j]) { g[j] = s; changed = true; }
            }
            for (std::size_t i = 0; i < r; ++i) {
                double c = 0.0;
                for (std::size_t j = 0; j < r; ++j) c += m[i][j] * g[j];
                int s = c >= 0.0 ? 1 : -1;
                if (s != f[i]) { f[i] = s; changed = true; }
            }
            val = detail::bilinear(m, f, g);
            if (!changed) break;
        }
        val = std::abs(val);
        if (val > best.value ||
            (val == best.value && detail::signs_less(f, g, best.f_signs, best.g_signs))) {
            best.value = val;
            best.f_signs = f;
            best.g_signs = g;
        }
    }
    best.exact = false;
    return best;
}

// 0/1-valued variant (equivalent to the signed norm within a factor 4).
inline double cut_norm_01(const StepFunction& w, bool exact = true, std::size_t cap = 24,
                          int restarts = 32, std::uint64_t seed = 0) {
    const std::size_t r = w.classes();
    const Matrix m = detail::weighted_form(w);
    auto value_for = [&](const std::vector<double>& col) {
        double pos = 0.0, neg = 0.0;
        for (double c : col) {
            if (c > 0.0) pos += c;
            else neg -= c;
        }
        return std::max(pos, neg);
    };
    if (exact) {
        require(r <= cap, "class count exceeds exact cut-norm cap; use the heuristic");
        std::vector<int> f(r, 0);
        std::vector<double> col(r, 0.0);
        double best = 0.0;
        const std::uint64_t n = 1ULL << r;
        for (std::uint64_t t = 1; t < n; ++t) {
            const int bit = std::countr_zero(t);
            f[bit] ^= 1;
            const double d = f[bit] ? 1.0 : -1.0;
            for (std::size_t j = 0; j < r; ++j) col[j] += d * m[bit][j];
            best = std::max(best, value_for(col));
        }
        return best;
    }
    // Heuristic: alternating ascent on B and on -B separately.
    double best = 0.0;
    for (int rs = 0; rs < restarts; ++rs) {
        std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(rs)));
        for (int sign = 0; sign < 2; ++sign) {
            const double dir = sign ? -1.0 : 1.0;
            std::vector<int> f(r), g(r, 0);
            for (auto& fi : f) fi = static_cast<int>(rng() & 1);
            for (int pass = 0; pass < 1000; ++pass) {
                bool changed = false;
                for (std::size_t j = 0; j < r; ++j) {
                    double c = 0.0;
                    for (std::size_t i = 0; i < r; ++i) c += f[i] * m[i][j];
                    int s = dir * c > 0.0 ? 1 : 0;
                    if (s != g[j]) { g[j] = s; changed = true; }
                }
                for (std::size_t i = 0; i < r; ++i) {
                    double c = 0.0;
                    for (std::size_t j = 0; j < r; ++j) c += m[i][j] * g[j];
                    int s = dir * c > 0.0 ? 1 : 0;
                    if (s != f[i]) { f[i] = s; changed = true; }
                }
                if (!changed) break;
            }
            double v = 0.0;
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) v += f[i] * m[i][j] * g[j];
            best = std::max(best, std::abs(v));
        }
    }
    return best;
}

namespace detail {

inline void check_weight_multisets(const WeightedMeasure& a, const WeightedMeasure& b) {
    auto wa = a.weights, wb = b.weights;
    std::sort(wa.begin(), wa.end());
    std::sort(wb.begin(), wb.end());
    require(wa.size() == wb.size(), "class counts differ");
    for (std::size_t i = 0; i < wa.size(); ++i)
        require(std::abs(wa[i] - wb[i]) <= 1e-12, "class weight multisets are incompatible");
}

inline StepFunction permuted_difference(const StepKernel& k1, const StepKernel& k2,
                                        const std::vector<std::size_t>& tau) {
    const std::size_t r = k1.classes();
    Matrix v(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            v[i][j] = k1.values[i][j] - k2.values[tau[i]][tau[j]];
    return StepFunction(std::move(v), k1.measure);
}

} // namespace detail

// Exact cut distance over weight-compatible class permutations.
inline CutDistanceResult cut_distance_exact(const StepKernel& k1, const StepKernel& k2,
                                            std::size_t cap = 8) {
    const std::size_t r = k1.classes();
    require(r <= cap, "class count exceeds exact cut-distance cap; use the heuristic");
    detail::check_weight_multisets(k1.measure, k2.measure);

    CutDistanceResult best;
    best.value = -1.0;
    std::vector<std::size_t> tau(r);
    std::vector<bool> used(r, false);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == r) {
            double v = cut_norm_exact(detail::permuted_difference(k1, k2, tau)).value;
            if (best.value < 0.0 || v < best.value ||
                (v == best.value && tau < best.permutation)) {
                best.value = v;
                best.permutation = tau;
            }
            return;
        }
        for (std::size_t j = 0; j < r; ++j) {
            if (used[j]) continue;
            if (std::abs(k1.measure.weights[i] - k2.measure.weights[j]) > 1e-12) continue;
            used[j] = true;
            tau[i] = j;
            self(self, i + 1);
            used[j] = false;
        }
    };
    rec(rec, 0);
    require(best.value >= 0.0, "no weight-compatible permutation exists");
    best.exact = true;
    return best;
}

// Heuristic upper bound: common refinement, marginal-sorted initial matching,
// then pairwise-swap descent scored by the heuristic cut norm.
inline CutDistanceResult cut_distance_heuristic(const StepKernel& k1in, const StepKernel& k2in,
                                                int restarts = 32, std::uint64_t seed = 0) {
    auto [k1, k2] = common_refinement(k1in, k2in);
    const std::size_t r = k1.classes();
    const std::uint64_t score_seed = derive_seed(seed, 0x5c0ULL);
    auto score = [&](const std::vector<std::size_t>& tau) {
        return cut_norm_heuristic(detail::permuted_difference(k1, k2, tau), restarts, score_seed)
            .value;
    };

    // Initial matching: within each equal-weight group, pair classes in
    // increasing order of marginal.
    std::vector<double> lam1 = marginal(k1), lam2 = marginal(k2);
    std::vector<std::size_t> idx1(r), idx2(r);
    for (std::size_t i = 0; i < r; ++i) idx1[i] = idx2[i] = i;
    auto key1 = [&](std::size_t a, std::size_t b) {
        if (k1.measure.weights[a] != k1.measure.weights[b])
            return k1.measure.weights[a] < k1.measure.weights[b];
        return lam1[a] < lam1[b];
    };
    auto key2 = [&](std::size_t a, std::size_t b) {
        if (k2.measure.weights[a] != k2.measure.weights[b])
            return k2.measure.weights[a] < k2.measure.weights[b];
        return lam2[a] < lam2[b];
    };
    std::sort(idx1.begin(), idx1.end(), key1);
    std::sort(idx2.begin(), idx2.end(), key2);
    std::vector<std::size_t> tau(r);
    for (std::size_t i = 0; i < r; ++i) tau[idx1[i]] = idx2[i];

    double cur = score(tau);
    for (int pass = 0; pass < 50; ++pass) {
        bool improved = false;
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = a + 1; b < r; ++b) {
                if (std::abs(k1.measure.weights[a] - k1.measure.weights[b]) > 1e-12) continue;
                std::swap(tau[a], tau[b]);
                double v = score(tau);
                if (v < cur - 1e-15) {
                    cur = v;
                    improved = true;
                } else {
                    std::swap(tau[a], tau[b]);
                }
            }
        if (!improved) break;
    }
    return CutDistanceResult{cur, tau, false};
}

} // namespace kdual
