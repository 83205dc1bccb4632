#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "kdual/common.hpp"
#include "kdual/measure.hpp"

namespace kdual {

using Matrix = std::vector<std::vector<double>>;

namespace detail {

inline void check_square(const Matrix& m, std::size_t r) {
    require(m.size() == r, "matrix dimension does not match class count");
    for (const auto& row : m)
        require(row.size() == r, "matrix must be square");
}

inline void check_symmetric(const Matrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(m[i][j] == m[j][i], "matrix must be symmetric");
}

} // namespace detail

// A signed symmetric step function over a finite-type measure.
struct StepFunction {
    Matrix values;
    WeightedMeasure measure;

    StepFunction(Matrix v, WeightedMeasure m) : values(std::move(v)), measure(std::move(m)) {
        detail::check_square(values, measure.classes());
        detail::check_symmetric(values);
    }

    std::size_t classes() const { return measure.classes(); }
};

// A step kernel: same as StepFunction with non-negative block values.
struct StepKernel {
    Matrix values;
    WeightedMeasure measure;

    StepKernel(Matrix v, WeightedMeasure m) : values(std::move(v)), measure(std::move(m)) {
        detail::check_square(values, measure.classes());
        detail::check_symmetric(values);
        for (const auto& row : values)
            for (double x : row)
                require(x >= 0.0 && std::isfinite(x), "kernel values must be finite and >= 0");
    }

    std::size_t classes() const { return measure.classes(); }

    StepFunction as_function() const { return StepFunction(values, measure); }

    static StepKernel constant(double c, std::size_t r = 1) {
        return StepKernel(Matrix(r, std::vector<double>(r, c)), WeightedMeasure::uniform(r));
    }
};

// Asymmetric variant produced by exponential damping with a != b.
struct DirectedStepFunction {
    Matrix values; // not necessarily symmetric
    WeightedMeasure measure;

    DirectedStepFunction(Matrix v, WeightedMeasure m)
        : values(std::move(v)), measure(std::move(m)) {
        detail::check_square(values, measure.classes());
    }

    std::size_t classes() const { return measure.classes(); }
};

// kernel of a symmetric non-negative matrix: uniform classes 1/n, block values a_ij.
inline StepKernel from_matrix(const Matrix& a) {
    require(!a.empty(), "empty matrix");
    detail::check_square(a, a.size());
    detail::check_symmetric(a);
    for (const auto& row : a)
        for (double x : row)
            require(x >= 0.0 && std::isfinite(x), "matrix entries must be finite and >= 0");
    return StepKernel(a, WeightedMeasure::uniform(a.size()));
}

// lambda_W(i) = sum_j W[i][j] w_j
template <typename Step>
std::vector<double> marginal(const Step& w) {
    const std::size_t r = w.classes();
    std::vector<double> lam(r, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            lam[i] += w.values[i][j] * w.measure.weights[j];
    return lam;
}

// Row marginal of a directed step function (with respect to the second variable).
inline std::vector<double> row_marginal(const DirectedStepFunction& w) {
    const std::size_t r = w.classes();
    std::vector<double> lam(r, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            lam[i] += w.values[i][j] * w.measure.weights[j];
    return lam;
}

// (T_k f)(i) = sum_j k[i][j] f(j) w_j
inline std::vector<double> apply_operator(const StepKernel& k, const std::vector<double>& f) {
    const std::size_t r = k.classes();
    require(f.size() == r, "vector length does not match class count");
    std::vector<double> out(r, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            out[i] += k.values[i][j] * f[j] * k.measure.weights[j];
    return out;
}

// Full integral of a step function: sum_ij w_i w_j W[i][j].
template <typename Step>
double integral(const Step& w) {
    const std::size_t r = w.classes();
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            s += w.measure.weights[i] * w.measure.weights[j] * w.values[i][j];
    return s;
}

// ||T_k||: largest singular value of the weighted matrix, by power iteration
// on the symmetrized form S = D^{1/2} V D^{1/2}. Exact for step kernels.
inline double operator_norm(const StepKernel& k, double tol = 1e-10,
                            long max_iter = 1000000) {
    require(tol > 0.0, "tolerance must be positive");
    const std::size_t r = k.classes();
    std::vector<double> sq(r);
    for (std::size_t i = 0; i < r; ++i) sq[i] = std::sqrt(k.measure.weights[i]);
    Matrix s(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            s[i][j] = sq[i] * k.values[i][j] * sq[j];

    // Start near all-ones with a tiny index tilt so no eigenspace is missed.
    std::vector<double> x(r), y(r);
    for (std::size_t i = 0; i < r; ++i) x[i] = 1.0 + 1e-9 * static_cast<double>(i);
    double est = 0.0;
    for (long it = 0; it < max_iter; ++it) {
        double nx = 0.0;
        for (double v : x) nx += v * v;
        nx = std::sqrt(nx);
        if (nx == 0.0) return 0.0;
        for (auto& v : x) v /= nx;
        double ny = 0.0;
        for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < r; ++j) acc += s[i][j] * x[j];
            y[i] = acc;
            ny += acc * acc;
        }
        ny = std::sqrt(ny);
        if (ny == 0.0) return 0.0;
        if (std::abs(ny - est) < tol) return ny;
        est = ny;
        x = y;
    }
    return est; // last bracket; matrices here are tiny, this is not reached in practice
}

// Connectivity of the support graph on positive-weight classes.
inline bool is_irreducible(const StepKernel& k) {
    const std::size_t r = k.classes();
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < r; ++i)
        if (k.measure.weights[i] > 0.0) live.push_back(i);
    if (live.size() <= 1) return true;
    std::vector<bool> seen(r, false);
    std::vector<std::size_t> stack{live[0]};
    seen[live[0]] = true;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j : live)
            if (!seen[j] && k.values[i][j] > 0.0) {
                seen[j] = true;
                stack.push_back(j);
            }
    }
    return std::all_of(live.begin(), live.end(), [&](std::size_t j) { return seen[j]; });
}

// Same block values on the measure d nu = h d mu.
inline StepKernel reweight(const StepKernel& k, const std::vector<double>& h) {
    const std::size_t r = k.classes();
    require(h.size() == r, "reweight vector length mismatch");
    std::vector<double> w(r);
    double total = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        require(h[i] >= 0.0, "reweight factors must be >= 0");
        w[i] = k.measure.weights[i] * h[i];
        total += w[i];
    }
    require(total > 0.0, "reweighting produced a zero measure");
    return StepKernel(k.values, WeightedMeasure(std::move(w)));
}

// m_delta(k): integral of the marginal over the heaviest set of measure delta.
// Classes are filled greedily by descending marginal; the boundary class is
// split fractionally, which is exact since the marginal is class-constant.
inline double tail_marginal(const StepKernel& k, double delta) {
    require(delta >= 0.0 && delta <= k.measure.total + 1e-12, "delta out of [0, total mass]");
    const std::size_t r = k.classes();
    std::vector<double> lam = marginal(k);
    std::vector<std::size_t> order(r);
    for (std::size_t i = 0; i < r; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lam[a] > lam[b]; });
    double left = delta, acc = 0.0;
    for (std::size_t i : order) {
        if (left <= 0.0) break;
        double take = std::min(left, k.measure.weights[i]);
        acc += take * lam[i];
        left -= take;
    }
    return acc;
}

// W^{(a,b)}(x,y) = e^{-a lambda(x)} W(x,y) e^{-b lambda(y)}; asymmetric when a != b.
inline DirectedStepFunction exponent_damped(const StepKernel& w, double a, double b) {
    require(a >= 0.0 && b >= 0.0, "damping exponents must be >= 0");
    const std::size_t r = w.classes();
    std::vector<double> lam = marginal(w);
    Matrix v(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            v[i][j] = std::exp(-a * lam[i]) * w.values[i][j] * std::exp(-b * lam[j]);
    return DirectedStepFunction(std::move(v), w.measure);
}

// Re-express both kernels over the shared order-preserving refinement of their
// implied [0, total] class layouts, so entrywise differences are defined.
inline std::pair<StepKernel, StepKernel> common_refinement(const StepKernel& k1,
                                                           const StepKernel& k2) {
    require(std::abs(k1.measure.total - k2.measure.total) <= 1e-9,
            "total mass mismatch in common refinement");
    // Merge the two breakpoint sequences.
    std::vector<double> shared;
    std::vector<std::size_t> par1, par2; // parent class per refined class
    std::size_t i = 0, j = 0;
    double rem1 = k1.measure.weights[0], rem2 = k2.measure.weights[0];
    const std::size_t r1 = k1.classes(), r2 = k2.classes();
    while (i < r1 && j < r2) {
        double take = std::min(rem1, rem2);
        if (take > 0.0) {
            shared.push_back(take);
            par1.push_back(i);
            par2.push_back(j);
        }
        rem1 -= take;
        rem2 -= take;
        if (rem1 <= 1e-15) {
            ++i;
            if (i < r1) rem1 = k1.measure.weights[i];
        }
        if (rem2 <= 1e-15) {
            ++j;
            if (j < r2) rem2 = k2.measure.weights[j];
        }
    }
    require(!shared.empty(), "refinement produced no classes");
    const std::size_t r = shared.size();
    Matrix v1(r, std::vector<double>(r)), v2(r, std::vector<double>(r));
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
            v1[a][b] = k1.values[par1[a]][par1[b]];
            v2[a][b] = k2.values[par2[a]][par2[b]];
        }
    WeightedMeasure m(shared);
    return {StepKernel(std::move(v1), m), StepKernel(std::move(v2), m)};
}

// Entrywise difference of two kernels on the same measure.
inline StepFunction difference(const StepKernel& k1, const StepKernel& k2) {
    require(k1.classes() == k2.classes(), "difference needs matching class counts");
    const std::size_t r = k1.classes();
    Matrix v(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            v[i][j] = k1.values[i][j] - k2.values[i][j];
    return StepFunction(std::move(v), k1.measure);
}

} // namespace kdual
