#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "kdual/measure.hpp"
#include "kdual/step_kernel.hpp"

namespace testutil {

using kdual::Matrix;

inline kdual::WeightedMeasure random_probability_measure(std::mt19937_64& rng, std::size_t r) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> w(r);
    double total = 0.0;
    for (auto& x : w) total += (x = u(rng));
    for (auto& x : w) x /= total;
    return kdual::WeightedMeasure(w);
}

inline kdual::StepKernel random_kernel(std::mt19937_64& rng, std::size_t r, double max_value,
                                       bool uniform_weights = false) {
    std::uniform_real_distribution<double> u(0.0, max_value);
    Matrix v(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j <= i; ++j) v[i][j] = v[j][i] = u(rng);
    auto m = uniform_weights ? kdual::WeightedMeasure::uniform(r)
                             : random_probability_measure(rng, r);
    return kdual::StepKernel(std::move(v), std::move(m));
}

inline kdual::StepFunction random_signed_function(std::mt19937_64& rng, std::size_t r,
                                                  double max_abs = 1.0) {
    std::uniform_real_distribution<double> u(-max_abs, max_abs);
    Matrix v(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j <= i; ++j) v[i][j] = v[j][i] = u(rng);
    return kdual::StepFunction(std::move(v), random_probability_measure(rng, r));
}

// Jacobi eigenvalue sweep for small symmetric matrices; independent oracle
// for the power-iteration operator norm.
inline std::vector<double> jacobi_eigenvalues(Matrix a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
    return eig;
}

// Largest singular value of the weighted operator, via the Jacobi oracle.
inline double operator_norm_oracle(const kdual::StepKernel& k) {
    const std::size_t r = k.classes();
    Matrix s(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            s[i][j] = std::sqrt(k.measure.weights[i]) * k.values[i][j] *
                      std::sqrt(k.measure.weights[j]);
    double best = 0.0;
    for (double e : jacobi_eigenvalues(s)) best = std::max(best, std::abs(e));
    return best;
}

// Scalar bisection oracle for rho = 1 - exp(-lambda rho), lambda > 1.
inline double scalar_survival_oracle(double lambda) {
    double lo = 1e-14, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid - (1.0 - std::exp(-lambda * mid)) < 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Borel total-progeny law: P(progeny = k) = (ck)^{k-1} e^{-ck} / k!.
inline double borel_pmf(double c, int k) {
    double logf = 0.0;
    for (int i = 2; i <= k; ++i) logf += std::log(static_cast<double>(i));
    return std::exp((k - 1) * std::log(c * k) - c * k - logf);
}

} // namespace testutil
