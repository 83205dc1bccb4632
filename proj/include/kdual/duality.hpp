#pragma once

#include <cmath>
#include <vector>

#include "kdual/branching.hpp"
#include "kdual/common.hpp"
#include "kdual/step_kernel.hpp"

namespace kdual {

// The dual objects attached to a kernel: survivor measure mu_hat with
// weights w_i (1 - rho_i), its normalization, and the three dual kernels.
struct DualBundle {
    SurvivalSolution rho;
    WeightedMeasure mu_hat;       // total 1 - rho(k)
    WeightedMeasure mu_hat_norm;  // mu_hat / (1 - rho(k)), a probability measure
    StepKernel kappa_hat;         // values of k on mu_hat
    StepKernel kappa_hathat;      // values of k on mu_hat_norm
    StepKernel kappa_tilde;       // values (1 - rho(k)) k on mu_hat_norm
};

inline DualBundle dualize(const StepKernel& k, double tol = 1e-12) {
    require(k.measure.is_probability(), "dualize needs a probability measure");
    SurvivalSolution sol = survival(k, tol);
    const double survivor_mass = 1.0 - sol.rho;
    require(survivor_mass > 1e-14, "rho(k) = 1: dual normalization is degenerate");

    const std::size_t r = k.classes();
    std::vector<double> hat_w(r), hat_norm_w(r);
    for (std::size_t i = 0; i < r; ++i) {
        hat_w[i] = k.measure.weights[i] * (1.0 - sol.rho_by_class[i]);
        hat_norm_w[i] = hat_w[i] / survivor_mass;
    }
    Matrix tilde(r, std::vector<double>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            tilde[i][j] = survivor_mass * k.values[i][j];

    WeightedMeasure mu_hat{hat_w};
    WeightedMeasure mu_hat_norm{hat_norm_w};
    return DualBundle{std::move(sol),
                      mu_hat,
                      mu_hat_norm,
                      StepKernel(k.values, mu_hat),
                      StepKernel(k.values, mu_hat_norm),
                      StepKernel(std::move(tilde), mu_hat_norm)};
}

// ||T_{kappa_tilde}||; strictly < 1 for bounded supercritical kernels.
inline double dual_subcritical_check(const DualBundle& bundle, double tol = 1e-10) {
    return operator_norm(bundle.kappa_tilde, tol);
}

// Limiting edges-per-vertex of the giant:
// zeta(k) = 1/2 sum_ij w_i w_j k[i][j] (rho_i + rho_j - rho_i rho_j).
inline double zeta(const StepKernel& k, const SurvivalSolution& sol) {
    const std::size_t r = k.classes();
    require(sol.rho_by_class.size() == r, "survival solution dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            double ri = sol.rho_by_class[i], rj = sol.rho_by_class[j];
            s += k.measure.weights[i] * k.measure.weights[j] * k.values[i][j] *
                 (ri + rj - ri * rj);
        }
    return 0.5 * s;
}

// Classical conjugate-parameter identity for G(n, lambda/n):
// with lambda_tilde = lambda (1 - rho), |lt e^{-lt} - lambda e^{-lambda}|.
inline double er_duality_residual(double lambda, double tol = 1e-13) {
    require(lambda > 1.0, "conjugacy check needs a supercritical lambda");
    SurvivalSolution sol = survival(StepKernel::constant(lambda), tol);
    const double lt = lambda * (1.0 - sol.rho);
    return std::abs(lt * std::exp(-lt) - lambda * std::exp(-lambda));
}

} // namespace kdual
