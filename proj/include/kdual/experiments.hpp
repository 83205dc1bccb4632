#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdual/branching.hpp"
#include "kdual/common.hpp"
#include "kdual/cut_norm.hpp"
#include "kdual/duality.hpp"
#include "kdual/graph_sampler.hpp"
#include "kdual/step_kernel.hpp"

namespace kdual {

using ordered_json = nlohmann::ordered_json;

struct ExperimentConfig {
    std::vector<int> ns{20000};
    int reps = 20;
    std::uint64_t seed = 1;
    int k_max = 6;
    double tol = 1e-12;
    int threads = 1;

    void validate() const {
        require(reps >= 1, "repetitions must be >= 1");
        for (int n : ns) require(n >= 10, "n must be >= 10");
        require(tol > 0.0, "tolerances must be positive");
        require(k_max >= 1, "k_max must be >= 1");
    }
};

struct StatSummary {
    double mean = 0.0;
    double stderr_ = 0.0;
    int reps = 0;
    std::vector<double> values;

    static StatSummary of(std::vector<double> vals) {
        StatSummary s;
        s.reps = static_cast<int>(vals.size());
        s.values = std::move(vals);
        for (double v : s.values) s.mean += v;
        s.mean /= s.reps;
        if (s.reps > 1) {
            double ss = 0.0;
            for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
            s.stderr_ = std::sqrt(ss / (s.reps - 1)) / std::sqrt(static_cast<double>(s.reps));
        }
        return s;
    }

    ordered_json to_json() const {
        return ordered_json{{"mean", mean}, {"stderr", stderr_}, {"reps", reps},
                            {"values", values}};
    }
};

// A report: a JSON summary plus a flat CSV table for plotting.
struct Report {
    ordered_json summary;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_rows;
};

inline void emit(const Report& report, const std::string& format, const std::string& path) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!path.empty() && path != "-") {
        file.open(path);
        require(file.good(), "cannot write output file: " + path);
        os = &file;
    }
    if (format == "json") {
        *os << report.summary.dump(2) << "\n";
    } else if (format == "csv") {
        for (std::size_t i = 0; i < report.csv_header.size(); ++i)
            *os << (i ? "," : "") << report.csv_header[i];
        *os << "\n";
        char buf[40];
        for (const auto& row : report.csv_rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
                *os << (i ? "," : "") << buf;
            }
            *os << "\n";
        }
    } else {
        throw validation_error("unknown output format: " + format);
    }
    if (os == &file) require(file.good(), "write failed: " + path);
}

namespace detail {

// Fraction of vertices lying in components of exactly k vertices, k = 1..k_max.
inline std::vector<double> vertex_size_spectrum(const ComponentDecomposition& d, int n,
                                                int k_max) {
    std::vector<double> frac(k_max, 0.0);
    if (n == 0) return frac;
    for (auto [size, count] : d.size_histogram)
        if (size <= k_max) frac[size - 1] += static_cast<double>(size * count);
    for (auto& f : frac) f /= static_cast<double>(n);
    return frac;
}

} // namespace detail

// Giant-component limits: |C1|/n vs rho(k), e(C1)/n vs zeta(k), |C2|/n small.
inline Report run_giant_experiment(const ExperimentConfig& cfg, const StepKernel& k) {
    cfg.validate();
    require(is_irreducible(k), "kernel is reducible; giant-component limits need irreducibility");
    SurvivalSolution sol = survival(k, cfg.tol);
    const double z = zeta(k, sol);

    Report rep;
    rep.csv_header = {"n", "seed", "c1_frac", "c2_frac", "edges_c1_per_n"};
    rep.summary["kernel_classes"] = k.classes();
    rep.summary["rho_theory"] = sol.rho;
    rep.summary["zeta_theory"] = z;
    ordered_json per_n = ordered_json::array();
    for (int n : cfg.ns) {
        std::vector<double> c1, c2, ec1;
        for (int repi = 0; repi < cfg.reps; ++repi) {
            std::uint64_t s = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 20) + repi);
            auto a = materialize(k, n);
            auto g = sample(a, s, cfg.threads);
            auto d = components(g);
            c1.push_back(static_cast<double>(d.sizes[0]) / n);
            c2.push_back(d.sizes.size() > 1 ? static_cast<double>(d.sizes[1]) / n : 0.0);
            ec1.push_back(static_cast<double>(d.edges_in[0]) / n);
            rep.csv_rows.push_back({static_cast<double>(n), static_cast<double>(repi),
                                    c1.back(), c2.back(), ec1.back()});
        }
        per_n.push_back(ordered_json{{"n", n},
                                     {"c1_frac", StatSummary::of(c1).to_json()},
                                     {"c2_frac", StatSummary::of(c2).to_json()},
                                     {"edges_c1_per_n", StatSummary::of(ec1).to_json()}});
    }
    rep.summary["runs"] = per_n;
    return rep;
}

// Duality: m/n vs 1-rho, census vs mu_hat, small-component spectrum of the
// stripped graph vs rho_k(kappa_tilde) and vs fresh G(B_n) samples, plus the
// census-implied cut-distance bound to kappa_hathat.
inline Report run_duality_experiment(const ExperimentConfig& cfg, const StepKernel& k) {
    cfg.validate();
    require(is_irreducible(k), "kernel is reducible");
    DualBundle bundle = dualize(k, cfg.tol);
    require(bundle.rho.rho > 0.0 && operator_norm(k) > 1.0,
            "duality experiment needs a supercritical kernel");
    const std::size_t r = k.classes();

    std::vector<double> rho_k_dual(cfg.k_max);
    for (int q = 1; q <= cfg.k_max; ++q)
        rho_k_dual[q - 1] = rho_k_tree(bundle.kappa_tilde, q).aggregate;

    Report rep;
    rep.csv_header = {"n", "seed", "m_over_n", "cutdist_bound"};
    for (std::size_t i = 0; i < r; ++i) rep.csv_header.push_back("nu_" + std::to_string(i + 1));
    for (int q = 1; q <= cfg.k_max; ++q)
        rep.csv_header.push_back("stripped_frac_k" + std::to_string(q));
    for (int q = 1; q <= cfg.k_max; ++q)
        rep.csv_header.push_back("dualsample_frac_k" + std::to_string(q));

    rep.summary["rho_theory"] = bundle.rho.rho;
    rep.summary["m_over_n_theory"] = 1.0 - bundle.rho.rho;
    rep.summary["mu_hat_theory"] = bundle.mu_hat.weights;
    rep.summary["rho_k_dual_theory"] = rho_k_dual;
    rep.summary["dual_operator_norm"] = dual_subcritical_check(bundle);

    ordered_json per_n = ordered_json::array();
    for (int n : cfg.ns) {
        std::vector<double> mn, bound;
        std::vector<std::vector<double>> nu(r), strip(cfg.k_max), fresh(cfg.k_max);
        for (int repi = 0; repi < cfg.reps; ++repi) {
            std::uint64_t s = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 20) + repi);
            auto a = materialize(k, n);
            auto g = sample(a, s, cfg.threads);
            auto d = components(g);
            auto removal = remove_giant(g, a, d);
            const int m = removal.subgraph.n;
            mn.push_back(static_cast<double>(m) / n);
            auto census = type_census(d, a, true);
            for (std::size_t i = 0; i < r; ++i) nu[i].push_back(census[i]);

            auto sd = components(removal.subgraph);
            auto sfrac = detail::vertex_size_spectrum(sd, m, cfg.k_max);
            for (int q = 0; q < cfg.k_max; ++q) strip[q].push_back(sfrac[q]);

            auto b = dual_matrix(removal.sub_matrix, m, n);
            auto gb = sample(b, derive_seed(s, 0xb00ULL), cfg.threads);
            auto bd = components(gb);
            auto bfrac = detail::vertex_size_spectrum(bd, m, cfg.k_max);
            for (int q = 0; q < cfg.k_max; ++q) fresh[q].push_back(bfrac[q]);

            // Census-weighted step kernel of the stripped matrix vs kappa_hathat:
            // identity-aligned exact cut norm after a common refinement.
            double db = 0.0;
            double census_total = static_cast<double>(m) / n;
            if (census_total > 0.0) {
                std::vector<double> w(r);
                bool ok = true;
                for (std::size_t i = 0; i < r; ++i) {
                    w[i] = census[i] / census_total;
                    if (w[i] <= 0.0) ok = false;
                }
                if (ok) {
                    StepKernel observed(k.values, WeightedMeasure(w));
                    auto [x, y] = common_refinement(observed, bundle.kappa_hathat);
                    db = cut_norm_exact(difference(x, y)).value;
                }
            }
            bound.push_back(db);

            std::vector<double> row{static_cast<double>(n), static_cast<double>(repi),
                                    mn.back(), db};
            for (std::size_t i = 0; i < r; ++i) row.push_back(census[i]);
            for (int q = 0; q < cfg.k_max; ++q) row.push_back(sfrac[q]);
            for (int q = 0; q < cfg.k_max; ++q) row.push_back(bfrac[q]);
            rep.csv_rows.push_back(std::move(row));
        }
        ordered_json entry{{"n", n},
                           {"m_over_n", StatSummary::of(mn).to_json()},
                           {"cutdist_bound", StatSummary::of(bound).to_json()}};
        ordered_json nuj = ordered_json::array(), sj = ordered_json::array(),
                     fj = ordered_json::array();
        for (std::size_t i = 0; i < r; ++i) nuj.push_back(StatSummary::of(nu[i]).to_json());
        for (int q = 0; q < cfg.k_max; ++q) {
            sj.push_back(StatSummary::of(strip[q]).to_json());
            fj.push_back(StatSummary::of(fresh[q]).to_json());
        }
        entry["type_census"] = nuj;
        entry["stripped_spectrum"] = sj;
        entry["dual_sample_spectrum"] = fj;
        per_n.push_back(std::move(entry));
    }
    rep.summary["runs"] = per_n;
    return rep;
}

// Component sums of a bounded per-class f over the giant and its complement,
// against the solver limits.
inline Report run_tlf_check(const ExperimentConfig& cfg, const StepKernel& k,
                            const std::vector<double>& f) {
    cfg.validate();
    require(is_irreducible(k), "kernel is reducible");
    require(f.size() == k.classes(), "per-class vector length mismatch");
    SurvivalSolution sol = survival(k, cfg.tol);
    double giant_theory = 0.0, rest_theory = 0.0;
    for (std::size_t i = 0; i < k.classes(); ++i) {
        giant_theory += k.measure.weights[i] * f[i] * sol.rho_by_class[i];
        rest_theory += k.measure.weights[i] * f[i] * (1.0 - sol.rho_by_class[i]);
    }

    Report rep;
    rep.csv_header = {"n", "seed", "giant_sum", "rest_sum"};
    rep.summary["giant_sum_theory"] = giant_theory;
    rep.summary["rest_sum_theory"] = rest_theory;
    ordered_json per_n = ordered_json::array();
    for (int n : cfg.ns) {
        std::vector<double> gs, rs;
        for (int repi = 0; repi < cfg.reps; ++repi) {
            std::uint64_t s = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 20) + repi);
            auto a = materialize(k, n);
            auto g = sample(a, s, cfg.threads);
            auto d = components(g);
            gs.push_back(component_sum(d, a, f, SumOver::Giant));
            rs.push_back(component_sum(d, a, f, SumOver::NonGiant));
            rep.csv_rows.push_back({static_cast<double>(n), static_cast<double>(repi),
                                    gs.back(), rs.back()});
        }
        per_n.push_back(ordered_json{{"n", n},
                                     {"giant_sum", StatSummary::of(gs).to_json()},
                                     {"rest_sum", StatSummary::of(rs).to_json()}});
    }
    rep.summary["runs"] = per_n;
    return rep;
}

// Vertex fractions in size-k components vs rho_k from the tree-sum solver.
inline Report run_spectrum_compare(const ExperimentConfig& cfg, const StepKernel& k) {
    cfg.validate();
    std::vector<double> theory(cfg.k_max);
    for (int q = 1; q <= cfg.k_max; ++q) theory[q - 1] = rho_k_tree(k, q).aggregate;

    Report rep;
    rep.csv_header = {"n", "seed"};
    for (int q = 1; q <= cfg.k_max; ++q) rep.csv_header.push_back("frac_k" + std::to_string(q));
    rep.summary["rho_k_theory"] = theory;
    ordered_json per_n = ordered_json::array();
    for (int n : cfg.ns) {
        std::vector<std::vector<double>> frac(cfg.k_max);
        for (int repi = 0; repi < cfg.reps; ++repi) {
            std::uint64_t s = derive_seed(cfg.seed, (static_cast<std::uint64_t>(n) << 20) + repi);
            auto a = materialize(k, n);
            auto g = sample(a, s, cfg.threads);
            auto d = components(g);
            auto vf = detail::vertex_size_spectrum(d, n, cfg.k_max);
            std::vector<double> row{static_cast<double>(n), static_cast<double>(repi)};
            for (int q = 0; q < cfg.k_max; ++q) {
                frac[q].push_back(vf[q]);
                row.push_back(vf[q]);
            }
            rep.csv_rows.push_back(std::move(row));
        }
        double chi2 = 0.0;
        ordered_json fr = ordered_json::array();
        for (int q = 0; q < cfg.k_max; ++q) {
            auto st = StatSummary::of(frac[q]);
            fr.push_back(st.to_json());
            chi2 += (st.mean - theory[q]) * (st.mean - theory[q]) / std::max(theory[q], 1e-12);
        }
        per_n.push_back(ordered_json{{"n", n}, {"fractions", fr}, {"chi2_distance", chi2}});
    }
    rep.summary["runs"] = per_n;
    return rep;
}

} // namespace kdual
