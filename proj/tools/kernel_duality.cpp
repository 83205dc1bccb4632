// kernel-duality: command-line front end for the step-kernel duality toolkit.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kdual/branching.hpp"
#include "kdual/common.hpp"
#include "kdual/cut_norm.hpp"
#include "kdual/duality.hpp"
#include "kdual/experiments.hpp"
#include "kdual/graph_sampler.hpp"
#include "kdual/kernel_io.hpp"
#include "kdual/step_kernel.hpp"

namespace {

using kdual::ordered_json;

// Like the kernel loader but allowing signed values (cut-norm inputs are
// signed step functions, e.g. differences).
kdual::StepFunction load_function_spec(const std::string& path) {
    std::ifstream in(path);
    kdual::require(in.good(), "cannot open kernel spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    kdual::detail::SpecScanner sc(ss.str());
    sc.expect_key("weights");
    auto weights = sc.list();
    sc.expect_key("values");
    auto values = sc.nested_list();
    kdual::require(sc.done(), "kernel spec: trailing content");
    return kdual::StepFunction(std::move(values), kdual::WeightedMeasure(std::move(weights)));
}

void write_output(const ordered_json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    kdual::require(out.good(), "cannot write output file: " + path);
    out << j.dump(2) << "\n";
}

ordered_json cut_result_json(const kdual::CutNormResult& res) {
    return ordered_json{{"value", res.value},
                        {"exact", res.exact},
                        {"witness", ordered_json{{"f", res.f_signs}, {"g", res.g_signs}}}};
}

struct CommonOpts {
    std::string kernel_path;
    std::string out_path;
    std::string format = "json";
    std::vector<int> ns{20000};
    int reps = 20;
    std::uint64_t seed = 1;
    int k_max = 6;
    int threads = 1;
    double tol = 1e-12;
};

kdual::ExperimentConfig to_config(const CommonOpts& o) {
    kdual::ExperimentConfig cfg;
    cfg.ns = o.ns;
    cfg.reps = o.reps;
    cfg.seed = o.seed;
    cfg.k_max = o.k_max;
    cfg.threads = o.threads;
    cfg.tol = o.tol;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Step-kernel duality toolkit: cut norms, branching-process "
                 "solvers, dual kernels and random-graph experiments"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string kernel2_path, method = "auto", edges_out, f_csv = "1";
    long samples = 100000;
    int restarts = 32;
    double delta = 0.0;

    auto add_common = [&](CLI::App* sub, bool needs_kernel = true) {
        if (needs_kernel)
            sub->add_option("--kernel", o.kernel_path, "kernel spec file")->required();
        sub->add_option("--out", o.out_path, "output path (default stdout)");
        sub->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", o.seed, "RNG seed");
        sub->add_option("--threads", o.threads, "worker threads");
        sub->add_option("--tol", o.tol, "solver tolerance");
    };
    auto add_experiment = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--n", o.ns, "graph sizes");
        sub->add_option("--reps", o.reps, "repetitions per n");
        sub->add_option("--kmax", o.k_max, "largest component size tracked");
    };

    auto* rho = app.add_subcommand("rho", "survival probabilities of the branching process");
    add_common(rho);

    auto* rhok = app.add_subcommand("rhok", "probability of total progeny exactly k");
    add_common(rhok);
    rhok->add_option("--kmax", o.k_max, "largest k");
    rhok->add_option("--method", method, "tree|mc")->check(CLI::IsMember({"tree", "mc"}));
    rhok->add_option("--samples", samples, "Monte-Carlo samples per root");

    auto* dual = app.add_subcommand("dual", "dual measure and kernels");
    add_common(dual);

    auto* cutnorm = app.add_subcommand("cutnorm", "cut norm of a step function");
    add_common(cutnorm);
    cutnorm->add_option("--method", method, "exact|heuristic|auto");
    cutnorm->add_option("--restarts", restarts, "heuristic restarts");

    auto* cutdist = app.add_subcommand("cutdist", "cut distance between two kernels");
    add_common(cutdist);
    cutdist->add_option("--other", kernel2_path, "second kernel spec file")->required();
    cutdist->add_option("--method", method, "exact|heuristic|auto");
    cutdist->add_option("--restarts", restarts, "heuristic restarts");

    auto* samp = app.add_subcommand("sample", "sample G(A_n) and report graph statistics");
    add_common(samp);
    samp->add_option("--n", o.ns, "graph size");
    samp->add_option("--edges-out", edges_out, "write edge list (1-indexed 'u v' lines)");

    auto* giant = app.add_subcommand("giant", "giant component fractions vs theory");
    add_experiment(giant);

    auto* duality = app.add_subcommand("duality", "giant removal duality experiment");
    add_experiment(duality);

    auto* tlf = app.add_subcommand("tlf", "component sums of a per-class function");
    add_experiment(tlf);
    tlf->add_option("--f", f_csv, "per-class values, comma separated");

    auto* spectrum = app.add_subcommand("spectrum", "component size spectrum vs rho_k");
    add_experiment(spectrum);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rho->parsed()) {
            auto k = kdual::load_kernel_spec(o.kernel_path);
            auto sol = kdual::survival(k, o.tol);
            write_output(ordered_json{{"rho", sol.rho},
                                      {"rho_by_class", sol.rho_by_class},
                                      {"iterations", sol.iterations},
                                      {"residual", sol.residual},
                                      {"converged", sol.converged}},
                         o.out_path);
            return sol.converged ? 0 : 3;
        }
        if (rhok->parsed()) {
            auto k = kdual::load_kernel_spec(o.kernel_path);
            ordered_json out{{"k_max", o.k_max}, {"method", method == "mc" ? "mc" : "tree"}};
            if (method == "mc") {
                auto est = kdual::rho_k_mc(k, o.k_max, samples, o.seed);
                out["aggregate"] = est.aggregate;
                out["aggregate_stderr"] = est.aggregate_se;
                out["by_class"] = est.by_class;
                out["by_class_stderr"] = est.by_class_se;
                out["samples"] = est.samples;
            } else {
                std::vector<double> agg;
                std::vector<std::vector<double>> by_class;
                for (int q = 1; q <= o.k_max; ++q) {
                    auto t = kdual::rho_k_tree(k, q);
                    agg.push_back(t.aggregate);
                    by_class.push_back(t.by_class);
                }
                out["aggregate"] = agg;
                out["by_class"] = by_class;
            }
            write_output(out, o.out_path);
            return 0;
        }
        if (dual->parsed()) {
            auto k = kdual::load_kernel_spec(o.kernel_path);
            auto bundle = kdual::dualize(k, o.tol);
            write_output(ordered_json{{"rho", bundle.rho.rho},
                                      {"rho_by_class", bundle.rho.rho_by_class},
                                      {"mu_hat_weights", bundle.mu_hat.weights},
                                      {"mu_hat_norm_weights", bundle.mu_hat_norm.weights},
                                      {"kappa_tilde_values", bundle.kappa_tilde.values},
                                      {"dual_operator_norm",
                                       kdual::dual_subcritical_check(bundle)},
                                      {"converged", bundle.rho.converged}},
                         o.out_path);
            return bundle.rho.converged ? 0 : 3;
        }
        if (cutnorm->parsed()) {
            auto w = load_function_spec(o.kernel_path);
            bool exact = method == "exact" || (method == "auto" && w.classes() <= 24);
            auto res = exact ? kdual::cut_norm_exact(w)
                             : kdual::cut_norm_heuristic(w, restarts, o.seed);
            write_output(cut_result_json(res), o.out_path);
            return 0;
        }
        if (cutdist->parsed()) {
            auto k1 = kdual::load_kernel_spec(o.kernel_path);
            auto k2 = kdual::load_kernel_spec(kernel2_path);
            bool exact = method == "exact" || (method == "auto" && k1.classes() <= 8 &&
                                               k2.classes() <= 8);
            auto res = exact ? kdual::cut_distance_exact(k1, k2)
                             : kdual::cut_distance_heuristic(k1, k2, restarts, o.seed);
            write_output(ordered_json{{"value", res.value},
                                      {"exact", res.exact},
                                      {"witness", ordered_json{{"permutation", res.permutation}}}},
                         o.out_path);
            return 0;
        }
        if (samp->parsed()) {
            auto k = kdual::load_kernel_spec(o.kernel_path);
            const int n = o.ns.front();
            auto a = kdual::materialize(k, n);
            auto g = kdual::sample(a, o.seed, o.threads);
            auto d = kdual::components(g);
            if (!edges_out.empty()) {
                std::ofstream out(edges_out);
                kdual::require(out.good(), "cannot write edge list: " + edges_out);
                for (auto [u, v] : g.edges) out << (u + 1) << " " << (v + 1) << "\n";
            }
            ordered_json hist = ordered_json::array();
            for (auto [size, count] : d.size_histogram)
                hist.push_back(ordered_json{{"size", size}, {"count", count}});
            write_output(ordered_json{{"n", n},
                                      {"seed", o.seed},
                                      {"edges", g.edges.size()},
                                      {"components", d.sizes.size()},
                                      {"c1", d.sizes[0]},
                                      {"c2", d.sizes.size() > 1 ? d.sizes[1] : 0},
                                      {"size_histogram", hist}},
                         o.out_path);
            return 0;
        }

        auto k = kdual::load_kernel_spec(o.kernel_path);
        kdual::Report rep;
        if (giant->parsed()) {
            rep = kdual::run_giant_experiment(to_config(o), k);
        } else if (duality->parsed()) {
            rep = kdual::run_duality_experiment(to_config(o), k);
        } else if (tlf->parsed()) {
            std::vector<double> f;
            std::stringstream ss(f_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) f.push_back(std::stod(tok));
            rep = kdual::run_tlf_check(to_config(o), k, f);
        } else if (spectrum->parsed()) {
            rep = kdual::run_spectrum_compare(to_config(o), k);
        }
        kdual::emit(rep, o.format, o.out_path);
        return 0;
    } catch (const kdual::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
