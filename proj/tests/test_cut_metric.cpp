#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "kdual/cut_norm.hpp"
#include "kdual/step_kernel.hpp"

#include "helpers.hpp"

using namespace kdual;
using Catch::Approx;

namespace {

double witness_value(const StepFunction& w, const std::vector<int>& f,
                     const std::vector<int>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.classes(); ++i)
        for (std::size_t j = 0; j < w.classes(); ++j)
            s += f[i] * w.values[i][j] * g[j] * w.measure.weights[i] * w.measure.weights[j];
    return std::abs(s);
}

StepFunction checkerboard() {
    return StepFunction({{1.0, -1.0}, {-1.0, 1.0}}, WeightedMeasure::uniform(2));
}

double l1_norm(const StepFunction& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.classes(); ++i)
        for (std::size_t j = 0; j < w.classes(); ++j)
            s += std::abs(w.values[i][j]) * w.measure.weights[i] * w.measure.weights[j];
    return s;
}

} // namespace

TEST_CASE("cut_norm_exact worked examples") {
    auto zero = cut_norm_exact(StepFunction({{0.0}}, WeightedMeasure::uniform(1)));
    CHECK(zero.value == 0.0);
    CHECK(zero.exact);

    auto constant = cut_norm_exact(
        StepFunction({{0.7, 0.7}, {0.7, 0.7}}, WeightedMeasure::uniform(2)));
    CHECK(constant.value == Approx(0.7).margin(1e-12));
    CHECK(constant.f_signs == std::vector<int>{1, 1});
    CHECK(constant.g_signs == std::vector<int>{1, 1});

    auto cb = cut_norm_exact(checkerboard());
    CHECK(cb.value == Approx(1.0).margin(1e-12));
    CHECK(cb.f_signs == cb.g_signs);
    CHECK(cb.f_signs[0] != cb.f_signs[1]);
}

TEST_CASE("cut norm result is reproducible from its witness") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto w = testutil::random_signed_function(rng, 2 + trial % 5);
        auto res = cut_norm_exact(w);
        CHECK(res.value == Approx(witness_value(w, res.f_signs, res.g_signs)).margin(1e-12));
        auto h = cut_norm_heuristic(w, 8, trial);
        CHECK(h.value == Approx(witness_value(w, h.f_signs, h.g_signs)).margin(1e-12));
    }
}

TEST_CASE("cut_norm_exact refuses oversized instances") {
    std::mt19937_64 rng(1);
    auto big = testutil::random_signed_function(rng, 25);
    CHECK_THROWS_AS(cut_norm_exact(big), validation_error);
}

TEST_CASE("cut_norm_heuristic worked examples") {
    auto zero = cut_norm_heuristic(StepFunction({{0.0}}, WeightedMeasure::uniform(1)), 1, 0);
    CHECK(zero.value == 0.0);
    CHECK_FALSE(zero.exact);

    auto constant = cut_norm_heuristic(
        StepFunction({{0.7, 0.7}, {0.7, 0.7}}, WeightedMeasure::uniform(2)), 1, 0);
    CHECK(constant.value == Approx(0.7).margin(1e-12));

    auto cb = cut_norm_heuristic(checkerboard(), 4, 0);
    CHECK(cb.value == Approx(1.0).margin(1e-12));

    CHECK_THROWS_AS(cut_norm_heuristic(checkerboard(), 0, 0), validation_error);
}

TEST_CASE("heuristic never exceeds the exact cut norm") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto w = testutil::random_signed_function(rng, 2 + trial % 7);
        double exact = cut_norm_exact(w).value;
        double heur = cut_norm_heuristic(w, 16, trial).value;
        CHECK(heur <= exact + 1e-12);
    }
}

TEST_CASE("heuristic is deterministic for a fixed seed") {
    std::mt19937_64 rng(9);
    auto w = testutil::random_signed_function(rng, 6);
    auto a = cut_norm_heuristic(w, 16, 42);
    auto b = cut_norm_heuristic(w, 16, 42);
    CHECK(a.value == b.value);
    CHECK(a.f_signs == b.f_signs);
    CHECK(a.g_signs == b.g_signs);
}

TEST_CASE("cut_norm_01 worked examples") {
    CHECK(cut_norm_01(StepFunction({{0.0}}, WeightedMeasure::uniform(1))) == 0.0);
    CHECK(cut_norm_01(StepFunction({{0.7, 0.7}, {0.7, 0.7}}, WeightedMeasure::uniform(2))) ==
          Approx(0.7).margin(1e-12));
    CHECK(cut_norm_01(checkerboard()) == Approx(0.25).margin(1e-12));
}

TEST_CASE("factor-4 sandwich between 0/1 and signed cut norms") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        auto w = testutil::random_signed_function(rng, 2 + trial % 5);
        double signed_norm = cut_norm_exact(w).value;
        double zo = cut_norm_01(w);
        CHECK(zo <= signed_norm + 1e-12);
        CHECK(signed_norm <= 4.0 * zo + 1e-12);
    }
}

TEST_CASE("norm axioms on a fixed measure") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t r = 2 + trial % 5;
        auto m = testutil::random_probability_measure(rng, r);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Matrix v1(r, std::vector<double>(r)), v2(r, std::vector<double>(r));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                v1[i][j] = v1[j][i] = u(rng);
                v2[i][j] = v2[j][i] = u(rng);
            }
        StepFunction w1(v1, m), w2(v2, m);
        Matrix vneg(r, std::vector<double>(r)), vsum(r, std::vector<double>(r));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                vneg[i][j] = -v1[i][j];
                vsum[i][j] = v1[i][j] + v2[i][j];
            }
        double n1 = cut_norm_exact(w1).value;
        CHECK(n1 >= 0.0);
        CHECK(cut_norm_exact(StepFunction(vneg, m)).value == Approx(n1).margin(1e-12));
        CHECK(cut_norm_exact(StepFunction(vsum, m)).value <=
              n1 + cut_norm_exact(w2).value + 1e-12);
        CHECK(n1 <= l1_norm(w1) + 1e-12);
    }
}

TEST_CASE("cut_distance_exact worked examples") {
    std::mt19937_64 rng(19);
    auto k = testutil::random_kernel(rng, 3, 2.0, true);
    auto self = cut_distance_exact(k, k);
    CHECK(self.value == Approx(0.0).margin(1e-12));
    CHECK(self.permutation == std::vector<std::size_t>{0, 1, 2});
    CHECK(self.exact);

    // class-permuted copy is at distance zero
    Matrix pv(3, std::vector<double>(3));
    std::vector<std::size_t> perm{2, 0, 1};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) pv[i][j] = k.values[perm[i]][perm[j]];
    StepKernel pk(pv, k.measure);
    CHECK(cut_distance_exact(k, pk).value == Approx(0.0).margin(1e-12));

    StepKernel d1({{2.0, 0.0}, {0.0, 2.0}}, WeightedMeasure::uniform(2));
    StepKernel d2({{0.0, 2.0}, {2.0, 0.0}}, WeightedMeasure::uniform(2));
    CHECK(cut_distance_exact(d1, d2).value == Approx(2.0).margin(1e-12));
}

TEST_CASE("cut_distance_exact rejects incompatible inputs") {
    StepKernel a({{1.0}}, WeightedMeasure({1.0}));
    StepKernel b({{1.0, 0.0}, {0.0, 1.0}}, WeightedMeasure::uniform(2));
    CHECK_THROWS_AS(cut_distance_exact(a, b), validation_error);

    StepKernel c({{1.0, 0.0}, {0.0, 1.0}},
                 WeightedMeasure(std::vector<double>{0.3, 0.7}));
    CHECK_THROWS_AS(cut_distance_exact(b, c), validation_error);

    std::mt19937_64 rng(1);
    auto big1 = testutil::random_kernel(rng, 9, 1.0, true);
    auto big2 = testutil::random_kernel(rng, 9, 1.0, true);
    CHECK_THROWS_AS(cut_distance_exact(big1, big2), validation_error);
}

TEST_CASE("cut_distance_heuristic worked examples") {
    std::mt19937_64 rng(29);
    auto k = testutil::random_kernel(rng, 3, 2.0, true);
    CHECK(cut_distance_heuristic(k, k).value == Approx(0.0).margin(1e-12));

    StepKernel d1({{2.0, 0.0}, {0.0, 2.0}}, WeightedMeasure::uniform(2));
    StepKernel d2({{0.0, 2.0}, {2.0, 0.0}}, WeightedMeasure::uniform(2));
    CHECK(cut_distance_heuristic(d1, d2).value == Approx(2.0).margin(1e-12));

    CHECK(cut_distance_heuristic(StepKernel::constant(2.0), StepKernel::constant(2.5)).value ==
          Approx(0.5).margin(1e-12));
}

TEST_CASE("heuristic distance never exceeds the exact distance") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t r = 2 + trial % 3;
        auto k1 = testutil::random_kernel(rng, r, 2.0, true);
        auto k2 = testutil::random_kernel(rng, r, 2.0, true);
        double exact = cut_distance_exact(k1, k2).value;
        double heur = cut_distance_heuristic(k1, k2, 16, trial).value;
        CHECK(heur <= exact + 1e-12);
    }
}

TEST_CASE("reweighting bound (cut norm under a density h)") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t r = 2 + trial % 5;
        auto k1 = testutil::random_kernel(rng, r, 2.0);
        auto k2 = StepKernel(testutil::random_kernel(rng, r, 2.0).values, k1.measure);
        auto diff = difference(k1, k2);
        std::uniform_real_distribution<double> u(0.0, 2.0);
        std::vector<double> h(r);
        double hmax = 0.0;
        for (auto& x : h) hmax = std::max(hmax, x = u(rng));
        if (hmax == 0.0) continue;
        std::vector<double> reweighted_w(r);
        for (std::size_t i = 0; i < r; ++i)
            reweighted_w[i] = k1.measure.weights[i] * h[i];
        StepFunction diff_nu(diff.values, WeightedMeasure(reweighted_w));
        double lhs = cut_norm_exact(diff_nu).value;
        double rhs = hmax * hmax * cut_norm_exact(diff).value;
        CHECK(lhs <= rhs + 1e-12);
    }
}

TEST_CASE("m_delta is Lipschitz under the cut distance") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t r = 2 + trial % 3;
        auto k1 = testutil::random_kernel(rng, r, 2.0, true);
        auto k2 = testutil::random_kernel(rng, r, 2.0, true);
        double dist = cut_distance_exact(k1, k2).value;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double delta = u(rng);
        CHECK(std::abs(tail_marginal(k1, delta) - tail_marginal(k2, delta)) <= dist + 1e-12);
    }
}
