#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kdual/trees.hpp"

using namespace kdual;

TEST_CASE("unlabeled tree counts for k = 1..8") {
    const long expected[] = {1, 1, 1, 2, 3, 6, 11, 23};
    for (int k = 1; k <= 8; ++k)
        CHECK(enumerate_trees(k).size() == static_cast<std::size_t>(expected[k - 1]));
}

TEST_CASE("Cayley identity: sum over shapes of k!/aut = k^{k-2}") {
    for (int k = 2; k <= 8; ++k) {
        long factorial = 1;
        for (int i = 2; i <= k; ++i) factorial *= i;
        long labeled = 0;
        for (const auto& t : enumerate_trees(k)) {
            CHECK(t.aut >= 1);
            CHECK(factorial % t.aut == 0);
            labeled += factorial / t.aut;
        }
        long cayley = 1;
        for (int i = 0; i < k - 2; ++i) cayley *= k;
        CHECK(labeled == cayley);
    }
}

TEST_CASE("small shapes") {
    auto k1 = enumerate_trees(1);
    REQUIRE(k1.size() == 1);
    CHECK(k1[0].aut == 1);
    CHECK(k1[0].edges.empty());
    CHECK(k1[0].degrees == std::vector<int>{0});

    auto k3 = enumerate_trees(3);
    REQUIRE(k3.size() == 1);
    CHECK(k3[0].aut == 2); // the path

    auto k4 = enumerate_trees(4);
    REQUIRE(k4.size() == 2);
    long aut_product = k4[0].aut * k4[1].aut;
    CHECK(((k4[0].aut == 2 && k4[1].aut == 6) || (k4[0].aut == 6 && k4[1].aut == 2)));
    CHECK(aut_product == 12);
}

TEST_CASE("edges and degrees are consistent") {
    for (int k = 2; k <= 7; ++k) {
        for (const auto& t : enumerate_trees(k)) {
            CHECK(t.edges.size() == static_cast<std::size_t>(k - 1));
            int degree_total = 0;
            for (int d : t.degrees) degree_total += d;
            CHECK(degree_total == 2 * (k - 1));
        }
    }
}

TEST_CASE("k over cap is rejected") {
    CHECK_THROWS_AS(enumerate_trees(9), validation_error);
    CHECK_THROWS_AS(enumerate_trees(0), validation_error);
}
