#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "kdual/common.hpp"

namespace kdual {

// A measure on a finite-type partition: one non-negative mass per class.
struct WeightedMeasure {
    std::vector<double> weights;
    double total = 0.0;

    explicit WeightedMeasure(std::vector<double> w) : weights(std::move(w)) {
        require(!weights.empty(), "measure needs at least one class");
        for (double wi : weights)
            require(wi >= 0.0 && std::isfinite(wi), "class weights must be finite and >= 0");
        total = std::accumulate(weights.begin(), weights.end(), 0.0);
        require(total > 0.0, "total mass must be positive");
    }

    std::size_t classes() const { return weights.size(); }

    bool is_probability() const { return std::abs(total - 1.0) <= 1e-12; }

    static WeightedMeasure uniform(std::size_t r, double total_mass = 1.0) {
        return WeightedMeasure(std::vector<double>(r, total_mass / static_cast<double>(r)));
    }
};

} // namespace kdual
