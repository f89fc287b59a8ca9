#pragma once

// Deterministic sampling primitives. Draws are produced from explicit bit
// manipulation of mt19937_64 output plus our own inverse CDFs, so a (theta,
// n, seed) triple reproduces bit-identical samples on any platform.

#include <cmath>
#include <cstdint>
#include <random>

#include "dualdiv/special.hpp"

namespace dualdiv {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_quantile(uniform()); }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    /// Index i with probability weights[i]; weights must sum to one.
    template <class WeightVec>
    int categorical(const WeightVec& weights) {
        double u = uniform();
        double acc = 0.0;
        int last = static_cast<int>(weights.size()) - 1;
        for (int i = 0; i < last; ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return last;
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace dualdiv
