// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bjlab {

/**
 * Deterministic random source.
 *
 * Wraps std::mt19937_64 but maps raw bits to doubles by hand so that a given
 * seed yields byte-identical streams on every standard library.  All sampling
 * in the project goes through this type.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double canonical() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * canonical(); }

    /// Uniform integer in [0, n-1] via rejection-free modulo on 64 bits (bias < 2^-52 for n < 2^11).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    /// Uniform integer in [lo, hi] inclusive.
    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

    /// Fisher-Yates shuffle.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t k = v.size(); k > 1; --k) {
            std::size_t j = static_cast<std::size_t>(below(k));
            std::swap(v[k - 1], v[j]);
        }
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace bjlab
