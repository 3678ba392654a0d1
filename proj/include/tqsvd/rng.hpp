#pragma once

#include <cstdint>
#include <cmath>

namespace tqsvd {

// Counter-based splittable PRNG (SplitMix64 finalizer over key+counter).
// Stateless draws: value(k) is a pure function of (seed, stream, k), so trials
// can be evaluated in any order -- parallel and serial runs produce identical
// streams. derive() splits off an independent child stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

    std::uint64_t next_u64() { return value(counter_++); }

    // Pure draw at a given counter; does not advance state.
    std::uint64_t value(std::uint64_t counter) const { return mix(key_ + counter); }

    // Uniform in [0, 1).
    double next_double() { return to_unit(next_u64()); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // Rejection-free modulo is fine here: n is desk-scale, bias < 2^-40.
        return next_u64() % n;
    }

    // Standard normal via Box-Muller.
    double next_gaussian() {
        double u1 = 0.0;
        while (u1 <= 1e-300) u1 = next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Independent child stream; child(i) != child(j) for i != j.
    Rng derive(std::uint64_t child_index) const {
        Rng r(key_, child_index + 1);
        return r;
    }

    static double to_unit(std::uint64_t x) {
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace tqsvd
