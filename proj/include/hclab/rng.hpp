#ifndef HCLAB_RNG_HPP
#define HCLAB_RNG_HPP

#include <cstdint>

namespace hclab {

// Splittable deterministic generator (splitmix64 core). All randomness in the
// project flows through this type; child streams derived with derive() are
// independent of worker count, so parallel runs reproduce sequential ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [lo, hi], inclusive. Rejection sampling, unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next());  // full range
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do { x = next(); } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Independent child stream; deterministic in (parent seed, index).
    Rng derive(std::uint64_t index) const {
        Rng mix(state_ ^ (0x5851f42d4c957f2dULL * (index + 1)));
        return Rng(mix.next());
    }

private:
    std::uint64_t state_;
};

}  // namespace hclab

#endif
