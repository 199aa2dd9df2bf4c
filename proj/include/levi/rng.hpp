#pragma once

#include <cstdint>

namespace levi {

// SplitMix64. All sampling randomness flows through this generator so that
// identical seeds give byte-identical output streams on every platform; the
// standard library distributions make no such guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53 significant bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [-1,1)
    double next_sym() { return 2.0 * next_unit() - 1.0; }

private:
    std::uint64_t state_;
};

} // namespace levi
