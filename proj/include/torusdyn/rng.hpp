#pragma once

#include <cstdint>
#include <string_view>

namespace torusdyn {

/// SplitMix64 stream with deterministic named children.
///
/// split("name") depends only on the parent seed and the name, never on how
/// many numbers the parent has produced, so sub-runs see the same stream
/// regardless of scheduling.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    SplitRng split(std::string_view name) const {
        // FNV-1a over the name, mixed with the parent seed
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : name) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        SplitRng mix(seed_ ^ h);
        return SplitRng(mix.next_u64());
    }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

}  // namespace torusdyn
