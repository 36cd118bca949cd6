#pragma once

#include <array>
#include <cstdint>

namespace rcs {

// xoshiro256** seeded through SplitMix64. Both algorithms are fixed here so
// that any implementation following the same recipe reproduces our streams:
//   state[j] = splitmix64 output j (j = 0..3) starting from `seed`
//   uniform01 = (next() >> 11) * 2^-53
//   normal    = Box-Muller on (1 - u1, u2), cosine branch first, sine branch cached
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);
    // Starts from a raw xoshiro256** state (used to check reference outputs).
    static Rng from_state(const std::array<std::uint64_t, 4>& state);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next();
    double uniform01();
    // Uniform on {0,...,n-1} by rejection from the top of the 64-bit range.
    std::uint64_t uniform_index(std::uint64_t n);
    double normal();

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

// Solver-facing name for block sampling.
inline std::uint64_t uniform_block_index(Rng& rng, std::uint64_t N) { return rng.uniform_index(N); }

}  // namespace rcs
