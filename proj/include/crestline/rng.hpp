#ifndef CRESTLINE_RNG_HPP
#define CRESTLINE_RNG_HPP

#include <cstdint>
#include <vector>

namespace crestline {

/// Counter-based deterministic generator (splitmix64 core).  Every draw
/// stream is derived from a 64-bit seed plus a stream index, so parallel
/// consumers get identical numbers regardless of scheduling order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) {
        // decorrelate seed and stream index before chaining
        state_ = mix(seed ^ 0x9e3779b97f4a7c15ull);
        state_ = mix(state_ ^ mix(stream + 0xbf58476d1ce4e5b9ull));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_ = 0;
};

/// Uniform draw from the closed ball of the given radius in R^dim,
/// by rejection from the cube.  Deterministic per (seed, stream).
inline std::vector<double> sample_ball(std::uint64_t seed, std::uint64_t stream, int dim,
                                       double radius) {
    CounterRng rng(seed, stream);
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (;;) {
        double r2 = 0.0;
        for (auto& xi : x) {
            xi = rng.symmetric();
            r2 += xi * xi;
        }
        if (r2 <= 1.0) break;
    }
    for (auto& xi : x) xi *= radius;
    return x;
}

} // namespace crestline

#endif
