#ifndef REMEST_RANDOM_HPP
#define REMEST_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace remest {

/// splitmix64 finalizer; decorrelates consecutive or structured inputs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based seed splitting: the derived seed depends only on
/// (master, stream, index), so trial results are independent of the
/// order in which trials are scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index) {
    std::uint64_t z = mix64(master);
    z = mix64(z ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    z = mix64(z ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return z;
}

/// Source of randomness for the simulation.
///
/// All distribution draws are defined on top of uniform01() with a fixed
/// number of uniforms per draw (normal = 2, exponential = 1, bernoulli = 1),
/// so two runs that make the same sequence of calls consume the same stream
/// regardless of the outcomes. Tests substitute a scripted subclass.
class RandomSource {
public:
    virtual ~RandomSource() = default;

    /// Uniform draw in [0, 1).
    virtual double uniform01() = 0;

    /// Standard normal via Box-Muller; always consumes exactly two uniforms.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        // 1 - u1 lies in (0, 1], keeping the log finite.
        return std::sqrt(-2.0 * std::log1p(-u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Exponential with the given mean, by inverse CDF; one uniform.
    double exponential(double mean) {
        return -mean * std::log1p(-uniform01());
    }

    /// Returns true with probability p; one uniform.
    bool bernoulli(double p) { return uniform01() < p; }
};

/// Mersenne-twister backed source; the default for simulations.
class Mt64Source final : public RandomSource {
public:
    explicit Mt64Source(std::uint64_t seed) : engine_(seed) {}

    double uniform01() override {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace remest

#endif  // REMEST_RANDOM_HPP
