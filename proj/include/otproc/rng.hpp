#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace otproc {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Deterministic random stream: mt19937_64 with explicit uniform and
// Box-Muller normal transforms, so a fixed seed yields a fixed sequence.
// Substreams are derived by splitmix64-mixing the master seed with a stream
// index, which keeps replications independent of scheduling order.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/canonical53+boxmuller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
        return Rng(splitmix64(master_seed ^ splitmix64(index + 1)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace otproc
