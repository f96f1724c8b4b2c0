#pragma once

#include <cmath>
#include <cstdint>

namespace mitotrack {

/// Deterministic, splittable random stream. The generator is SplitMix64,
/// which is portable across platforms (no libstdc++ distribution objects,
/// whose output is implementation defined). Streams derived via split() are
/// statistically independent, so per-frame / per-hypothesis work order does
/// not change results.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (bit-portable, unlike std::normal_distribution).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Poisson by inversion; adequate for the small rates used here.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double l = std::exp(-lambda);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }

    /// Erlang(alpha, rate) draw as a sum of exponentials.
    double erlang(int alpha, double rate) {
        double sum = 0.0;
        for (int i = 0; i < alpha; ++i) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            sum += -std::log(u) / rate;
        }
        return sum;
    }

    int uniform_int(int n) {  // in [0, n)
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    /// Derive an independent child stream keyed by (a, b). Deterministic in
    /// the parent seed only, not in how much the parent has been consumed.
    Rng split(std::uint64_t a, std::uint64_t b = 0) const {
        std::uint64_t s = seed_;
        s = mix(s ^ mix(a + 0x632be59bd9b4e019ULL));
        s = mix(s ^ mix(b + 0x9e3779b97f4a7c15ULL));
        return Rng(s);
    }

    std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
        z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
        return z ^ (z >> 33);
    }

    std::uint64_t seed_;
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mitotrack
