#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace morphtag {

/// Deterministic random stream. Wraps mt19937_64 but draws all
/// distributions through our own code so results do not depend on the
/// standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 1)
        : gen_(seed), seed_hash_(splitmix(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    int uniform_int(int n) {
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller, one value per call.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(
                next_u64() % static_cast<std::uint64_t>(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derive an independent stream for a named component. Streams for
    /// distinct labels are stable regardless of draw order elsewhere.
    Rng fork(std::string_view label) const {
        return Rng(splitmix(seed_hash_ ^ fnv1a(label)));
    }

private:
    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 14695981039346656037ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return h;
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
    std::uint64_t seed_hash_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace morphtag
