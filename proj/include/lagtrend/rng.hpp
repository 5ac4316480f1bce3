#pragma once

// Seeded random number generation with a documented seed-splitting scheme.
// All randomness in a run flows from one master seed; per-unit seeds are
// derived with derive_seed so independent work units (targets, folds) get
// independent, reproducible streams. Distributions are hand-rolled so the
// byte-level output does not depend on the standard library implementation.

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace lagtrend {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// FNV-1a, used to fold instrument ids into derived seeds.
inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// seed || stream || index -> independent 64-bit seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t st = base;
    splitmix64(st);
    st ^= stream * 0x9e3779b97f4a7c15ull;
    splitmix64(st);
    st ^= index + 0x632be59bd9b4e019ull;
    return splitmix64(st);
}

// xoshiro256++ with splitmix64 seeding.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t st = seed;
        for (auto& w : s_) w = splitmix64(st);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n), unbiased via rejection
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::next_below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // standard normal, Box-Muller; second value cached
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        while (u == 0.0) u = next_double();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), partial Fisher-Yates; order is random
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        if (k > n) throw std::invalid_argument("Rng::sample_indices: k exceeds n");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4]{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace lagtrend
