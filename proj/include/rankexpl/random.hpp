#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "rankexpl/errors.hpp"

namespace rankexpl {

/// FNV-1a over a string, used to derive named sub-stream seeds.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives the seed of a named sub-stream from a master seed. Every source of
/// randomness in the pipeline pulls from one of these streams, so a stage can
/// be rerun in isolation and reproduce its draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
    return splitmix64(master ^ fnv1a(stream));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::string_view key) {
    return splitmix64(derive_seed(master, stream) ^ fnv1a(key));
}

/// Deterministic RNG. mt19937_64 output is pinned by the standard; the
/// derived draws below avoid std::*_distribution, whose mapping is
/// implementation-defined, so identical seeds give identical streams on any
/// toolchain.
class rng {
  public:
    explicit rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    /// Uniform integer in [0, n) via rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw error("rng::below: empty range");
        std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Index drawn from the distribution given by cumulative weights
    /// (non-decreasing, last element = total mass).
    std::size_t weighted(const std::vector<double>& cumulative) {
        if (cumulative.empty()) throw error("rng::weighted: empty weights");
        double u = unit() * cumulative.back();
        std::size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cumulative[mid] > u)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    /// k distinct indices from [0, n), order of first selection.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) k = n;
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::size_t> out;
        out.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

  private:
    std::mt19937_64 gen_;
};

/// Standard normal draw via Box-Muller, built on unit() so the stream stays
/// identical across standard libraries.
inline double gaussian(rng& g) {
    double u1 = 1.0 - g.unit();
    double u2 = g.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

}  // namespace rankexpl
