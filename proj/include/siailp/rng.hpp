#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace siailp {

// Deterministic splitmix64 generator. The standard library engines are
// portable but the distributions are not, so sampling and shuffling are
// hand-rolled here; identical seeds give identical streams on every
// platform, which the cache/checkpoint byte-identity contract relies on.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n), unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    int next_index(std::size_t n) {
        return static_cast<int>(next_below(static_cast<std::uint64_t>(n)));
    }

    bool next_bool() { return (next_u64() & 1ULL) != 0; }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = next_below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// Derives an independent stream seed from the run seed, a purpose tag and up
// to four indices. All randomness in the pipeline flows from one seed through
// these named sub-streams, so worker count and call order cannot perturb it.
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view tag,
                                   std::uint64_t a = 0, std::uint64_t b = 0,
                                   std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : tag) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    h = detail::mix64(h ^ detail::mix64(seed + 0x9e3779b97f4a7c15ULL));
    h = detail::mix64(h ^ detail::mix64(a + 0xa0761d6478bd642fULL));
    h = detail::mix64(h ^ detail::mix64(b + 0xe7037ed1a0b428dbULL));
    h = detail::mix64(h ^ detail::mix64(c + 0x8ebc6af09c88c6e3ULL));
    h = detail::mix64(h ^ detail::mix64(d + 0x589965cc75374cc3ULL));
    return h;
}

}  // namespace siailp
