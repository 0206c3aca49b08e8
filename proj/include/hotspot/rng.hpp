#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hotspot/errors.hpp"

namespace hotspot {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Chosen over std::mt19937 because substreams are addressable: a stream id
// goes into the counter, so (seed, stream) pairs give statistically
// independent sequences with no state handoff between threads.
struct Philox4x32 {
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

// One substream of the keyed generator. The 128-bit counter is laid out as
// (block_lo, block_hi, stream_lo, stream_hi): every distinct (seed, stream)
// pair owns 2^64 blocks of 4 words. Cheap to construct; no shared state.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in (0, 1): never returns an exact 0 or 1.
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) via Lemire's multiply-shift rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                x = next_u64();
                m = static_cast<unsigned __int128>(x) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    void refill() {
        buf_ = Philox4x32::block({static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32), stream_lo_,
                                  stream_hi_},
                                 key_);
        ++block_;
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

// Stream-id namespaces. Keeping purposes in the top byte means the per-index
// substreams of different stages can never collide.
namespace stream {
inline constexpr std::uint64_t kGlobalPermutation = 1ull << 56;
inline constexpr std::uint64_t kLocalPermutation = 2ull << 56;
inline constexpr std::uint64_t kSynthCounts = 3ull << 56;
inline constexpr std::uint64_t kSynthEvents = 4ull << 56;

inline std::uint64_t synth_event(std::uint64_t zone, std::uint64_t event) {
    return kSynthEvents | (zone << 24) | event;
}
}  // namespace stream

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, CounterRng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

// Poisson sampling by CDF inversion, chunked so exp(-lambda) never
// underflows: Poisson(a) + Poisson(b) is exactly Poisson(a + b).
inline std::int64_t poisson(CounterRng& rng, double lambda) {
    if (lambda < 0.0) throw data_error("poisson: negative rate");
    constexpr double kChunk = 16.0;
    std::int64_t total = 0;
    while (lambda > 0.0) {
        double rate = lambda > kChunk ? kChunk : lambda;
        lambda -= rate;
        double u = rng.next_double_open();
        double p = std::exp(-rate);
        double cum = p;
        std::int64_t k = 0;
        while (u > cum && k < 20000) {
            ++k;
            p *= rate / static_cast<double>(k);
            cum += p;
        }
        total += k;
    }
    return total;
}

}  // namespace hotspot
