#pragma once

#include <cstdint>
#include <span>

#include "qkdsim/error.hpp"

namespace qkd {

// splitmix64 finalizer. Used both to seed streams and to hash stream salts.
std::uint64_t mix64(std::uint64_t x);

// Derives the seed of an independent sub-stream as seed XOR hash(salt).
// Distinct salts give decorrelated streams; the same (seed, salt) pair gives
// the same stream on every platform.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t salt);

// xoshiro256++ seeded via splitmix64. Hand-rolled so that output bytes are
// identical across compilers and standard libraries; std::mt19937 would be
// reproducible too, but distributions such as std::uniform_int_distribution
// are not specified bit-for-bit.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double next_double();

    // Uniform integer in [0, n) via the multiply-shift reduction.
    std::uint32_t next_below(std::uint32_t n);

private:
    std::uint64_t s_[4];
};

// Samples an outcome index from a discrete distribution that sums to 1
// within 1e-9. Zero-probability outcomes are never returned.
std::size_t sample_outcome(std::span<const double> dist, RandomStream& rng);

}  // namespace qkd
