#include "qkdsim/rng.hpp"

#include <cmath>

namespace qkd {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t salt) {
    return seed ^ mix64(salt);
}

RandomStream::RandomStream(std::uint64_t seed) {
    std::uint64_t state = seed;
    for (auto& word : s_) {
        state += 0x9E3779B97F4A7C15ULL;
        word = mix64(state);
    }
}

std::uint64_t RandomStream::next_u64() {
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

double RandomStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t RandomStream::next_below(std::uint32_t n) {
    if (n == 0) throw ValidationError("next_below requires n >= 1");
    const unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint32_t>(product >> 64);
}

std::size_t sample_outcome(std::span<const double> dist, RandomStream& rng) {
    if (dist.empty()) throw ValidationError("cannot sample from an empty distribution");
    double sum = 0.0;
    for (double p : dist) {
        if (p < 0.0 || !std::isfinite(p)) {
            throw ValidationError("distribution entries must be finite and non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("distribution does not sum to 1 within tolerance");
    }
    const double u = rng.next_double();
    double cum = 0.0;
    std::size_t last_positive = dist.size();
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (dist[i] <= 0.0) continue;
        last_positive = i;
        cum += dist[i];
        if (u < cum) return i;
    }
    if (last_positive == dist.size()) {
        throw ValidationError("distribution has no positive entry");
    }
    return last_positive;
}

}  // namespace qkd
