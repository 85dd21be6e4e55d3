#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qkdsim/channel.hpp"
#include "qkdsim/density.hpp"

namespace qkd {

// Basis pair used by the prepare-and-measure protocol: the standard Z/X
// encoding, or the X/Y variant that hides the channel's Z bias.
enum class Bb84Variant : int { ZX = 0, XY };

std::array<BasisKind, 2> variant_bases(Bb84Variant variant);

// The four states the variant can prepare, in basis order (first basis bit
// 0/1, then second basis bit 0/1).
std::array<StateLabel, 4> variant_states(Bb84Variant variant);

struct Bb84Round {
    std::uint8_t alice_bit;        // data bit a
    std::uint8_t alice_basis_bit;  // basis selector b
    StateLabel prepared;
    BasisKind bob_basis;
    StateLabel bob_outcome;
    bool sifted;
    bool is_check_bit;

    friend bool operator==(const Bb84Round&, const Bb84Round&) = default;
};

struct Bb84Transcript {
    Bb84Variant variant;
    RelaxationParams params;
    std::uint64_t seed;
    std::vector<Bb84Round> rounds;
};

// Runs n rounds: Alice draws a bit and a basis, the prepared state idles
// through the relaxation channel, Bob measures in his own drawn basis.
// Alice, Bob and the measurement samples use independent sub-streams of the
// seed, so a transcript is a pure function of (n, variant, params, seed).
Bb84Transcript bb84_run(std::int64_t n, Bb84Variant variant, const RelaxationParams& params,
                        std::uint64_t seed);

// Rounds where the bases matched, in order.
std::vector<Bb84Round> sift(const Bb84Transcript& transcript);

struct CheckBitsResult {
    double qber;              // disagreement rate over the check sample
    bool abort;               // qber > threshold
    std::int64_t check_count; // floor(fraction * sifted)
};

// Samples floor(fraction * sifted) sifted rounds without replacement, marks
// them as check bits in the transcript, and compares publicly. Requires at
// least 2 sifted rounds; a high error rate is reported through the abort
// flag, not an exception.
CheckBitsResult check_bits(Bb84Transcript& transcript, double fraction, double threshold,
                           std::uint64_t seed);

enum class RoundRole : int { Key = 0, Test, Discard };

struct E91Round {
    std::uint8_t alice_setting;  // 1..3
    std::uint8_t bob_setting;    // 1..3
    std::int8_t alice_outcome;   // +1 or -1
    std::int8_t bob_outcome;     // +1 or -1
    RoundRole role;

    friend bool operator==(const E91Round&, const E91Round&) = default;
};

struct E91Transcript {
    StateLabel source;
    RelaxationParams params;
    std::uint64_t seed;
    std::vector<E91Round> rounds;
};

// Alice measures one of A1 = Z, A2 = X, A3 = (Z+X)/sqrt(2); Bob one of
// B1 = Z, B2 = (Z-X)/sqrt(2), B3 = (Z+X)/sqrt(2), each setting drawn
// uniformly. Both halves of the source pair idle through the channel.
// Matching settings (A1,B1) and (A3,B3) make key rounds; the four CHSH
// pairs (A1,B3), (A1,B2), (A2,B3), (A2,B2) make test rounds; the rest are
// discarded.
E91Transcript e91_run(std::int64_t n, StateLabel source, const RelaxationParams& params,
                      std::uint64_t seed);

// CHSH pairs in the order they enter S = |E13 + E12 + E23 - E22|.
inline constexpr std::array<const char*, 4> kChshPairNames = {"A1B3", "A1B2", "A2B3", "A2B2"};

struct ChshEstimate {
    double s_value;
    std::array<double, 4> correlations;  // pair order as kChshPairNames
    std::array<std::int64_t, 4> counts;  // rounds per pair; zero for analytic
    bool empirical;
};

// S evaluated exactly from expectation values on the given two-qubit state.
ChshEstimate chsh_analytic(const DensityMatrix& rho);

// S estimated from the test rounds of a transcript. Every CHSH pair must
// have at least one round.
ChshEstimate chsh_empirical(const E91Transcript& transcript);

// Standard error of an empirical S via independent-pair propagation.
double chsh_std_error(const ChshEstimate& estimate);

struct KeyPair {
    std::vector<std::uint8_t> alice;
    std::vector<std::uint8_t> bob;
};

// Outcome +1 maps to bit 0, outcome -1 to bit 1, in key-round order. For a
// psi_minus source Bob flips his bits to align the anticorrelated key.
KeyPair e91_key_extract(const E91Transcript& transcript);

}  // namespace qkd
