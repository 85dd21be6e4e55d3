#include "qkdsim/protocol.hpp"

#include <cmath>
#include <string>

#include "qkdsim/rng.hpp"

namespace qkd {

namespace {

// Sub-stream salts. Keeping the parties on separate streams means adding a
// consumer (e.g. an eavesdropper model) cannot shift anyone else's draws.
constexpr std::uint64_t kSaltAlice = 0xA11CE;
constexpr std::uint64_t kSaltBob = 0xB0B;
constexpr std::uint64_t kSaltOutcome = 0x0B5E;
constexpr std::uint64_t kSaltCheck = 0xC4EC;

ObservableKind alice_setting_observable(int idx) {
    switch (idx) {
        case 0: return ObservableKind::Z;
        case 1: return ObservableKind::X;
        default: return ObservableKind::ZPlusX;
    }
}

ObservableKind bob_setting_observable(int idx) {
    switch (idx) {
        case 0: return ObservableKind::Z;
        case 1: return ObservableKind::ZMinusX;
        default: return ObservableKind::ZPlusX;
    }
}

RoundRole setting_role(int a, int b) {
    if ((a == 0 && b == 0) || (a == 2 && b == 2)) return RoundRole::Key;
    if ((a == 0 || a == 1) && (b == 1 || b == 2)) return RoundRole::Test;
    return RoundRole::Discard;
}

}  // namespace

std::array<BasisKind, 2> variant_bases(Bb84Variant variant) {
    switch (variant) {
        case Bb84Variant::ZX: return {BasisKind::Z, BasisKind::X};
        case Bb84Variant::XY: return {BasisKind::X, BasisKind::Y};
    }
    throw ValidationError("unknown protocol variant");
}

std::array<StateLabel, 4> variant_states(Bb84Variant variant) {
    const auto bases = variant_bases(variant);
    const auto first = basis_eigenstates(bases[0]);
    const auto second = basis_eigenstates(bases[1]);
    return {first[0], first[1], second[0], second[1]};
}

Bb84Transcript bb84_run(std::int64_t n, Bb84Variant variant, const RelaxationParams& params,
                        std::uint64_t seed) {
    if (n < 1) throw ValidationError("round count must be >= 1");

    const auto bases = variant_bases(variant);
    const auto states = variant_states(variant);
    const KrausChannel channel = KrausChannel::relaxation(params);

    // Evolved state and per-basis outcome distribution for each of the four
    // preparable states; rounds then only index into these tables.
    std::array<std::array<std::array<double, 2>, 2>, 4> dist{};
    for (int s = 0; s < 4; ++s) {
        const StateLabel prepared = states[static_cast<std::size_t>(s)];
        const DensityMatrix evolved = channel.apply(DensityMatrix::of(prepared));
        for (int b = 0; b < 2; ++b) {
            const auto d = measure_distribution(evolved, bases[static_cast<std::size_t>(b)]);
            dist[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] = {d[0], d[1]};
        }
    }

    RandomStream alice(derive_stream(seed, kSaltAlice));
    RandomStream bob(derive_stream(seed, kSaltBob));
    RandomStream outcome(derive_stream(seed, kSaltOutcome));

    Bb84Transcript transcript{variant, params, seed, {}};
    transcript.rounds.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        Bb84Round round{};
        round.alice_bit = static_cast<std::uint8_t>(alice.next_below(2));
        round.alice_basis_bit = static_cast<std::uint8_t>(alice.next_below(2));
        const int state_index = 2 * round.alice_basis_bit + round.alice_bit;
        round.prepared = states[static_cast<std::size_t>(state_index)];

        const int bob_basis_bit = static_cast<int>(bob.next_below(2));
        round.bob_basis = bases[static_cast<std::size_t>(bob_basis_bit)];

        const auto& d = dist[static_cast<std::size_t>(state_index)][static_cast<std::size_t>(bob_basis_bit)];
        const std::size_t o = sample_outcome(std::span<const double>(d.data(), 2), outcome);
        round.bob_outcome = basis_eigenstates(round.bob_basis)[o];

        round.sifted = bob_basis_bit == round.alice_basis_bit;
        round.is_check_bit = false;
        transcript.rounds.push_back(round);
    }
    return transcript;
}

std::vector<Bb84Round> sift(const Bb84Transcript& transcript) {
    std::vector<Bb84Round> out;
    for (const Bb84Round& r : transcript.rounds)
        if (r.sifted) out.push_back(r);
    return out;
}

CheckBitsResult check_bits(Bb84Transcript& transcript, double fraction, double threshold,
                           std::uint64_t seed) {
    if (!(fraction > 0.0) || !(fraction < 1.0)) {
        throw ValidationError("check fraction must lie in (0, 1)");
    }
    if (!(threshold >= 0.0) || !(threshold <= 1.0)) {
        throw ValidationError("abort threshold must lie in [0, 1]");
    }

    std::vector<std::size_t> sifted_idx;
    for (std::size_t i = 0; i < transcript.rounds.size(); ++i)
        if (transcript.rounds[i].sifted) sifted_idx.push_back(i);
    if (sifted_idx.size() < 2) {
        throw InsufficientDataError("check bits require at least 2 sifted rounds");
    }

    const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(sifted_idx.size())));
    RandomStream rng(derive_stream(seed, kSaltCheck));
    // Partial Fisher-Yates: the first k slots end up holding the sample.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j =
            i + rng.next_below(static_cast<std::uint32_t>(sifted_idx.size() - i));
        std::swap(sifted_idx[i], sifted_idx[j]);
    }

    std::int64_t disagree = 0;
    for (std::size_t i = 0; i < k; ++i) {
        Bb84Round& round = transcript.rounds[sifted_idx[i]];
        round.is_check_bit = true;
        if (round.bob_outcome != round.prepared) ++disagree;
    }
    const double qber = k == 0 ? 0.0 : static_cast<double>(disagree) / static_cast<double>(k);
    return {qber, qber > threshold, static_cast<std::int64_t>(k)};
}

E91Transcript e91_run(std::int64_t n, StateLabel source, const RelaxationParams& params,
                      std::uint64_t seed) {
    if (n < 1) throw ValidationError("round count must be >= 1");
    if (!is_bell_state(source)) {
        throw ValidationError("E91 source must be a Bell state");
    }

    const KrausChannel channel = KrausChannel::relaxation(params).lift_two_qubit();
    const DensityMatrix evolved = channel.apply(DensityMatrix::of(source));

    std::array<std::array<std::array<double, 4>, 3>, 3> dist{};
    for (int a = 0; a < 3; ++a) {
        const Observable oa = Observable::make(alice_setting_observable(a));
        for (int b = 0; b < 3; ++b) {
            const Observable ob = Observable::make(bob_setting_observable(b));
            dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                joint_outcome_distribution(oa, ob, evolved);
        }
    }

    RandomStream alice(derive_stream(seed, kSaltAlice));
    RandomStream bob(derive_stream(seed, kSaltBob));
    RandomStream outcome(derive_stream(seed, kSaltOutcome));

    E91Transcript transcript{source, params, seed, {}};
    transcript.rounds.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const int a = static_cast<int>(alice.next_below(3));
        const int b = static_cast<int>(bob.next_below(3));
        const auto& d = dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        const std::size_t o = sample_outcome(std::span<const double>(d.data(), 4), outcome);
        E91Round round{};
        round.alice_setting = static_cast<std::uint8_t>(a + 1);
        round.bob_setting = static_cast<std::uint8_t>(b + 1);
        round.alice_outcome = (o & 2) == 0 ? 1 : -1;
        round.bob_outcome = (o & 1) == 0 ? 1 : -1;
        round.role = setting_role(a, b);
        transcript.rounds.push_back(round);
    }
    return transcript;
}

namespace {

int chsh_pair_index(int alice_setting, int bob_setting) {
    if (alice_setting == 1 && bob_setting == 3) return 0;
    if (alice_setting == 1 && bob_setting == 2) return 1;
    if (alice_setting == 2 && bob_setting == 3) return 2;
    if (alice_setting == 2 && bob_setting == 2) return 3;
    return -1;
}

ChshEstimate finalize_chsh(ChshEstimate est) {
    const auto& r = est.correlations;
    est.s_value = std::abs(r[0] + r[1] + r[2] - r[3]);
    const double bound = 2.0 * std::sqrt(2.0);
    const double slack = est.empirical ? std::max(1e-9, 6.0 * chsh_std_error(est)) : tol::algebraic;
    if (est.s_value > bound + slack) {
        throw InvariantError("CHSH value exceeds the quantum bound beyond tolerance");
    }
    return est;
}

}  // namespace

ChshEstimate chsh_analytic(const DensityMatrix& rho) {
    if (rho.dim() != 4) throw ValidationError("CHSH requires a two-qubit state");
    const Observable a1 = Observable::make(ObservableKind::Z);
    const Observable a2 = Observable::make(ObservableKind::X);
    const Observable b2 = Observable::make(ObservableKind::ZMinusX);
    const Observable b3 = Observable::make(ObservableKind::ZPlusX);
    ChshEstimate est{};
    est.empirical = false;
    est.correlations = {expectation(tensor(a1, b3), rho), expectation(tensor(a1, b2), rho),
                        expectation(tensor(a2, b3), rho), expectation(tensor(a2, b2), rho)};
    est.counts = {0, 0, 0, 0};
    return finalize_chsh(est);
}

ChshEstimate chsh_empirical(const E91Transcript& transcript) {
    std::array<double, 4> sums{};
    std::array<std::int64_t, 4> counts{};
    for (const E91Round& r : transcript.rounds) {
        const int pair = chsh_pair_index(r.alice_setting, r.bob_setting);
        if (pair < 0) continue;
        sums[static_cast<std::size_t>(pair)] +=
            static_cast<double>(r.alice_outcome) * static_cast<double>(r.bob_outcome);
        ++counts[static_cast<std::size_t>(pair)];
    }
    ChshEstimate est{};
    est.empirical = true;
    for (int p = 0; p < 4; ++p) {
        if (counts[static_cast<std::size_t>(p)] == 0) {
            throw InsufficientDataError(std::string("no test rounds for CHSH pair ") +
                                        kChshPairNames[static_cast<std::size_t>(p)]);
        }
        est.correlations[static_cast<std::size_t>(p)] =
            sums[static_cast<std::size_t>(p)] /
            static_cast<double>(counts[static_cast<std::size_t>(p)]);
    }
    est.counts = counts;
    return finalize_chsh(est);
}

double chsh_std_error(const ChshEstimate& estimate) {
    if (!estimate.empirical) return 0.0;
    double var = 0.0;
    for (int p = 0; p < 4; ++p) {
        const double r = estimate.correlations[static_cast<std::size_t>(p)];
        const auto n = static_cast<double>(estimate.counts[static_cast<std::size_t>(p)]);
        // Each product a*b is +/-1, so var(a*b) = 1 - r^2.
        var += std::max(0.0, 1.0 - r * r) / n;
    }
    return std::sqrt(var);
}

KeyPair e91_key_extract(const E91Transcript& transcript) {
    KeyPair key;
    for (const E91Round& r : transcript.rounds) {
        if (r.role != RoundRole::Key) continue;
        const std::uint8_t a = r.alice_outcome > 0 ? 0 : 1;
        std::uint8_t b = r.bob_outcome > 0 ? 0 : 1;
        if (transcript.source == StateLabel::PsiMinus) b ^= 1;
        key.alice.push_back(a);
        key.bob.push_back(b);
    }
    if (key.alice.empty()) {
        throw InsufficientDataError("transcript contains no key rounds");
    }
    return key;
}

}  // namespace qkd
