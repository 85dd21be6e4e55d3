#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "qkdsim/protocol.hpp"

using namespace qkd;

namespace {

bool basis_matches(const Bb84Round& r, Bb84Variant variant) {
    return r.bob_basis == variant_bases(variant)[r.alice_basis_bit];
}

}  // namespace

TEST_CASE("variant catalogs") {
    CHECK(variant_bases(Bb84Variant::ZX) == std::array<BasisKind, 2>{BasisKind::Z, BasisKind::X});
    CHECK(variant_bases(Bb84Variant::XY) == std::array<BasisKind, 2>{BasisKind::X, BasisKind::Y});
    CHECK(variant_states(Bb84Variant::ZX) ==
          std::array<StateLabel, 4>{StateLabel::S0, StateLabel::S1, StateLabel::Plus,
                                    StateLabel::Minus});
    CHECK(variant_states(Bb84Variant::XY) ==
          std::array<StateLabel, 4>{StateLabel::Plus, StateLabel::Minus, StateLabel::PlusI,
                                    StateLabel::MinusI});
}

TEST_CASE("transcripts are a pure function of the seed") {
    auto params = RelaxationParams::from_lambda(0.3);
    auto a = bb84_run(2000, Bb84Variant::ZX, params, 42);
    auto b = bb84_run(2000, Bb84Variant::ZX, params, 42);
    CHECK(a.rounds == b.rounds);
    auto c = bb84_run(2000, Bb84Variant::ZX, params, 43);
    CHECK(a.rounds != c.rounds);
}

TEST_CASE("round bookkeeping is internally consistent") {
    auto params = RelaxationParams::from_lambda(0.42);
    for (Bb84Variant variant : {Bb84Variant::ZX, Bb84Variant::XY}) {
        auto tr = bb84_run(5000, variant, params, 7);
        const auto states = variant_states(variant);
        std::int64_t sifted = 0;
        for (const auto& r : tr.rounds) {
            CHECK(r.alice_bit <= 1);
            CHECK(r.alice_basis_bit <= 1);
            CHECK(r.prepared == states[2 * r.alice_basis_bit + r.alice_bit]);
            CHECK(r.sifted == basis_matches(r, variant));
            CHECK_FALSE(r.is_check_bit);
            if (r.sifted) ++sifted;
            // Bob's outcome is an eigenstate of his basis.
            auto eig = basis_eigenstates(r.bob_basis);
            CHECK((r.bob_outcome == eig[0] || r.bob_outcome == eig[1]));
        }
        // Basis match probability is 1/2: allow 4 sigma.
        const double sigma = std::sqrt(5000.0 * 0.25);
        CHECK(std::abs(static_cast<double>(sifted) - 2500.0) < 4.0 * sigma);
        CHECK(sift(tr).size() == static_cast<std::size_t>(sifted));
    }
}

TEST_CASE("no channel means no sifted errors") {
    auto params = RelaxationParams::from_time(0.0);
    for (Bb84Variant variant : {Bb84Variant::ZX, Bb84Variant::XY}) {
        auto tr = bb84_run(4000, variant, params, 11);
        for (const auto& r : sift(tr)) CHECK(r.bob_outcome == r.prepared);
    }
}

TEST_CASE("check bits: clean channel passes, fully decayed channel aborts") {
    auto clean = bb84_run(4000, Bb84Variant::ZX, RelaxationParams::from_time(0.0), 3);
    auto res = check_bits(clean, 0.25, 0.11, 99);
    CHECK(res.qber == 0.0);
    CHECK_FALSE(res.abort);
    const auto sifted_count = static_cast<std::int64_t>(sift(clean).size());
    CHECK(res.check_count == sifted_count / 4);
    std::int64_t marked = 0;
    for (const auto& r : clean.rounds) {
        if (r.is_check_bit) {
            CHECK(r.sifted);
            ++marked;
        }
    }
    CHECK(marked == res.check_count);

    auto noisy = bb84_run(4000, Bb84Variant::ZX, RelaxationParams::from_lambda(1.0), 3);
    auto bad = check_bits(noisy, 0.25, 0.11, 99);
    CHECK(bad.abort);
    // At full decay the Z/X error rate is 1/2; 4 sigma around it.
    const double n = static_cast<double>(bad.check_count);
    CHECK(std::abs(bad.qber - 0.5) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("check bit sampling validates its inputs") {
    auto tr = bb84_run(100, Bb84Variant::ZX, RelaxationParams::from_time(0.0), 5);
    CHECK_THROWS_AS(check_bits(tr, 0.0, 0.1, 1), ValidationError);
    CHECK_THROWS_AS(check_bits(tr, 1.0, 0.1, 1), ValidationError);
    CHECK_THROWS_AS(check_bits(tr, 0.5, 1.5, 1), ValidationError);

    Bb84Transcript empty = tr;
    empty.rounds.clear();
    CHECK_THROWS_AS(check_bits(empty, 0.5, 0.1, 1), InsufficientDataError);
    CHECK_THROWS_AS(bb84_run(0, Bb84Variant::ZX, RelaxationParams::from_time(0.0), 1),
                    ValidationError);
}

TEST_CASE("e91 roles follow the setting table") {
    auto tr = e91_run(9000, StateLabel::PhiPlus, RelaxationParams::from_lambda(0.2), 13);
    std::int64_t key = 0, test = 0, discard = 0;
    for (const auto& r : tr.rounds) {
        CHECK(r.alice_setting >= 1);
        CHECK(r.alice_setting <= 3);
        CHECK(r.bob_setting >= 1);
        CHECK(r.bob_setting <= 3);
        CHECK((r.alice_outcome == 1 || r.alice_outcome == -1));
        CHECK((r.bob_outcome == 1 || r.bob_outcome == -1));
        const bool is_key = (r.alice_setting == 1 && r.bob_setting == 1) ||
                            (r.alice_setting == 3 && r.bob_setting == 3);
        const bool is_test = (r.alice_setting == 1 || r.alice_setting == 2) &&
                             (r.bob_setting == 2 || r.bob_setting == 3);
        if (is_key) {
            CHECK(r.role == RoundRole::Key);
            ++key;
        } else if (is_test) {
            CHECK(r.role == RoundRole::Test);
            ++test;
        } else {
            CHECK(r.role == RoundRole::Discard);
            ++discard;
        }
    }
    // 2/9, 4/9, 3/9 of 9000 within 4 sigma.
    CHECK(std::abs(key - 2000.0) < 4.0 * std::sqrt(9000.0 * (2.0 / 9.0) * (7.0 / 9.0)));
    CHECK(std::abs(test - 4000.0) < 4.0 * std::sqrt(9000.0 * (4.0 / 9.0) * (5.0 / 9.0)));
    CHECK(key + test + discard == 9000);
}

TEST_CASE("e91 validates its source") {
    CHECK_THROWS_AS(e91_run(10, StateLabel::Plus, RelaxationParams::from_time(0.0), 1),
                    ValidationError);
}

TEST_CASE("clean phi_plus key rounds agree; psi_minus anticorrelate") {
    auto params = RelaxationParams::from_time(0.0);
    auto tr = e91_run(3000, StateLabel::PhiPlus, params, 17);
    for (const auto& r : tr.rounds) {
        if (r.role == RoundRole::Key) CHECK(r.alice_outcome == r.bob_outcome);
    }
    auto anti = e91_run(3000, StateLabel::PsiMinus, params, 17);
    for (const auto& r : anti.rounds) {
        if (r.role == RoundRole::Key) CHECK(r.alice_outcome == -r.bob_outcome);
    }

    auto key = e91_key_extract(anti);
    REQUIRE(key.alice.size() == key.bob.size());
    CHECK(key.alice.size() > 0);
    for (std::size_t i = 0; i < key.alice.size(); ++i) CHECK(key.alice[i] == key.bob[i]);
}

TEST_CASE("key extraction needs key rounds") {
    auto tr = e91_run(5, StateLabel::PhiPlus, RelaxationParams::from_time(0.0), 1);
    tr.rounds.clear();
    CHECK_THROWS_AS(e91_key_extract(tr), InsufficientDataError);
}

TEST_CASE("analytic CHSH value of the singlet and the mixed state") {
    auto singlet = chsh_analytic(DensityMatrix::of(StateLabel::PsiMinus));
    CHECK_FALSE(singlet.empirical);
    CHECK(singlet.s_value == doctest::Approx(2.8284271247461903).epsilon(1e-13));
    CHECK(singlet.correlations[0] == doctest::Approx(-0.7071067811865475).epsilon(1e-13));
    CHECK(chsh_std_error(singlet) == 0.0);

    auto mixed = chsh_analytic(DensityMatrix::maximally_mixed(4));
    CHECK(mixed.s_value == doctest::Approx(0.0).epsilon(1e-14));
    for (double c : mixed.correlations) CHECK(c == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("empirical CHSH tracks the analytic value on the clean singlet") {
    auto tr = e91_run(30000, StateLabel::PsiMinus, RelaxationParams::from_time(0.0), 23);
    auto est = chsh_empirical(tr);
    CHECK(est.empirical);
    std::int64_t test_rounds = 0;
    for (const auto& r : tr.rounds)
        if (r.role == RoundRole::Test) ++test_rounds;
    CHECK(est.counts[0] + est.counts[1] + est.counts[2] + est.counts[3] == test_rounds);
    const double se = chsh_std_error(est);
    CHECK(se > 0.0);
    CHECK(std::abs(est.s_value - 2.8284271247461903) < 4.0 * se);
}

TEST_CASE("empirical CHSH requires every pair") {
    auto tr = e91_run(5, StateLabel::PsiMinus, RelaxationParams::from_time(0.0), 29);
    tr.rounds.clear();
    CHECK_THROWS_AS(chsh_empirical(tr), InsufficientDataError);
}

TEST_CASE("CHSH rejects single-qubit states") {
    CHECK_THROWS_AS(chsh_analytic(DensityMatrix::of(StateLabel::S0)), ValidationError);
}
