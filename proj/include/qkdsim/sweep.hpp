#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qkdsim/analytics.hpp"
#include "qkdsim/protocol.hpp"

namespace qkd {

// What a sweep simulates at each grid point.
enum class SweepProtocol : int {
    Bb84Zx = 0,    // prepare-and-measure, Z/X encoding
    Bb84Xy,        // prepare-and-measure, X/Y encoding
    E91PhiPlus,    // shared phi_plus pair, Z readout quantities
    E91PsiPlus,    // shared psi_plus pair, Z readout quantities
    ChshPsiMinus,  // shared psi_minus pair, CHSH quantities
};

std::string_view to_string(SweepProtocol protocol);
SweepProtocol parse_sweep_protocol(std::string_view name);

struct SweepConfig {
    SweepProtocol protocol = SweepProtocol::Bb84Zx;
    double t_start = 0.0;               // ns
    double t_end = 5.0 * kDefaultT1;    // ns
    int steps = 50;
    double t1 = kDefaultT1;             // ns
    std::int64_t shots = 100000;        // sifted rounds (BB84) or pairs (E91)
    std::uint64_t seed = 1;
    std::vector<std::string> quantities;  // empty selects all for the protocol

    void validate() const;
};

struct SweepRow {
    double t;             // ns
    double lambda;
    std::string quantity;
    double analytic;
    double empirical;
    double std_error;     // binomial or correlation standard error
    std::int64_t shots;   // denominator behind the empirical estimate
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepRow> rows;  // sorted by (t, quantity)
};

// Quantity names a protocol produces, sorted.
std::vector<std::string> protocol_quantities(SweepProtocol protocol);

// Runs the Monte Carlo protocol at every grid point and pairs each
// estimate with its closed form. Grid points use seeds derived as
// seed XOR hash(index) and may be evaluated on several threads; the result
// is identical for any thread count (override with QKDSIM_THREADS).
SweepResult run_sweep(const SweepConfig& config);

// Serializes with the fixed header
// t_ns,lambda,quantity,analytic,empirical,std_error,shots and 17
// significant digits, locale independent.
std::string to_csv(const SweepResult& result);

// One numeric CSV field; rejects non-finite values.
std::string csv_number(double v);

struct CompareReport {
    double max_z;
    std::vector<std::size_t> failing_rows;   // tail probability below the gate
    std::vector<std::size_t> hard_failures;  // deterministic rows that disagree
    std::int64_t rows_checked;
    bool pass;
    std::string text;
};

// Gates each row against its analytic null. Proportion rows (and
// correlations, through p = (1+r)/2) are treated as binomial counts: the
// two-sided tail probability of the observed count under the closed-form
// rate must stay above the tail mass of a z_threshold-sigma normal
// deviation. Thin cells use the exact binomial tail instead of the normal
// approximation, so near-empty outcomes are judged correctly. Rows whose
// null is deterministic (rate 0 or 1) must match exactly; any miss is a
// hard failure. The chsh_s row is gated on its propagated standard error.
// Rows with an empty denominator are skipped with a note.
CompareReport compare(const SweepResult& result, double z_threshold);

struct EveEvaluation {
    Bb84Variant variant;
    double lambda;
    std::string strategy_name;
    std::array<double, 4> strategy_probs;  // over variant_states(variant)
    double analytic;
    double brute_force;
    double monte_carlo;
    double mc_std_error;
    double epsilon;  // analytic advantage over the blind 1/4
    std::int64_t sifted_rounds;
    std::uint64_t seed;
};

// Evaluates the variant's biased guessing strategy three ways: closed form,
// numeric enumeration, and a seeded simulation with `sifted_rounds` sifted
// rounds.
EveEvaluation evaluate_eve(Bb84Variant variant, double lambda, std::int64_t sifted_rounds,
                           std::uint64_t seed);

}  // namespace qkd
