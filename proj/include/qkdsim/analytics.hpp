#pragma once

#include <array>
#include <string>

#include "qkdsim/protocol.hpp"
#include "qkdsim/rng.hpp"

namespace qkd {

// P(Bob's sifted outcome matches Alice's preparation) for the Z/X encoding:
//   (2 + (1 - lambda) + sqrt(1 - lambda)) / 4.
double bb84_success(double lambda);

// Same quantity for the X/Y encoding: (1 + sqrt(1 - lambda)) / 2.
double bb84_xy_success(double lambda);

// P(correlated Z outcomes) for a shared phi_plus pair, both halves idling:
//   1 - lambda * (1 - lambda).
double e91_phiplus_success(double lambda);

// The phi_plus success curve has a single interior minimum of 3/4 at
//   t = T1 * ln 2.
double e91_phiplus_min_time(double t1);

// P(anticorrelated Z outcomes) for a shared psi_plus pair: 1 - lambda.
double e91_psiplus_success(double lambda);

// Distribution of Bob's sifted outcome over the variant's four states, with
// Alice's preparation uniform. Support order matches variant_states().
class OutcomeDistribution {
public:
    static OutcomeDistribution sifted(Bb84Variant variant, double lambda);

    Bb84Variant variant() const { return variant_; }
    const std::array<StateLabel, 4>& support() const { return support_; }
    const std::array<double, 4>& probabilities() const { return probs_; }
    double prob(StateLabel state) const;

private:
    OutcomeDistribution(Bb84Variant variant, std::array<double, 4> probs);
    Bb84Variant variant_;
    std::array<StateLabel, 4> support_;
    std::array<double, 4> probs_;
};

// An intercepting guesser who bets on Bob's sifted outcome: a distribution
// over the variant's four states.
class EveStrategy {
public:
    static EveStrategy uniform(Bb84Variant variant);

    // Exploits the channel's pull toward |0>: half the mass on |0>, the
    // remainder split over the X pair.
    static EveStrategy z_biased();

    // The equivalent construction on the X/Y encoding (half on |+i>).
    static EveStrategy biased_default(Bb84Variant variant);

    // Validates probs >= 0 summing to 1 within 1e-12, aligned with
    // variant_states(variant).
    static EveStrategy from_probs(Bb84Variant variant, const std::array<double, 4>& probs,
                                  std::string name);

    // Random point on the probability simplex; used by property checks.
    static EveStrategy random(Bb84Variant variant, RandomStream& rng);

    Bb84Variant variant() const { return variant_; }
    const std::array<double, 4>& probabilities() const { return probs_; }
    const std::string& name() const { return name_; }
    double prob(StateLabel state) const;

private:
    EveStrategy(Bb84Variant variant, std::array<double, 4> probs, std::string name);
    Bb84Variant variant_;
    std::array<double, 4> probs_;
    std::string name_;
};

// P(guess == Bob's sifted outcome) = <strategy, distribution>. The strategy
// and distribution must share a support (same variant).
double eve_success(const EveStrategy& strategy, const OutcomeDistribution& distribution);

struct BestGuess {
    StateLabel state;
    double success;
};

// The best single-state bet; ties resolve to the earliest state in catalog
// order.
BestGuess best_deterministic_guess(const OutcomeDistribution& distribution);

// Same success probability computed without the closed form: enumerate the
// four preparations, push each through the numeric Kraus channel, and apply
// the Born rule in the sifted basis.
double eve_brute_force(const EveStrategy& strategy, Bb84Variant variant, double lambda);

}  // namespace qkd
