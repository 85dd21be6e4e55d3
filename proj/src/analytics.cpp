#include "qkdsim/analytics.hpp"

#include <cmath>
#include <numbers>

namespace qkd {

namespace {

void require_lambda(double lambda) {
    if (std::isnan(lambda) || lambda < 0.0 || lambda > 1.0) {
        throw ValidationError("decay fraction must lie in [0, 1]");
    }
}

}  // namespace

double bb84_success(double lambda) {
    require_lambda(lambda);
    const double survival = 1.0 - lambda;
    return 0.25 * (2.0 + survival + std::sqrt(survival));
}

double bb84_xy_success(double lambda) {
    require_lambda(lambda);
    return 0.5 * (1.0 + std::sqrt(1.0 - lambda));
}

double e91_phiplus_success(double lambda) {
    require_lambda(lambda);
    return 1.0 - lambda * (1.0 - lambda);
}

double e91_phiplus_min_time(double t1) {
    if (!(t1 > 0.0) || !std::isfinite(t1)) {
        throw ValidationError("T1 must be positive and finite");
    }
    return t1 * std::numbers::ln2;
}

double e91_psiplus_success(double lambda) {
    require_lambda(lambda);
    return 1.0 - lambda;
}

OutcomeDistribution::OutcomeDistribution(Bb84Variant variant, std::array<double, 4> probs)
    : variant_(variant), support_(variant_states(variant)), probs_(probs) {}

OutcomeDistribution OutcomeDistribution::sifted(Bb84Variant variant, double lambda) {
    require_lambda(lambda);
    switch (variant) {
        case Bb84Variant::ZX:
            // Preparations are uniform; the channel shifts Z mass from |1>
            // to |0> and leaves the X marginals balanced.
            return OutcomeDistribution(
                variant, {0.25 * (1.0 + lambda), 0.25 * (1.0 - lambda), 0.25, 0.25});
        case Bb84Variant::XY:
            // Both encoding bases sit on the equator, where the damping is
            // symmetric: every outcome stays equally likely.
            return OutcomeDistribution(variant, {0.25, 0.25, 0.25, 0.25});
    }
    throw ValidationError("unknown protocol variant");
}

double OutcomeDistribution::prob(StateLabel state) const {
    for (std::size_t i = 0; i < support_.size(); ++i)
        if (support_[i] == state) return probs_[i];
    throw ValidationError("state " + std::string(to_string(state)) +
                          " is outside the distribution's support");
}

EveStrategy::EveStrategy(Bb84Variant variant, std::array<double, 4> probs, std::string name)
    : variant_(variant), probs_(probs), name_(std::move(name)) {}

double EveStrategy::prob(StateLabel state) const {
    const auto support = variant_states(variant_);
    for (std::size_t i = 0; i < support.size(); ++i)
        if (support[i] == state) return probs_[i];
    throw ValidationError("state " + std::string(to_string(state)) +
                          " is outside the strategy's support");
}

EveStrategy EveStrategy::uniform(Bb84Variant variant) {
    return EveStrategy(variant, {0.25, 0.25, 0.25, 0.25}, "uniform");
}

EveStrategy EveStrategy::z_biased() {
    // Support order for Z/X is {0, 1, +, -}.
    return EveStrategy(Bb84Variant::ZX, {0.5, 0.0, 0.25, 0.25}, "z-biased");
}

EveStrategy EveStrategy::biased_default(Bb84Variant variant) {
    if (variant == Bb84Variant::ZX) return z_biased();
    // Support order for X/Y is {+, -, +i, -i}.
    return EveStrategy(Bb84Variant::XY, {0.25, 0.25, 0.5, 0.0}, "y-biased");
}

EveStrategy EveStrategy::from_probs(Bb84Variant variant, const std::array<double, 4>& probs,
                                    std::string name) {
    double sum = 0.0;
    for (double p : probs) {
        if (std::isnan(p) || p < 0.0) {
            throw ValidationError("strategy probabilities must be non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol::algebraic) {
        throw ValidationError("strategy probabilities must sum to 1");
    }
    return EveStrategy(variant, probs, std::move(name));
}

EveStrategy EveStrategy::random(Bb84Variant variant, RandomStream& rng) {
    // Exponential gaps normalized onto the simplex.
    std::array<double, 4> probs{};
    double sum = 0.0;
    for (double& p : probs) {
        p = -std::log(1.0 - rng.next_double());
        sum += p;
    }
    for (double& p : probs) p /= sum;
    return EveStrategy(variant, probs, "random");
}

double eve_success(const EveStrategy& strategy, const OutcomeDistribution& distribution) {
    if (strategy.variant() != distribution.variant()) {
        throw ValidationError("strategy and distribution have different supports");
    }
    double p = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        p += strategy.probabilities()[i] * distribution.probabilities()[i];
    }
    return p;
}

BestGuess best_deterministic_guess(const OutcomeDistribution& distribution) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < 4; ++i) {
        if (distribution.probabilities()[i] > distribution.probabilities()[best]) best = i;
    }
    return {distribution.support()[best], distribution.probabilities()[best]};
}

double eve_brute_force(const EveStrategy& strategy, Bb84Variant variant, double lambda) {
    if (strategy.variant() != variant) {
        throw ValidationError("strategy and variant have different supports");
    }
    require_lambda(lambda);
    const KrausChannel channel = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
    const auto states = variant_states(variant);
    double p = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
        // Sifted round: Bob measured in the basis Alice encoded in.
        const BasisKind basis = variant_bases(variant)[s / 2];
        const DensityMatrix evolved = channel.apply(DensityMatrix::of(states[s]));
        const auto outcome_dist = measure_distribution(evolved, basis);
        const auto eigenstates = basis_eigenstates(basis);
        for (std::size_t o = 0; o < 2; ++o) {
            p += 0.25 * outcome_dist[o] * strategy.prob(eigenstates[o]);
        }
    }
    return p;
}

}  // namespace qkd
