#include "qkdsim/verify.hpp"

#include <cmath>
#include <sstream>

#include "qkdsim/analytics.hpp"
#include "qkdsim/channel.hpp"
#include "qkdsim/rng.hpp"

namespace qkd {

namespace {

std::vector<double> lambda_grid(double step, bool include_one) {
    std::vector<double> grid;
    for (double v = 0.0; v < 1.0 - 1e-9; v += step) grid.push_back(v);
    if (include_one) grid.push_back(1.0);
    return grid;
}

std::string residual_detail(double residual, double tolerance) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << "max residual " << residual << " (tol " << tolerance << ")";
    return os.str();
}

SuiteResult kraus_completeness() {
    double residual = 0.0;
    for (double lambda : lambda_grid(0.05, true)) {
        const KrausChannel one = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
        residual = std::max(residual, one.completeness_residual());
        residual = std::max(residual, one.lift_two_qubit().completeness_residual());
    }
    return {"kraus-completeness", residual <= tol::algebraic,
            residual_detail(residual, tol::algebraic)};
}

SuiteResult oracle_equivalence() {
    const StateLabel labels[] = {StateLabel::S0,     StateLabel::S1,    StateLabel::Plus,
                                 StateLabel::Minus,  StateLabel::PlusI, StateLabel::MinusI,
                                 StateLabel::PhiPlus, StateLabel::PsiPlus};
    double residual = 0.0;
    for (double lambda : lambda_grid(0.05, true)) {
        const KrausChannel one = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
        const KrausChannel two = one.lift_two_qubit();
        for (StateLabel label : labels) {
            const KrausChannel& channel = is_bell_state(label) ? two : one;
            const DensityMatrix numeric = channel.apply(DensityMatrix::of(label));
            const DensityMatrix closed = evolved_analytic(label, lambda);
            residual = std::max(residual, max_abs_diff(numeric.matrix(), closed.matrix()));
        }
    }
    return {"oracle-equivalence", residual <= tol::algebraic,
            residual_detail(residual, tol::algebraic)};
}

SuiteResult channel_invariants() {
    std::ostringstream detail;
    bool ok = true;

    double trace_residual = 0.0;
    const StateLabel catalog[] = {StateLabel::S0,      StateLabel::S1,       StateLabel::Plus,
                                  StateLabel::Minus,   StateLabel::PlusI,    StateLabel::MinusI,
                                  StateLabel::PhiPlus, StateLabel::PhiMinus, StateLabel::PsiPlus,
                                  StateLabel::PsiMinus};
    for (double lambda : lambda_grid(0.1, true)) {
        const KrausChannel one = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
        const KrausChannel two = one.lift_two_qubit();
        for (StateLabel label : catalog) {
            const KrausChannel& channel = is_bell_state(label) ? two : one;
            const DensityMatrix out = channel.apply(DensityMatrix::of(label));
            trace_residual = std::max(trace_residual, std::abs(out.matrix().trace() - Complex(1.0)));
        }
    }
    ok = ok && trace_residual <= tol::algebraic;

    // The ground state is an exact fixed point for every decay fraction.
    double fixed_residual = 0.0;
    for (double lambda : lambda_grid(0.1, true)) {
        const KrausChannel one = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
        fixed_residual = std::max(
            fixed_residual, max_abs_diff(one.apply(DensityMatrix::of(StateLabel::S0)).matrix(),
                                         DensityMatrix::of(StateLabel::S0).matrix()));
        const DensityMatrix ground2 = tensor(DensityMatrix::of(StateLabel::S0),
                                             DensityMatrix::of(StateLabel::S0));
        fixed_residual = std::max(
            fixed_residual, max_abs_diff(one.lift_two_qubit().apply(ground2).matrix(),
                                         ground2.matrix()));
    }
    ok = ok && fixed_residual <= 1e-15;

    // Excited-state survival decays strictly.
    bool monotone = true;
    double previous = 2.0;
    for (double lambda : lambda_grid(0.05, true)) {
        const KrausChannel one = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
        const double survival =
            measure_distribution(one.apply(DensityMatrix::of(StateLabel::S1)), BasisKind::Z)[1];
        monotone = monotone && survival < previous;
        previous = survival;
    }
    ok = ok && monotone;

    // X and Y eigenstates decohere identically up to the basis phase.
    double symmetry_residual = 0.0;
    for (double lambda : lambda_grid(0.05, true)) {
        const KrausChannel one = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
        const DensityMatrix x = one.apply(DensityMatrix::of(StateLabel::Plus));
        const DensityMatrix y = one.apply(DensityMatrix::of(StateLabel::PlusI));
        symmetry_residual = std::max(symmetry_residual,
                                     std::abs(x.matrix()(0, 0).real() - y.matrix()(0, 0).real()));
        symmetry_residual = std::max(symmetry_residual,
                                     std::abs(std::abs(x.matrix()(0, 1)) - std::abs(y.matrix()(0, 1))));
    }
    ok = ok && symmetry_residual <= tol::algebraic;

    detail << residual_detail(std::max({trace_residual, fixed_residual, symmetry_residual}),
                              tol::algebraic)
           << (monotone ? ", survival strictly decreasing" : ", survival NOT monotone");
    return {"channel-invariants", ok, detail.str()};
}

SuiteResult observable_algebra() {
    const ObservableKind kinds[] = {ObservableKind::Z, ObservableKind::X, ObservableKind::Y,
                                    ObservableKind::ZPlusX, ObservableKind::ZMinusX};
    double residual = 0.0;
    for (ObservableKind kind : kinds) {
        const Observable o = Observable::make(kind);
        residual = std::max(residual,
                            max_abs_diff(o.matrix() * o.matrix(), CMat::identity(2)));
        const auto eigs = hermitian_eigenvalues(o.matrix());
        residual = std::max(residual, std::abs(eigs.front() + 1.0));
        residual = std::max(residual, std::abs(eigs.back() - 1.0));
        residual = std::max(residual, max_abs_diff(o.projector(true) + o.projector(false),
                                                   CMat::identity(2)));
    }
    return {"observable-algebra", residual <= tol::algebraic,
            residual_detail(residual, tol::algebraic)};
}

SuiteResult born_rule() {
    double residual = 0.0;
    const BasisKind bases[] = {BasisKind::Z, BasisKind::X, BasisKind::Y};
    const StateLabel singles[] = {StateLabel::S0,    StateLabel::S1,    StateLabel::Plus,
                                  StateLabel::Minus, StateLabel::PlusI, StateLabel::MinusI};
    for (double lambda : lambda_grid(0.1, true)) {
        const KrausChannel one = KrausChannel::relaxation(RelaxationParams::from_lambda(lambda));
        for (StateLabel label : singles) {
            const DensityMatrix rho = one.apply(DensityMatrix::of(label));
            for (BasisKind basis : bases) {
                const auto dist = measure_distribution(rho, basis);
                residual = std::max(residual, std::abs(dist[0] + dist[1] - 1.0));
            }
        }
        const KrausChannel two = one.lift_two_qubit();
        const DensityMatrix bell = two.apply(DensityMatrix::of(StateLabel::PhiPlus));
        for (BasisKind ba : bases) {
            for (BasisKind bb : bases) {
                const BasisKind pair[2] = {ba, bb};
                const auto dist = measure_distribution(bell, std::span<const BasisKind>(pair, 2));
                double sum = 0.0;
                for (double p : dist) sum += p;
                residual = std::max(residual, std::abs(sum - 1.0));
            }
        }
    }
    return {"born-rule", residual <= tol::algebraic, residual_detail(residual, tol::algebraic)};
}

SuiteResult eve_identities() {
    double residual = 0.0;
    RandomStream rng(0x5EEDu);
    for (double lambda : lambda_grid(0.05, true)) {
        const OutcomeDistribution zx = OutcomeDistribution::sifted(Bb84Variant::ZX, lambda);
        const EveStrategy biased = EveStrategy::z_biased();
        residual = std::max(residual, std::abs(eve_success(biased, zx) - (0.25 + lambda / 8.0)));
        residual = std::max(residual,
                            std::abs(eve_success(biased, zx) -
                                     eve_brute_force(biased, Bb84Variant::ZX, lambda)));
        residual = std::max(residual,
                            std::abs(eve_success(EveStrategy::uniform(Bb84Variant::ZX), zx) - 0.25));
        for (int i = 0; i < 25; ++i) {
            const EveStrategy random = EveStrategy::random(Bb84Variant::ZX, rng);
            residual = std::max(residual,
                                std::abs(eve_success(random, zx) -
                                         eve_brute_force(random, Bb84Variant::ZX, lambda)));
        }
    }
    return {"eve-brute-force", residual <= tol::algebraic,
            residual_detail(residual, tol::algebraic)};
}

SuiteResult xy_neutralization() {
    double residual = 0.0;
    RandomStream rng(0x5EED2u);
    for (double lambda : lambda_grid(0.1, true)) {
        const OutcomeDistribution xy = OutcomeDistribution::sifted(Bb84Variant::XY, lambda);
        for (int i = 0; i < 100; ++i) {
            const EveStrategy random = EveStrategy::random(Bb84Variant::XY, rng);
            residual = std::max(residual, std::abs(eve_success(random, xy) - 0.25));
            residual = std::max(residual,
                                std::abs(eve_brute_force(random, Bb84Variant::XY, lambda) - 0.25));
        }
    }
    return {"xy-neutralization", residual <= tol::algebraic,
            residual_detail(residual, tol::algebraic)};
}

SuiteResult chsh_bounds() {
    const double bound = 2.0 * std::sqrt(2.0);
    double residual = 0.0;

    const ChshEstimate fresh = chsh_analytic(DensityMatrix::of(StateLabel::PsiMinus));
    residual = std::max(residual, std::abs(fresh.s_value - bound));
    residual = std::max(residual, std::abs(fresh.correlations[0] + 1.0 / std::sqrt(2.0)));
    residual = std::max(residual, std::abs(chsh_analytic(DensityMatrix::maximally_mixed(4)).s_value));

    bool below_bound = true;
    bool signed_sum_monotone = true;
    double previous_sum = -1e9;
    for (double lambda : lambda_grid(0.05, true)) {
        const KrausChannel two =
            KrausChannel::relaxation(RelaxationParams::from_lambda(lambda)).lift_two_qubit();
        const ChshEstimate est = chsh_analytic(two.apply(DensityMatrix::of(StateLabel::PsiMinus)));
        below_bound = below_bound && est.s_value <= bound + tol::algebraic;
        if (lambda > 0.0) below_bound = below_bound && est.s_value < bound;
        const double signed_sum = est.correlations[0] + est.correlations[1] +
                                  est.correlations[2] - est.correlations[3];
        signed_sum_monotone = signed_sum_monotone && signed_sum > previous_sum;
        previous_sum = signed_sum;
    }

    std::ostringstream detail;
    detail << residual_detail(residual, tol::algebraic)
           << (below_bound ? ", decayed S below the quantum bound" : ", bound violated")
           << (signed_sum_monotone ? ", signed sum strictly increasing" : ", trend broken");
    return {"chsh-bounds", residual <= tol::algebraic && below_bound && signed_sum_monotone,
            detail.str()};
}

}  // namespace

std::vector<SuiteResult> run_verification() {
    return {kraus_completeness(), oracle_equivalence(), channel_invariants(),
            observable_algebra(),  born_rule(),          eve_identities(),
            xy_neutralization(),   chsh_bounds()};
}

bool all_passed(const std::vector<SuiteResult>& suites) {
    for (const SuiteResult& s : suites)
        if (!s.passed) return false;
    return true;
}

std::string format_verification(const std::vector<SuiteResult>& suites) {
    std::size_t width = 0;
    for (const SuiteResult& s : suites) width = std::max(width, s.name.size());
    std::ostringstream os;
    for (const SuiteResult& s : suites) {
        os << s.name << std::string(width - s.name.size() + 2, ' ')
           << (s.passed ? "PASS" : "FAIL") << "  " << s.detail << "\n";
    }
    os << (all_passed(suites) ? "all suites passed" : "verification FAILED") << "\n";
    return os.str();
}

}  // namespace qkd
