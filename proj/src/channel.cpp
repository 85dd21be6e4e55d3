#include "qkdsim/channel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace qkd {

RelaxationParams RelaxationParams::from_time(double t, double t1) {
    if (!(t1 > 0.0) || !std::isfinite(t1)) {
        throw ValidationError("T1 must be positive and finite");
    }
    if (std::isnan(t) || t < 0.0) {
        throw ValidationError("idle time must be non-negative");
    }
    // -expm1 keeps full precision for t << T1.
    const double lambda = std::isinf(t) ? 1.0 : -std::expm1(-t / t1);
    return RelaxationParams{t, t1, lambda};
}

RelaxationParams RelaxationParams::from_lambda(double lambda, double t1) {
    if (!(t1 > 0.0) || !std::isfinite(t1)) {
        throw ValidationError("T1 must be positive and finite");
    }
    if (std::isnan(lambda) || lambda < 0.0 || lambda > 1.0) {
        throw ValidationError("decay fraction must lie in [0, 1]");
    }
    const double t = lambda >= 1.0 ? std::numeric_limits<double>::infinity() : -t1 * std::log1p(-lambda);
    return RelaxationParams{t, t1, lambda};
}

KrausChannel::KrausChannel(std::vector<CMat> ops) : ops_(std::move(ops)) {
    const double residual = completeness_residual();
    if (residual > tol::algebraic) {
        throw InvariantError("Kraus completeness residual " + std::to_string(residual) +
                             " exceeds tolerance");
    }
}

KrausChannel KrausChannel::relaxation(const RelaxationParams& params) {
    if (std::isnan(params.lambda) || params.lambda < 0.0 || params.lambda > 1.0) {
        throw ValidationError("decay fraction must lie in [0, 1]");
    }
    CMat e1(2);
    e1(0, 0) = 1.0;
    e1(1, 1) = std::sqrt(1.0 - params.lambda);
    CMat e2(2);
    e2(0, 1) = std::sqrt(params.lambda);
    return KrausChannel({e1, e2});
}

KrausChannel KrausChannel::lift_two_qubit() const {
    if (dim() != 2) throw ValidationError("only a single-qubit channel can be lifted");
    std::vector<CMat> lifted;
    lifted.reserve(ops_.size() * ops_.size());
    for (const CMat& a : ops_)
        for (const CMat& b : ops_) lifted.push_back(kron(a, b));
    return KrausChannel(std::move(lifted));
}

double KrausChannel::completeness_residual() const {
    CMat sum(dim());
    for (const CMat& e : ops_) sum += e.adjoint() * e;
    return max_abs_diff(sum, CMat::identity(dim()));
}

DensityMatrix KrausChannel::apply(const DensityMatrix& rho) const {
    if (rho.dim() != dim()) {
        throw ValidationError("channel and state dimensions differ");
    }
    CMat out(dim());
    for (const CMat& e : ops_) out += e * rho.matrix() * e.adjoint();
    return DensityMatrix::from_matrix(out);
}

DensityMatrix evolved_analytic(StateLabel label, double lambda) {
    if (std::isnan(lambda) || lambda < 0.0 || lambda > 1.0) {
        throw ValidationError("decay fraction must lie in [0, 1]");
    }
    const double s = std::sqrt(1.0 - lambda);
    const Complex i(0.0, 1.0);
    switch (label) {
        case StateLabel::S0:
            return DensityMatrix::of(StateLabel::S0);
        case StateLabel::S1: {
            CMat m(2);
            m(0, 0) = lambda;
            m(1, 1) = 1.0 - lambda;
            return DensityMatrix::from_matrix(m);
        }
        case StateLabel::Plus:
        case StateLabel::Minus: {
            const double sign = label == StateLabel::Plus ? 1.0 : -1.0;
            CMat m(2);
            m(0, 0) = 0.5 * (1.0 + lambda);
            m(0, 1) = sign * 0.5 * s;
            m(1, 0) = sign * 0.5 * s;
            m(1, 1) = 0.5 * (1.0 - lambda);
            return DensityMatrix::from_matrix(m);
        }
        case StateLabel::PlusI:
        case StateLabel::MinusI: {
            // The coherence picks up the Y-eigenstate phase but damps with
            // the same sqrt(1 - lambda) factor as the X pair.
            const double sign = label == StateLabel::PlusI ? 1.0 : -1.0;
            CMat m(2);
            m(0, 0) = 0.5 * (1.0 + lambda);
            m(0, 1) = -sign * i * 0.5 * s;
            m(1, 0) = sign * i * 0.5 * s;
            m(1, 1) = 0.5 * (1.0 - lambda);
            return DensityMatrix::from_matrix(m);
        }
        case StateLabel::PhiPlus: {
            CMat m(4);
            m(0, 0) = 0.5 * (1.0 + lambda * lambda);
            m(0, 3) = 0.5 * (1.0 - lambda);
            m(3, 0) = 0.5 * (1.0 - lambda);
            m(1, 1) = 0.5 * lambda * (1.0 - lambda);
            m(2, 2) = 0.5 * lambda * (1.0 - lambda);
            m(3, 3) = 0.5 * (1.0 - lambda) * (1.0 - lambda);
            return DensityMatrix::from_matrix(m);
        }
        case StateLabel::PsiPlus: {
            CMat m(4);
            m(0, 0) = lambda;
            m(1, 1) = 0.5 * (1.0 - lambda);
            m(1, 2) = 0.5 * (1.0 - lambda);
            m(2, 1) = 0.5 * (1.0 - lambda);
            m(2, 2) = 0.5 * (1.0 - lambda);
            return DensityMatrix::from_matrix(m);
        }
        default:
            throw ValidationError("no closed-form evolution for state " +
                                  std::string(to_string(label)));
    }
}

}  // namespace qkd
