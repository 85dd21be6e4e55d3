#pragma once

#include <span>
#include <vector>

#include "qkdsim/linalg.hpp"
#include "qkdsim/states.hpp"

namespace qkd {

// Validated density matrix: Hermitian, unit trace, positive semidefinite
// within tolerance. Construction is the only place these checks run; every
// instance is well-formed afterwards.
class DensityMatrix {
public:
    // |v><v| for a normalized state vector.
    static DensityMatrix pure(const CVec& v);

    // Validates Hermiticity (1e-12), unit trace (1e-12) and the eigenvalue
    // floor (-1e-10).
    static DensityMatrix from_matrix(const CMat& m);

    static DensityMatrix maximally_mixed(int dim);
    static DensityMatrix of(StateLabel label);

    const CMat& matrix() const { return m_; }
    int dim() const { return m_.dim(); }
    int qubit_count() const { return m_.dim() == 2 ? 1 : 2; }

private:
    explicit DensityMatrix(CMat m) : m_(m) {}
    CMat m_;
};

DensityMatrix to_density(const CVec& v);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

// A +/-1-valued single-qubit observable. All five used here square to the
// identity, so the eigenprojectors are (I +/- M)/2 and no eigensolver is
// needed on the hot path.
enum class ObservableKind : int {
    Z = 0,
    X,
    Y,
    ZPlusX,   // (Z + X)/sqrt(2)
    ZMinusX,  // (Z - X)/sqrt(2)
};

class Observable {
public:
    static Observable make(ObservableKind kind);

    ObservableKind kind() const { return kind_; }
    const CMat& matrix() const { return m_; }

    // Eigenprojector onto the +1 (plus = true) or -1 eigenspace.
    CMat projector(bool plus) const;

private:
    Observable(ObservableKind kind, CMat m) : kind_(kind), m_(m) {}
    ObservableKind kind_;
    CMat m_;
};

CMat tensor(const Observable& a, const Observable& b);

// Re tr(obs * rho); the imaginary part must vanish within 1e-12.
double expectation(const CMat& obs, const DensityMatrix& rho);

// Born-rule outcome distribution for a projective measurement of each qubit
// in its own basis. Outcomes are indexed with the first qubit as the most
// significant bit; probabilities are clamped at -1e-10 and must sum to 1
// within 1e-12.
std::vector<double> measure_distribution(const DensityMatrix& rho, std::span<const BasisKind> bases);
std::vector<double> measure_distribution(const DensityMatrix& rho, BasisKind basis);

// Joint +/-1 outcome distribution for local observables a (first qubit) and
// b (second qubit), indexed 2*(a outcome is -1) + (b outcome is -1).
std::array<double, 4> joint_outcome_distribution(const Observable& a, const Observable& b,
                                                 const DensityMatrix& rho);

}  // namespace qkd
