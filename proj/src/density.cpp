#include "qkdsim/density.hpp"

#include <cmath>
#include <string>

namespace qkd {

namespace {

CMat observable_matrix(ObservableKind kind) {
    const double r = 1.0 / std::sqrt(2.0);
    CMat m(2);
    switch (kind) {
        case ObservableKind::Z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            return m;
        case ObservableKind::X:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            return m;
        case ObservableKind::Y:
            m(0, 1) = Complex(0.0, -1.0);
            m(1, 0) = Complex(0.0, 1.0);
            return m;
        case ObservableKind::ZPlusX:
            m(0, 0) = r;
            m(0, 1) = r;
            m(1, 0) = r;
            m(1, 1) = -r;
            return m;
        case ObservableKind::ZMinusX:
            m(0, 0) = r;
            m(0, 1) = -r;
            m(1, 0) = -r;
            m(1, 1) = -r;
            return m;
    }
    throw ValidationError("unknown observable");
}

double clamp_probability(double p, const char* what) {
    if (p < tol::clamp_floor) {
        throw InvariantError(std::string(what) + " is negative beyond tolerance");
    }
    if (p > 1.0 + 1e-10) {
        throw InvariantError(std::string(what) + " exceeds 1 beyond tolerance");
    }
    if (p < 0.0) return 0.0;
    if (p > 1.0) return 1.0;
    return p;
}

}  // namespace

DensityMatrix DensityMatrix::pure(const CVec& v) {
    return DensityMatrix(outer(v));
}

DensityMatrix DensityMatrix::from_matrix(const CMat& m) {
    if (!m.is_hermitian()) {
        throw ValidationError("density matrix is not Hermitian within tolerance");
    }
    if (std::abs(m.trace() - Complex(1.0)) > tol::algebraic) {
        throw ValidationError("density matrix trace differs from 1 beyond tolerance");
    }
    const std::vector<double> eigs = hermitian_eigenvalues(m);
    if (eigs.front() < tol::psd_floor) {
        throw ValidationError("density matrix has an eigenvalue below the PSD floor");
    }
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
    CMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0 / dim;
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::of(StateLabel label) {
    return pure(canonical_state(label));
}

DensityMatrix to_density(const CVec& v) {
    return DensityMatrix::pure(v);
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw ValidationError("tensor of density matrices expects two single-qubit states");
    }
    return DensityMatrix::from_matrix(kron(a.matrix(), b.matrix()));
}

Observable Observable::make(ObservableKind kind) {
    return Observable(kind, observable_matrix(kind));
}

CMat Observable::projector(bool plus) const {
    const double sign = plus ? 1.0 : -1.0;
    CMat p = CMat::identity(2);
    p += sign * m_;
    return Complex(0.5) * p;
}

CMat tensor(const Observable& a, const Observable& b) {
    return kron(a.matrix(), b.matrix());
}

double expectation(const CMat& obs, const DensityMatrix& rho) {
    if (obs.dim() != rho.dim()) throw ValidationError("observable and state dimensions differ");
    Complex t = 0.0;
    for (int r = 0; r < obs.dim(); ++r)
        for (int c = 0; c < obs.dim(); ++c) t += obs(r, c) * rho.matrix()(c, r);
    if (std::abs(t.imag()) > tol::algebraic) {
        throw InvariantError("expectation value has a non-vanishing imaginary part");
    }
    return t.real();
}

std::vector<double> measure_distribution(const DensityMatrix& rho, std::span<const BasisKind> bases) {
    const int n = rho.qubit_count();
    if (static_cast<int>(bases.size()) != n) {
        throw ValidationError("one measurement basis per qubit is required");
    }
    const int outcomes = 1 << n;
    std::vector<double> dist(static_cast<std::size_t>(outcomes));
    double sum = 0.0;
    for (int o = 0; o < outcomes; ++o) {
        CMat proj = outer(canonical_state(basis_eigenstates(bases[0])[(o >> (n - 1)) & 1]));
        if (n == 2) {
            proj = kron(proj, outer(canonical_state(basis_eigenstates(bases[1])[o & 1])));
        }
        const double p = clamp_probability(expectation(proj, rho), "measurement probability");
        dist[static_cast<std::size_t>(o)] = p;
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol::algebraic) {
        throw InvariantError("measurement distribution does not sum to 1 within tolerance");
    }
    return dist;
}

std::vector<double> measure_distribution(const DensityMatrix& rho, BasisKind basis) {
    const BasisKind bases[1] = {basis};
    return measure_distribution(rho, std::span<const BasisKind>(bases, 1));
}

std::array<double, 4> joint_outcome_distribution(const Observable& a, const Observable& b,
                                                 const DensityMatrix& rho) {
    if (rho.dim() != 4) throw ValidationError("joint outcomes require a two-qubit state");
    std::array<double, 4> dist{};
    double sum = 0.0;
    for (int o = 0; o < 4; ++o) {
        const CMat proj = kron(a.projector((o & 2) == 0), b.projector((o & 1) == 0));
        const double p = clamp_probability(expectation(proj, rho), "joint outcome probability");
        dist[static_cast<std::size_t>(o)] = p;
        sum += p;
    }
    if (std::abs(sum - 1.0) > tol::algebraic) {
        throw InvariantError("joint outcome distribution does not sum to 1 within tolerance");
    }
    return dist;
}

}  // namespace qkd
