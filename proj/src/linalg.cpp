#include "qkdsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qkd {

namespace {

void require_dim(int dim) {
    if (dim != 2 && dim != 4) {
        throw ValidationError("matrix dimension must be 2 or 4, got " + std::to_string(dim));
    }
}

}  // namespace

CMat::CMat(int dim) : dim_(dim) {
    require_dim(dim);
}

CMat CMat::identity(int dim) {
    CMat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::adjoint() const {
    CMat out(dim_);
    for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
}

Complex CMat::trace() const {
    Complex t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double CMat::max_abs() const {
    double m = 0.0;
    for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) m = std::max(m, std::abs((*this)(r, c)));
    return m;
}

bool CMat::is_hermitian(double tolerance) const {
    return max_abs_diff(*this, adjoint()) <= tolerance;
}

CMat& CMat::operator+=(const CMat& o) {
    if (o.dim_ != dim_) throw ValidationError("matrix dimension mismatch");
    for (std::size_t i = 0; i < m_.size(); ++i) m_[i] += o.m_[i];
    return *this;
}

CMat& CMat::operator-=(const CMat& o) {
    if (o.dim_ != dim_) throw ValidationError("matrix dimension mismatch");
    for (std::size_t i = 0; i < m_.size(); ++i) m_[i] -= o.m_[i];
    return *this;
}

CMat operator*(const CMat& a, const CMat& b) {
    if (a.dim_ != b.dim_) throw ValidationError("matrix dimension mismatch");
    CMat out(a.dim_);
    for (int r = 0; r < a.dim_; ++r)
        for (int c = 0; c < a.dim_; ++c) {
            Complex s = 0.0;
            for (int k = 0; k < a.dim_; ++k) s += a(r, k) * b(k, c);
            out(r, c) = s;
        }
    return out;
}

CMat operator*(Complex s, const CMat& a) {
    CMat out(a.dim_);
    for (int r = 0; r < a.dim_; ++r)
        for (int c = 0; c < a.dim_; ++c) out(r, c) = s * a(r, c);
    return out;
}

double max_abs_diff(const CMat& a, const CMat& b) {
    if (a.dim() != b.dim()) throw ValidationError("matrix dimension mismatch");
    double m = 0.0;
    for (int r = 0; r < a.dim(); ++r)
        for (int c = 0; c < a.dim(); ++c) m = std::max(m, std::abs(a(r, c) - b(r, c)));
    return m;
}

CMat kron(const CMat& a, const CMat& b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw ValidationError("kron expects two single-qubit operators");
    }
    CMat out(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return out;
}

std::vector<double> hermitian_eigenvalues(const CMat& m) {
    if (!m.is_hermitian(1e-9)) {
        throw InvariantError("eigenvalues requested for a non-Hermitian matrix");
    }
    const int n = m.dim();
    if (n == 2) {
        const double a = m(0, 0).real();
        const double d = m(1, 1).real();
        const double mean = 0.5 * (a + d);
        const double h = 0.5 * (a - d);
        const double r = std::sqrt(h * h + std::norm(m(0, 1)));
        return {mean - r, mean + r};
    }

    // Cyclic Jacobi: conjugate by diag(1, e^{-i phi}) to make the pivot
    // real, then a real rotation annihilates it.
    CMat a = m;
    const double scale = std::max(a.max_abs(), 1.0);
    bool converged = false;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= 1e-15 * scale) {
            converged = true;
            break;
        }
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double beta = std::abs(a(p, q));
                if (beta <= 1e-300) continue;
                const Complex phase = a(p, q) / beta;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * beta);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // U = D R with D = diag(1, e^{-i phi}) on (p, q); A <- U^dag A U.
                const Complex upq = s;
                const Complex uqp = -s * std::conj(phase);
                const Complex uqq = c * std::conj(phase);
                for (int k = 0; k < n; ++k) {
                    const Complex rp = a(p, k);
                    const Complex rq = a(q, k);
                    a(p, k) = c * rp + std::conj(uqp) * rq;
                    a(q, k) = std::conj(upq) * rp + std::conj(uqq) * rq;
                }
                for (int k = 0; k < n; ++k) {
                    const Complex cp = a(k, p);
                    const Complex cq = a(k, q);
                    a(k, p) = c * cp + uqp * cq;
                    a(k, q) = upq * cp + uqq * cq;
                }
            }
        }
    }
    if (!converged) throw InvariantError("Jacobi eigenvalue iteration did not converge");
    std::vector<double> eigs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eigs[static_cast<std::size_t>(i)] = a(i, i).real();
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

CVec::CVec(int dim) : dim_(dim) {
    require_dim(dim);
}

CVec::CVec(std::initializer_list<Complex> amps) : dim_(static_cast<int>(amps.size())) {
    require_dim(dim_);
    int i = 0;
    for (const Complex& c : amps) a_[static_cast<std::size_t>(i++)] = c;
}

double CVec::norm() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += std::norm(a_[static_cast<std::size_t>(i)]);
    return std::sqrt(s);
}

CMat outer(const CVec& v) {
    if (std::abs(v.norm() - 1.0) > tol::norm) {
        throw ValidationError("outer product requires a normalized state vector");
    }
    CMat out(v.dim());
    for (int r = 0; r < v.dim(); ++r)
        for (int c = 0; c < v.dim(); ++c) out(r, c) = v[r] * std::conj(v[c]);
    return out;
}

}  // namespace qkd
