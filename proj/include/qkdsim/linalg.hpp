#pragma once

#include <array>
#include <complex>
#include <initializer_list>
#include <vector>

#include "qkdsim/error.hpp"

namespace qkd {

using Complex = std::complex<double>;

namespace tol {

// Algebraic identities: Hermiticity, unit trace, Kraus completeness,
// closed-form agreement.
inline constexpr double algebraic = 1e-12;

// Smallest admissible eigenvalue of a density matrix.
inline constexpr double psd_floor = -1e-10;

// Probabilities in [clamp_floor, 0) are rounding noise and snap to 0;
// anything below is an invariant violation.
inline constexpr double clamp_floor = -1e-10;

// State-vector normalization.
inline constexpr double norm = 1e-12;

}  // namespace tol

// Dense row-major complex matrix of dimension 2 or 4 (one or two qubits).
class CMat {
public:
    explicit CMat(int dim);

    static CMat zero(int dim) { return CMat(dim); }
    static CMat identity(int dim);

    int dim() const { return dim_; }

    Complex& operator()(int r, int c) { return m_[static_cast<std::size_t>(r * dim_ + c)]; }
    const Complex& operator()(int r, int c) const { return m_[static_cast<std::size_t>(r * dim_ + c)]; }

    CMat adjoint() const;
    Complex trace() const;
    double max_abs() const;
    bool is_hermitian(double tolerance = tol::algebraic) const;

    CMat& operator+=(const CMat& o);
    CMat& operator-=(const CMat& o);

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(const CMat& a, const CMat& b);
    friend CMat operator*(Complex s, const CMat& a);

private:
    int dim_;
    std::array<Complex, 16> m_{};
};

double max_abs_diff(const CMat& a, const CMat& b);

// Kronecker product of two single-qubit operators; the left operand acts on
// the first qubit.
CMat kron(const CMat& a, const CMat& b);

// All eigenvalues of a Hermitian matrix, ascending. Closed form for dim 2,
// cyclic complex Jacobi rotations for dim 4.
std::vector<double> hermitian_eigenvalues(const CMat& m);

// State vector of dimension 2 or 4.
class CVec {
public:
    explicit CVec(int dim);
    CVec(std::initializer_list<Complex> amps);

    int dim() const { return dim_; }
    Complex& operator[](int i) { return a_[static_cast<std::size_t>(i)]; }
    const Complex& operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }

    double norm() const;

private:
    int dim_;
    std::array<Complex, 4> a_{};
};

// |v><v| for a normalized vector.
CMat outer(const CVec& v);

}  // namespace qkd
