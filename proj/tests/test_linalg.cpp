#include <doctest.h>

#include <cmath>
#include <complex>

#include "qkdsim/linalg.hpp"
#include "qkdsim/rng.hpp"

using namespace qkd;

namespace {
const Complex I{0.0, 1.0};
}

TEST_CASE("identity, trace and adjoint") {
    CMat id = CMat::identity(2);
    CHECK(id(0, 0) == Complex{1.0, 0.0});
    CHECK(id(0, 1) == Complex{0.0, 0.0});
    CHECK(id.trace() == Complex{2.0, 0.0});

    CMat m(2);
    m(0, 0) = 1.0;
    m(0, 1) = Complex{2.0, 3.0};
    m(1, 0) = 5.0;
    m(1, 1) = Complex{0.0, -1.0};
    CMat adj = m.adjoint();
    CHECK(adj(0, 0) == Complex{1.0, 0.0});
    CHECK(adj(1, 0) == Complex{2.0, -3.0});
    CHECK(adj(0, 1) == Complex{5.0, 0.0});
    CHECK(adj(1, 1) == Complex{0.0, 1.0});
    CHECK(m.max_abs() == doctest::Approx(5.0));
    CHECK_FALSE(m.is_hermitian());
}

TEST_CASE("matrix product against a hand-multiplied pair") {
    CMat a(2), b(2);
    a(0, 0) = 1.0; a(0, 1) = I;
    a(1, 0) = 0.0; a(1, 1) = 2.0;
    b(0, 0) = 3.0; b(0, 1) = 1.0;
    b(1, 0) = -I;  b(1, 1) = 4.0;
    CMat c = a * b;
    // row 0: [3 + i*(-i), 1 + 4i] = [4, 1+4i]
    CHECK(std::abs(c(0, 0) - Complex{4.0, 0.0}) < 1e-15);
    CHECK(std::abs(c(0, 1) - Complex{1.0, 4.0}) < 1e-15);
    CHECK(std::abs(c(1, 0) - Complex{0.0, -2.0}) < 1e-15);
    CHECK(std::abs(c(1, 1) - Complex{8.0, 0.0}) < 1e-15);
}

TEST_CASE("kron places the left factor on the first qubit") {
    CMat z(2);
    z(0, 0) = 1.0; z(1, 1) = -1.0;
    CMat id = CMat::identity(2);
    CMat zi = kron(z, id);
    // diag(1, 1, -1, -1)
    CHECK(zi(0, 0) == Complex{1.0, 0.0});
    CHECK(zi(1, 1) == Complex{1.0, 0.0});
    CHECK(zi(2, 2) == Complex{-1.0, 0.0});
    CHECK(zi(3, 3) == Complex{-1.0, 0.0});
    CHECK(zi.trace() == Complex{0.0, 0.0});
    CMat iz = kron(id, z);
    CHECK(iz(1, 1) == Complex{-1.0, 0.0});
    CHECK(iz(2, 2) == Complex{1.0, 0.0});
}

TEST_CASE("closed-form eigenvalues of a 2x2 Hermitian matrix") {
    CMat m(2);
    m(0, 0) = 2.0;
    m(0, 1) = Complex{0.0, -1.0};
    m(1, 0) = Complex{0.0, 1.0};
    m(1, 1) = 2.0;
    auto ev = hermitian_eigenvalues(m);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi eigenvalues of a known 4x4") {
    // diag(4, 1, 3, 2) conjugated by a permutation is still diag in disguise.
    CMat m(4);
    m(0, 0) = 4.0;
    m(1, 1) = 1.0;
    m(2, 2) = 3.0;
    m(3, 3) = 2.0;
    m(0, 3) = Complex{0.0, 0.5};
    m(3, 0) = Complex{0.0, -0.5};
    auto ev = hermitian_eigenvalues(m);
    REQUIRE(ev.size() == 4);
    // analytic eigenvalues of the coupled (0,3) block: 3 +/- sqrt(1.25)
    const double lo = 3.0 - std::sqrt(1.25);
    const double hi = 3.0 + std::sqrt(1.25);
    CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ev[1] == doctest::Approx(lo).epsilon(1e-10));
    CHECK(ev[2] == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(ev[3] == doctest::Approx(hi).epsilon(1e-10));
}

TEST_CASE("jacobi eigenvalue sums match traces on random Hermitian matrices") {
    RandomStream rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        CMat m(4);
        for (int r = 0; r < 4; ++r) {
            m(r, r) = 2.0 * rng.next_double() - 1.0;
            for (int c = r + 1; c < 4; ++c) {
                const Complex v{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0};
                m(r, c) = v;
                m(c, r) = std::conj(v);
            }
        }
        auto ev = hermitian_eigenvalues(m);
        double sum = 0.0, sq = 0.0;
        for (double e : ev) {
            sum += e;
            sq += e * e;
        }
        // trace and Frobenius norm are rotation invariants
        CHECK(sum == doctest::Approx(m.trace().real()).epsilon(1e-9));
        double frob = 0.0;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) frob += std::norm(m(r, c));
        CHECK(sq == doctest::Approx(frob).epsilon(1e-9));
        CHECK(std::is_sorted(ev.begin(), ev.end()));
    }
}

TEST_CASE("vectors validate and outer products are projectors") {
    CVec v{Complex{1.0 / std::sqrt(2.0), 0.0}, Complex{0.0, 1.0 / std::sqrt(2.0)}};
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CMat p = outer(v);
    CHECK(p.is_hermitian());
    CHECK(p.trace().real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(max_abs_diff(p * p, p) < 1e-14);

    CVec bad{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
    CHECK_THROWS_AS(outer(bad), ValidationError);
}

TEST_CASE("dimension mismatches are rejected") {
    CHECK_THROWS_AS(CMat(3), ValidationError);
    CHECK_THROWS_AS(CVec(5), ValidationError);
    CMat a(2);
    CMat b(4);
    CHECK_THROWS_AS(a * b, ValidationError);
    CHECK_THROWS_AS(max_abs_diff(a, b), ValidationError);
}
