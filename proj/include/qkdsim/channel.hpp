#pragma once

#include <vector>

#include "qkdsim/density.hpp"

namespace qkd {

// Default relaxation time constant, in nanoseconds.
inline constexpr double kDefaultT1 = 188610.0;

// Idle-time relaxation parameters. The decay fraction is
//   lambda = 1 - exp(-t / T1),
// so lambda = 0 at t = 0 and lambda -> 1 as t -> infinity. lambda = 1
// (infinite idle time) is admitted as the fully decayed limit.
struct RelaxationParams {
    double t;       // idle time, ns; +infinity when lambda == 1
    double t1;      // time constant, ns
    double lambda;  // decay fraction in [0, 1]

    static RelaxationParams from_time(double t, double t1 = kDefaultT1);
    static RelaxationParams from_lambda(double lambda, double t1 = kDefaultT1);
};

// Kraus representation of the relaxation channel,
//   E1 = [[1, 0], [0, sqrt(1 - lambda)]],  E2 = [[0, sqrt(lambda)], [0, 0]],
// lifted to two qubits as the four products Ei (x) Ej. Completeness
// sum_k Ek^dag Ek = I is enforced at construction.
class KrausChannel {
public:
    static KrausChannel relaxation(const RelaxationParams& params);

    // Channel acting independently on each qubit of a two-qubit state.
    KrausChannel lift_two_qubit() const;

    int dim() const { return ops_.front().dim(); }
    const std::vector<CMat>& operators() const { return ops_; }

    // max |sum_k Ek^dag Ek - I| over entries.
    double completeness_residual() const;

    // rho -> sum_k Ek rho Ek^dag. Dimensions must match.
    DensityMatrix apply(const DensityMatrix& rho) const;

private:
    explicit KrausChannel(std::vector<CMat> ops);
    std::vector<CMat> ops_;
};

// Closed-form evolved density matrix for a catalog state after relaxation
// with decay fraction lambda. Supports the six single-qubit states plus
// phi_plus and psi_plus.
DensityMatrix evolved_analytic(StateLabel label, double lambda);

}  // namespace qkd
