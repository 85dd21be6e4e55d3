#include "qkdsim/states.hpp"

#include <cmath>

namespace qkd {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const Complex kI(0.0, 1.0);
}  // namespace

CVec canonical_state(StateLabel label) {
    const double r = kInvSqrt2;
    switch (label) {
        case StateLabel::S0: return CVec{1.0, 0.0};
        case StateLabel::S1: return CVec{0.0, 1.0};
        case StateLabel::Plus: return CVec{r, r};
        case StateLabel::Minus: return CVec{r, -r};
        case StateLabel::PlusI: return CVec{r, kI * r};
        case StateLabel::MinusI: return CVec{r, -kI * r};
        case StateLabel::PhiPlus: return CVec{r, 0.0, 0.0, r};
        case StateLabel::PhiMinus: return CVec{r, 0.0, 0.0, -r};
        case StateLabel::PsiPlus: return CVec{0.0, r, r, 0.0};
        case StateLabel::PsiMinus: return CVec{0.0, r, -r, 0.0};
    }
    throw ValidationError("unknown state label");
}

int qubit_count(StateLabel label) {
    return is_bell_state(label) ? 2 : 1;
}

bool is_bell_state(StateLabel label) {
    switch (label) {
        case StateLabel::PhiPlus:
        case StateLabel::PhiMinus:
        case StateLabel::PsiPlus:
        case StateLabel::PsiMinus: return true;
        default: return false;
    }
}

std::array<StateLabel, 2> basis_eigenstates(BasisKind basis) {
    switch (basis) {
        case BasisKind::Z: return {StateLabel::S0, StateLabel::S1};
        case BasisKind::X: return {StateLabel::Plus, StateLabel::Minus};
        case BasisKind::Y: return {StateLabel::PlusI, StateLabel::MinusI};
    }
    throw ValidationError("unknown basis");
}

std::string_view to_string(StateLabel label) {
    switch (label) {
        case StateLabel::S0: return "0";
        case StateLabel::S1: return "1";
        case StateLabel::Plus: return "+";
        case StateLabel::Minus: return "-";
        case StateLabel::PlusI: return "+i";
        case StateLabel::MinusI: return "-i";
        case StateLabel::PhiPlus: return "phi_plus";
        case StateLabel::PhiMinus: return "phi_minus";
        case StateLabel::PsiPlus: return "psi_plus";
        case StateLabel::PsiMinus: return "psi_minus";
    }
    return "?";
}

std::string_view to_string(BasisKind basis) {
    switch (basis) {
        case BasisKind::Z: return "Z";
        case BasisKind::X: return "X";
        case BasisKind::Y: return "Y";
    }
    return "?";
}

}  // namespace qkd
