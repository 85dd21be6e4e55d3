#pragma once

#include <array>
#include <string_view>

#include "qkdsim/linalg.hpp"

namespace qkd {

// Catalog of preparable states: the Z, X and Y eigenstates plus the four
// Bell states.
enum class StateLabel : int {
    S0 = 0,   // |0>
    S1,       // |1>
    Plus,     // |+>
    Minus,    // |->
    PlusI,    // |+i>
    MinusI,   // |-i>
    PhiPlus,  // (|00> + |11>)/sqrt(2)
    PhiMinus, // (|00> - |11>)/sqrt(2)
    PsiPlus,  // (|01> + |10>)/sqrt(2)
    PsiMinus, // (|01> - |10>)/sqrt(2)
};

enum class BasisKind : int { Z = 0, X, Y };

CVec canonical_state(StateLabel label);
int qubit_count(StateLabel label);
bool is_bell_state(StateLabel label);

// The two orthonormal eigenstates of the basis, outcome 0 first.
std::array<StateLabel, 2> basis_eigenstates(BasisKind basis);

std::string_view to_string(StateLabel label);
std::string_view to_string(BasisKind basis);

}  // namespace qkd
