#pragma once

#include <string>

#include "qcevo/genome.hpp"

namespace qcevo {

// ASCII wire diagram: one line per qubit, one column per gate in the
// genome's sorted (depth, innovation) order. Controls render as '*', boxed
// labels carry parameters to 3 decimals, swaps render as 'x', and wires a
// gate spans pass through as '|'. Disabled gates keep their column but use
// 'o' controls and <angle-bracket> boxes so they stand out.
std::string render_circuit(const CircuitGenome& genome);

}  // namespace qcevo
