#pragma once

#include <complex>

namespace ptscat {

using complex = std::complex<double>;

// Value and x-derivative of a Jost solution at one (x, z).
struct JostValue {
    complex value{};
    complex dx{};
};

// Wronskians, their normalized variants, and the scattering-matrix entries at
// one spectral point z. Unnormalized fields may carry NaN (with `pole_set`
// raised) when z sits on the Gamma-pole set i*Z; the normalized fields are
// always populated.
struct ScatteringData {
    complex z{};
    complex w{};
    complex s_plus{};
    complex s_minus{};
    complex W{};
    complex S_plus{};
    complex S_minus{};
    complex T{};
    complex R_plus{};
    complex R_minus{};
    bool pole_set = false; // z within tolerance of i*Z: unnormalized fields invalid
};

// Wronskian [f, g] = f g' - g f'.
inline complex wronskian(const JostValue& f, const JostValue& g) {
    return f.value * g.dx - g.value * f.dx;
}

} // namespace ptscat
