#pragma once

#include <string>

namespace escat {

// Unit system: energies in cm^-1, lengths in Angstrom, masses in amu.
// Everything funnels through one conversion constant,
//   hbar^2 / (2 * amu * A^2) expressed in cm^-1,
// evaluated from CODATA-2018 values of hbar, the unified atomic mass unit
// and hc.  A channel with reduced mass mu (amu) and kinetic energy E (cm^-1)
// has wavenumber k = sqrt(E * mu / hbar2_over_2amuA2_cm1) in A^-1.
struct PhysicalConstants {
    double hbar2_over_2amuA2_cm1 = 16.85762917098219;
    double mass_H2_amu = 2.01588;  // 2 x m(H), atomic weight
    double B_cm1 = 59.3;           // ground-state rotational constant, configurable
    double vib_spacing_cm1 = 4161.0;

    double reduced_mass_h2h2() const { return 0.5 * mass_H2_amu; }
};

// Reads a `key value` structured text file (comments start with '#').
// Recognized keys: hbar2_over_2amuA2_cm1, mass_H2_amu, B_cm1, vib_spacing_cm1.
// Unknown keys are rejected.  Missing keys keep their defaults.
PhysicalConstants load_constants(const std::string& path);

PhysicalConstants default_constants();

}  // namespace escat
