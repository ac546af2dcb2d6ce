#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "escat/basis.hpp"

namespace escat {

// Pair state cos(a)|1>|2> + sin(a) e^{i b}|2>|1> over the two one-molecule
// labels; the +/- states are (a, b) = (pi/4, 0) and (pi/4, pi).
struct EntangledPairState {
    MoleculeLabels mol1;
    MoleculeLabels mol2;
    double alpha = M_PI / 4.0;
    double beta = 0.0;

    void validate() const;
    static EntangledPairState plus(const MoleculeLabels& a, const MoleculeLabels& b);
    static EntangledPairState minus(const MoleculeLabels& a, const MoleculeLabels& b);
};

// Two single-molecule superpositions cos(a_i)|1> + sin(a_i) e^{i b_i}|2>.
struct ProductPrep {
    MoleculeLabels mol1;
    MoleculeLabels mol2;
    double alpha1 = M_PI / 4.0, beta1 = 0.0;
    double alpha2 = M_PI / 4.0, beta2 = 0.0;

    void validate() const;
};

// Product state split into an entangled component y e^{i phase}|psi(a,b)>
// plus the two |11> and |22> satellites.
struct Decomposition {
    double y = 0.0;           // entangled-component amplitude
    double alpha = 0.0;       // in [0, pi/2]
    double beta = 0.0;
    double global_phase = 0.0;  // overall factor e^{i global_phase} of the entangled piece
    std::complex<double> satellite11;  // coefficient of |1>|1>
    std::complex<double> satellite22;  // coefficient of |2>|2>
};

enum class EntanglementCase { case_a, case_b, case_c, mixed };
std::string to_string(EntanglementCase c);

// c_+- = (cos a +- sin a e^{i b}) / sqrt(2); |c+|^2 + |c-|^2 = 1.
std::pair<std::complex<double>, std::complex<double>> pm_basis_coefficients(
    const EntangledPairState& state);
std::pair<std::complex<double>, std::complex<double>> pm_basis_coefficients(double alpha,
                                                                            double beta);

// y = sqrt(cos^2 a1 sin^2 a2 + sin^2 a1 cos^2 a2), alpha/beta branch fixed by
// reconstructing the product state exactly; throws input_error when y = 0
// (both molecules collapse onto the same basis state).
Decomposition decompose_product(const ProductPrep& prep);

// case_a: only m differs; case_b: only v; case_c: only j; mixed otherwise.
EntanglementCase classify_case(const EntangledPairState& state);

// Weights y^2 |c_+-|^2 carried by sigma^+ / sigma^- for the balanced
// preparation a1 = a2 = pi/4 with relative phase beta:
// beta = 2n pi puts weight 1/2 on sigma^+, beta = (2n+1) pi puts 1/2 on
// sigma^-.
struct BetaSwitchWeights {
    double weight_plus = 0.0;
    double weight_minus = 0.0;
};
BetaSwitchWeights beta_switch_coefficients(double beta);

}  // namespace escat
