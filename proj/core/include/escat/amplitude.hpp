#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "escat/entangle.hpp"
#include "escat/tmx.hpp"

namespace escat {

// One state-to-state transition: initial pair labels prepared along z^,
// final pair labels detected along R^, with entrance/exit wavenumbers.
struct TransitionSpec {
    MoleculeLabels in1, in2;
    MoleculeLabels out1, out2;
    double k_A_inv = 0.0;
    double kp_A_inv = 0.0;

    // Derives k and k' from the set's total energy; throws input_error when
    // the final channel is closed or the labels fall outside the set's basis.
    static TransitionSpec from_set(const TMatrixSet& set, const MoleculeLabels& in1,
                                   const MoleculeLabels& in2, const MoleculeLabels& out1,
                                   const MoleculeLabels& out2,
                                   const PhysicalConstants& pc = default_constants());
};

// Which assembly route produced an amplitude.
enum class FormulaPath { unsymmetrized, incoming_sym, outgoing_sym, reduced };
std::string to_string(FormulaPath p);

// How the incoming pair state is prepared.
struct InitialStateSpec {
    enum class Kind {
        pm_plus,         // |psi+>
        pm_minus,        // |psi->
        alpha_beta,      // general entangled state, coefficients from (alpha, beta)
        sym_pair,        // unentangled pair, incoming-state symmetrization only
        identical_pair,  // both molecules in the same internal state (satellites)
    };
    Kind kind = Kind::pm_plus;
    double alpha = M_PI / 4.0;
    double beta = 0.0;

    static InitialStateSpec plus() { return {Kind::pm_plus, M_PI / 4.0, 0.0}; }
    static InitialStateSpec minus() { return {Kind::pm_minus, M_PI / 4.0, M_PI}; }
    static InitialStateSpec general(double alpha, double beta) {
        return {Kind::alpha_beta, alpha, beta};
    }
    static InitialStateSpec pair() { return {Kind::sym_pair, 0.0, 0.0}; }
    static InitialStateSpec identical() { return {Kind::identical_pair, 0.0, 0.0}; }
    std::string tag() const;
};

// For fixed final (m1', m2') the azimuthal quantum number m' = m12 - m12' is
// unique, so the amplitude collapses to a single-m' partial-wave series
//   f(theta, phi) = e^{i m' phi} sum_{l'} coef[l'] * ThetaPart_{l'}^{m'}(theta).
struct PartialWaveAmplitude {
    int m1p = 0, m2p = 0;  // final projections (integer systems)
    int m_prime = 0;
    std::vector<std::complex<double>> coef;  // indexed by l'

    std::complex<double> eval(double theta, double phi) const;
    // The theta-only factor (f without the e^{i m' phi} phase).
    std::complex<double> eval_theta(double cos_theta) const;
    // |f|^2 at theta, phi-independent for a single-m' series.
    double norm2(double cos_theta) const;
};

// Partial-wave tables for every final (m1', m2') pair of a transition.
// Throws input_error listing the missing (J, bra, ket) keys when required
// T entries are absent from the set.
std::vector<PartialWaveAmplitude> amplitude_tables(const TMatrixSet& set,
                                                   const TransitionSpec& spec,
                                                   const InitialStateSpec& initial,
                                                   FormulaPath path);

// Point evaluations of the individual assembly routes (one final m pair).

// Unsymmetrized amplitude: the standard close-coupling partial-wave series
// with prefactor i sqrt(pi) / sqrt(k k').  reversed_z inserts the (-1)^l of
// an incoming wave along -z^; exchanged_initial swaps the incoming labels.
std::complex<double> amplitude_unsym(const TMatrixSet& set, const TransitionSpec& spec,
                                     bool reversed_z, bool exchanged_initial, double theta,
                                     double phi);

// f_{+-}: the incoming-symmetrized route with parity factor [1 +- (-1)^l]
// and the direct/exchanged T interference bracket.
std::complex<double> amplitude_pm(const TMatrixSet& set, const TransitionSpec& spec, int sign,
                                  double theta, double phi);

// f_{alpha,beta} = c+ f+ + c- f-.
std::complex<double> amplitude_general(const TMatrixSet& set, const TransitionSpec& spec,
                                       double alpha, double beta, double theta, double phi);

// The outgoing-symmetrized route; Y at -R^ enters via the parity identity.
// Agrees with amplitude_pm for exchange-consistent T sets.
std::complex<double> amplitude_outgoing_sym(const TMatrixSet& set, const TransitionSpec& spec,
                                            int sign, double theta, double phi);

// Reduced single-T-family form for the (4,0) -> (2,2) transition with
// m1 = m2 = 0; enforces even (odd) j12' for sign = +1 (-1) and requires the
// stored set to satisfy the ket-exchange relation within exchange_tol.
std::complex<double> amplitude_reduced_2020(const TMatrixSet& set, const TransitionSpec& spec,
                                            int sign, double theta, double phi,
                                            double exchange_tol = 1e-6);

// Amplitude sampled on a (theta, phi) grid, one complex matrix per final
// (m1', m2') pair.
struct AmplitudeField {
    std::vector<double> theta;
    std::vector<double> phi;
    struct Component {
        int m1p, m2p;
        Eigen::MatrixXcd f;  // theta x phi
    };
    std::vector<Component> components;
    FormulaPath path = FormulaPath::incoming_sym;
    std::string initial_tag;
};

AmplitudeField evaluate_field(const TMatrixSet& set, const TransitionSpec& spec,
                              const InitialStateSpec& initial, FormulaPath path, int n_theta,
                              int n_phi);

}  // namespace escat
