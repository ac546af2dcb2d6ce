#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "escat/amplitude.hpp"
#include "escat/entangle.hpp"

namespace escat {

struct DcsOptions {
    int profile_nodes = 721;   // uniform theta nodes for the sigma(theta) table
    int quadrature_order = 64;  // Gauss-Legendre order (in cos theta) for totals
    bool flux_factor = true;    // include k'/k in sigma (documented convention)
    bool phi_quadrature_check = false;  // numerically integrate phi and compare
    int phi_nodes = 64;
    FormulaPath path = FormulaPath::incoming_sym;
};

// sigma(theta) = (k'/k) * sum_{m1',m2'} integral_0^{2pi} |f|^2 dphi, in A^2;
// totals integrate sigma(theta) sin(theta) over the full [0, pi] with no
// extra identical-particle 1/2 (convention pinned by the internal
// consistency of the +/- averages).
struct CrossSectionReport {
    std::vector<double> theta;
    std::vector<double> sigma;
    double total_A2 = 0.0;
    double total_refined_A2 = 0.0;  // doubled quadrature order
    bool total_converged = true;    // |refined - total| <= 0.1% of refined
    std::string initial_tag;
    int out_j1 = 0, out_v1 = 0, out_j2 = 0, out_v2 = 0;
    double E_k_cm1 = 0.0;
    std::optional<double> d_c_percent;
    double phi_check_max_rel = 0.0;
};

CrossSectionReport dcs(const TMatrixSet& set, const TransitionSpec& spec,
                       const InitialStateSpec& initial, const DcsOptions& opts = {});

// Total cross section by Gauss-Legendre quadrature in cos theta.
double total(const TMatrixSet& set, const TransitionSpec& spec, const InitialStateSpec& initial,
             int quadrature_order = 64, const DcsOptions& opts = {});

// The +/- averaging identity: the properly symmetrized unentangled-pair
// cross section equals (sigma+ + sigma-)/2.  The identity is exact for the
// R^-integrated, m'-summed cross sections; pointwise in theta the exact
// statement is the parallelogram form
//   sigma+(theta) + sigma-(theta) = sigma_pair(theta) + sigma_pair(pi-theta),
// and both deviations are reported.
struct AveragingCheck {
    double integrated_rel_dev = 0.0;     // |sig_pair - (sig+ + sig-)/2| / sig_pair
    double parallelogram_max_rel = 0.0;  // pointwise form above
    double sigma_pair = 0.0, sigma_plus = 0.0, sigma_minus = 0.0;
};
AveragingCheck averaging_identity_check(const TMatrixSet& set, const TransitionSpec& spec,
                                        int quadrature_order = 64, int profile_nodes = 181);

// d_c = |100 (sigma+ - sigma-) / sigma_ref| in percent; sigma_ref must be
// positive.
double control_metric(double sigma_plus, double sigma_minus, double sigma_ref);

// Cross-section accounting for a direct-product preparation: the entangled
// component scaled by y^2 plus the two identical-pair satellites added
// incoherently (or dropped).  A satellite below its production threshold is
// exactly zero; an open satellite needs a T set at its own total energy
// (E_k + twice its level energy), otherwise it is flagged uncomputed.
struct SatelliteComponent {
    std::string name;
    double weight = 0.0;       // y^2 or |coefficient|^2
    bool channel_open = false;
    bool computed = false;
    double sigma_total_A2 = 0.0;  // unweighted
};

struct SatelliteReport {
    Decomposition decomposition;
    SatelliteComponent entangled, satellite11, satellite22;
    double sigma_dp_total_A2 = 0.0;  // weighted sum per the chosen mode
    bool satellites_included = true;
    double satellite_to_entangled_ratio = 0.0;
};

struct SatelliteOptions {
    bool include_satellites = true;  // incoherent add; false = drop satellites
    int quadrature_order = 64;
    bool flux_factor = true;
};

SatelliteReport satellite_accounting(const TMatrixSet& t_entangled, const TMatrixSet* t_sat11,
                                     const TMatrixSet* t_sat22, const ProductPrep& prep,
                                     const MoleculeLabels& out1, const MoleculeLabels& out2,
                                     const SatelliteOptions& opts = {},
                                     const PhysicalConstants& pc = default_constants());

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// CSV emitter; columns: theta_rad, sigma, initial_tag, final_channel, E_k.
// 17 significant digits; the timestamp header line is suppressed when
// timestamp is false so outputs are byte-identical across runs.
void write_dcs_csv(std::ostream& os, const CrossSectionReport& report, bool timestamp = true);

// JSON summary record (totals + metadata + the profile).
void write_dcs_json(std::ostream& os, const CrossSectionReport& report, bool timestamp = true);

}  // namespace escat
