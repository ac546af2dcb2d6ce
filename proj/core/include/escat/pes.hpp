#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "escat/basis.hpp"

namespace escat {

// Radial function tabulated on a log-spaced R grid with a natural cubic
// spline in u = ln R.  Evaluation outside the tabulated range returns 0
// (the grid reaches far enough that the tail is negligible there).
class RadialTable {
public:
    RadialTable() = default;
    // Samples fn on npoints log-spaced nodes in [r_min, r_max].
    template <typename Fn>
    static RadialTable sample(Fn&& fn, double r_min, double r_max, int npoints) {
        std::vector<double> r(npoints), v(npoints);
        const double u0 = std::log(r_min), u1 = std::log(r_max);
        for (int i = 0; i < npoints; ++i) {
            const double u = u0 + (u1 - u0) * i / (npoints - 1);
            r[i] = std::exp(u);
            v[i] = fn(r[i]);
        }
        return from_points(r, v);
    }
    // Builds from explicit (R, value) pairs; R must be strictly increasing.
    static RadialTable from_points(const std::vector<double>& R, const std::vector<double>& value);

    double eval(double R) const;
    const std::vector<double>& nodes_R() const { return r_; }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<double> r_;   // ascending
    std::vector<double> u_;   // ln R
    std::vector<double> v_;
    std::vector<double> d2_;  // spline second derivatives in u
};

// One term of the angular expansion
//   V(R, r1^, r2^) = sum v_{l1 l2 l}(R) A_{l1 l2 l},
//   A_{l1 l2 l} = sum_mu C^{l mu}_{l1 mu1 l2 mu2} Y_{l1 mu1}(r1^) Y_{l2 mu2}(r2^) Y*_{l mu}(R^).
// A_000 = (4 pi)^{-3/2}, so an isotropic potential V0(R) enters as
// v_000 = (4 pi)^{3/2} V0.
struct RadialTerm {
    int lambda1 = 0;
    int lambda2 = 0;
    int lambda = 0;
    RadialTable radial;
};

struct PotentialModel {
    std::vector<RadialTerm> terms;
    bool symmetric_under_exchange = true;
    bool para_symmetry = true;  // even lambda1, lambda2 only

    // Triangle rules, para parity, and (when symmetric_under_exchange) the
    // presence of the (l2,l1,l) mirror of every (l1,l2,l) term.
    void validate() const;
    // FNV-1a hash over term indices and tabulated values; recorded in
    // T-matrix file headers so consumers can detect potential mismatches.
    std::string content_hash() const;
};

// Two-kind desk-scale model qualitatively resembling para-H2 + para-H2:
// an isotropic 12-6 well (eps, r_m) plus an exponentially decaying
// (2,0,2)/(0,2,2) anisotropic pair anchored at r_m.
PotentialModel default_model(double eps_cm1 = 24.0, double rm_A = 3.5,
                             double aniso_cm1 = 35.0, double aniso_decay_inv_A = 1.7);

// Structured-text potential file (see docs/potential-format.md).
PotentialModel load_potential(const std::string& path);
void save_potential(const std::string& path, const PotentialModel& model);

// Dimensionless angular factor multiplying radial(R) in <bra|V|ket>, from the
// standard space-fixed diatom-diatom recoupling formula (Green,
// J. Chem. Phys. 62, 2271 (1975)):
//   (-1)^{j1+j2+j12'+J} (4pi)^{-3/2} [j1 j1' j2 j2' j12 j12' l l']^{1/2}
//   (2 lam + 1) [(2 lam1 + 1)(2 lam2 + 1)]^{1/2} (j1 lam1 j1';000)(j2 lam2 j2';000)
//   (l lam l';000) {j12 j12' lam; l' l J} {j1 j1' lam1; j2 j2' lam2; j12 j12' lam}
// with [x] = 2x+1 and (..) / {..} 3-j, 6-j, 9-j symbols.  Zero whenever a
// parity or triangle selection rule fails.  Throws input_error on J mismatch.
double coupling_matrix_element(const ChannelState& bra, const ChannelState& ket,
                               const RadialTerm& term);

// Precomputed angular factors for a basis: one symmetric matrix per term.
struct CouplingTable {
    std::vector<Eigen::MatrixXd> factors;
};
CouplingTable build_coupling_table(const std::vector<ChannelState>& basis,
                                   const PotentialModel& model);

// W(R)_ij = sum_terms radial(R) * angular factor; symmetric, in cm^-1.
Eigen::MatrixXd potential_matrix(double R, const std::vector<ChannelState>& basis,
                                 const PotentialModel& model);
Eigen::MatrixXd potential_matrix(double R, const CouplingTable& table,
                                 const PotentialModel& model);

}  // namespace escat
