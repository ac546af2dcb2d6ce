#pragma once

#include <Eigen/Dense>
#include <vector>

#include "escat/basis.hpp"
#include "escat/pes.hpp"

namespace escat {

// Log-derivative propagation setup.  The base sector width applies through
// the interaction region; beyond long_range_R sectors may widen (capped by
// the local open-channel wavelength) since the potential tail is smooth.
// Defaults follow the documented choices: R_start 1.5 A and R_match 30 A for
// E_k >= 4 cm^-1; use R_match ~ 200 A for E_k <= 0.04 cm^-1.
struct PropagationConfig {
    double R_start = 1.5;
    double R_match = 30.0;
    double step = 0.02;
    double long_range_R = 12.0;
    double long_range_step = 0.0;  // 0 = automatic (min(2 A, 0.15 / k_max))
    int J_max = 8;
};

// S-matrix on the open channels of one total-J block, with the propagation
// diagnostics used by the verification battery.
struct SMatrixBlock {
    HalfInt J;
    std::vector<ChannelState> open_channels;
    Eigen::MatrixXcd S;
    double unitarity_defect = 0.0;  // max |S S^dag - I|
    double symmetry_defect = 0.0;   // max |S - S^T|
};

// Propagates the log-derivative matrix Y = psi' psi^-1 from R_start to
// R_match and matches to Riccati-Bessel (open) / scaled modified spherical
// Bessel (closed) asymptotics; closed channels are eliminated at matching.
// The propagator is the constant-diagonal-reference log-derivative method
// with Simpson-rule corrections (Johnson, J. Comput. Phys. 13, 445 (1973);
// Manolopoulos, J. Chem. Phys. 85, 6425 (1986)).
// Throws input_error when no channel is open, numerical_error on a singular
// match.
SMatrixBlock propagate(HalfInt J, const CollisionSpec& spec, const PotentialModel& model,
                       const PropagationConfig& cfg,
                       const PhysicalConstants& pc = default_constants());

// Same, with the total energy given directly.
SMatrixBlock propagate_at_energy(double E_total_cm1, const BasisTruncation& trunc, HalfInt J,
                                 double mu_amu, const PotentialModel& model,
                                 const PropagationConfig& cfg,
                                 const PhysicalConstants& pc = default_constants());

// Blocks for J = 0..J_max.  Blocks are independent; nthreads > 1 maps them
// over a small worker pool.
std::vector<SMatrixBlock> solve_all(const CollisionSpec& spec, const PotentialModel& model,
                                    const PropagationConfig& cfg,
                                    const PhysicalConstants& pc = default_constants(),
                                    int nthreads = 1);

// T = I - S on the open-channel block.
Eigen::MatrixXcd t_from_s(const SMatrixBlock& block);
Eigen::MatrixXcd s_from_t(const Eigen::MatrixXcd& T);

}  // namespace escat
