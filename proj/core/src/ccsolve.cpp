#include "escat/ccsolve.hpp"

#include <gsl/gsl_sf_bessel.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "escat/errors.hpp"

namespace escat {

namespace {

// Riccati-Bessel pair: S_l(x) = x j_l(x) (sin-like), C_l(x) = -x y_l(x)
// (cos-like), and their x-derivatives via (x f_l)' = x f_{l-1} - l f_l.
double riccati_j(int l, double x) { return x * std::sph_bessel(l, x); }
double riccati_j_prime(int l, double x) {
    const double jm1 = (l == 0) ? std::cos(x) / x : std::sph_bessel(l - 1, x);
    return x * jm1 - l * std::sph_bessel(l, x);
}
double riccati_n(int l, double x) { return -x * std::sph_neumann(l, x); }
double riccati_n_prime(int l, double x) {
    const double ym1 = (l == 0) ? std::sin(x) / x : std::sph_neumann(l - 1, x);
    return -(x * ym1 - l * std::sph_neumann(l, x));
}

// Scaled modified spherical Bessel values at the match point:
//   decaying  e^{+x} x k_l(x)  and  growing  e^{-x} x i_l(x),
// both O(1); the constant e^{+-x_match} column scales drop out of the match.
double il_scaled(int l, double x) {
    if (l == -1) return (1.0 + std::exp(-2.0 * x)) / (2.0 * x);
    return gsl_sf_bessel_il_scaled(l, x);
}
double kl_scaled(int l, double x) {
    if (l == -1) return gsl_sf_bessel_k0_scaled(x);
    return gsl_sf_bessel_kl_scaled(l, x);
}

struct SectorGrid {
    std::vector<double> lo, mid, hi;  // per sector
};

SectorGrid make_sectors(const PropagationConfig& cfg, double k_max_open) {
    if (!(cfg.R_start > 0.0) || !(cfg.R_match > cfg.R_start)) {
        throw input_error("PropagationConfig: need 0 < R_start < R_match");
    }
    if (!(cfg.step > 0.0)) throw input_error("PropagationConfig: step must be positive");
    double far_step = cfg.long_range_step;
    if (far_step <= 0.0) {
        far_step = 2.0;
        if (k_max_open > 0.0) far_step = std::min(far_step, 0.15 / k_max_open);
        far_step = std::max(far_step, cfg.step);
    }
    SectorGrid g;
    double R = cfg.R_start;
    while (R < cfg.R_match - 1e-12) {
        double h = (R < cfg.long_range_R) ? cfg.step : far_step;
        h = std::min(h, cfg.R_match - R);
        g.lo.push_back(R);
        g.mid.push_back(R + 0.5 * h);
        g.hi.push_back(R + h);
        R += h;
    }
    return g;
}

}  // namespace

SMatrixBlock propagate_at_energy(double E_total_cm1, const BasisTruncation& trunc, HalfInt J,
                                 double mu_amu, const PotentialModel& model,
                                 const PropagationConfig& cfg, const PhysicalConstants& pc) {
    const auto basis = build_channel_basis_at_energy(E_total_cm1, trunc, J, mu_amu, pc);
    const int n = static_cast<int>(basis.size());
    int n_open = 0;
    double k_max_open = 0.0;
    for (const auto& c : basis) {
        if (c.open) {
            ++n_open;
            k_max_open = std::max(k_max_open, c.k_A_inv);
        }
    }
    if (n_open == 0) throw input_error("propagate: no open channels at this energy");

    const CouplingTable table = build_coupling_table(basis, model);
    const double mu_over_c = mu_amu / pc.hbar2_over_2amuA2_cm1;

    // psi'' = W(R) psi with
    // W = (mu/C) (V(R) + E_channel - E_total) + l(l+1)/R^2.
    Eigen::VectorXd lcent(n), ethr(n);
    for (int i = 0; i < n; ++i) {
        const double l = basis[i].l.value();
        lcent(i) = l * (l + 1.0);
        ethr(i) = mu_over_c * (basis[i].channel_energy_cm1 - E_total_cm1);
    }
    auto eval_W = [&](double R) {
        Eigen::MatrixXd W = mu_over_c * potential_matrix(R, table, model);
        for (int i = 0; i < n; ++i) W(i, i) += ethr(i) + lcent(i) / (R * R);
        return W;
    };

    const SectorGrid grid = make_sectors(cfg, k_max_open);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd Y = 1e10 * I;  // hard-wall start deep in the forbidden region
    Eigen::MatrixXd Wlo = eval_W(grid.lo.front());
    for (std::size_t s = 0; s < grid.lo.size(); ++s) {
        const double d = grid.mid[s] - grid.lo[s];
        const Eigen::MatrixXd Wmid = eval_W(grid.mid[s]);
        const Eigen::MatrixXd Whi = eval_W(grid.hi[s]);
        const Eigen::VectorXd ref = Wmid.diagonal();

        // diagonal reference propagators for one half-step of width d
        Eigen::VectorXd y1r(n), y2r(n);
        for (int i = 0; i < n; ++i) {
            const double w = std::sqrt(std::abs(ref(i)));
            const double wh = w * d;
            if (ref(i) >= 0.0) {
                y1r(i) = wh > 1e-8 ? w / std::tanh(wh) : 1.0 / d;
                y2r(i) = wh > 1e-8 ? w / std::sinh(wh) : 1.0 / d;
            } else {
                y1r(i) = w / std::tan(wh);
                y2r(i) = w / std::sin(wh);
            }
        }
        Eigen::MatrixXd dWmid = Wmid;
        dWmid.diagonal() -= ref;
        Eigen::MatrixXd dWlo = Wlo;
        dWlo.diagonal() -= ref;
        Eigen::MatrixXd dWhi = Whi;
        dWhi.diagonal() -= ref;

        const Eigen::MatrixXd Qlo = (d / 3.0) * dWlo;
        const Eigen::MatrixXd Qmid =
            (2.0 * d / 3.0) *
            Eigen::PartialPivLU<Eigen::MatrixXd>(I - (d * d / 6.0) * dWmid).solve(dWmid);
        const Eigen::MatrixXd Qhi = (d / 3.0) * dWhi;

        // half-step [lo, mid]
        Eigen::MatrixXd A = Y + Qlo;
        A.diagonal() += y1r;
        Eigen::MatrixXd X = Eigen::PartialPivLU<Eigen::MatrixXd>(std::move(A)).solve(
            Eigen::MatrixXd(y2r.asDiagonal()));
        Y = Qmid - y2r.asDiagonal() * X;
        Y.diagonal() += y1r;
        // half-step [mid, hi]
        A = Y + Qmid;
        A.diagonal() += y1r;
        X = Eigen::PartialPivLU<Eigen::MatrixXd>(std::move(A)).solve(
            Eigen::MatrixXd(y2r.asDiagonal()));
        Y = Qhi - y2r.asDiagonal() * X;
        Y.diagonal() += y1r;

        Wlo = Whi;
    }

    // Match to free solutions at R_match; closed channels carry the scaled
    // decaying/growing pair and are eliminated from the K matrix.
    const double Rm = cfg.R_match;
    Eigen::VectorXd F(n), Fp(n), G(n), Gp(n);
    for (int i = 0; i < n; ++i) {
        const int l = basis[i].l.as_int();
        const double k = basis[i].k_A_inv;
        if (basis[i].open) {
            const double x = k * Rm;
            const double s = 1.0 / std::sqrt(k);  // flux normalization -> symmetric K
            F(i) = riccati_j(l, x) * s;
            Fp(i) = riccati_j_prime(l, x) * k * s;
            G(i) = riccati_n(l, x) * s;
            Gp(i) = riccati_n_prime(l, x) * k * s;
        } else {
            const double x = k * Rm;
            F(i) = x * kl_scaled(l, x);
            Fp(i) = k * (-x * kl_scaled(l - 1, x) - l * kl_scaled(l, x));
            G(i) = x * il_scaled(l, x);
            Gp(i) = k * (x * il_scaled(l - 1, x) - l * il_scaled(l, x));
        }
    }
    const Eigen::MatrixXd P = Y * F.asDiagonal() - Eigen::MatrixXd(Fp.asDiagonal());
    const Eigen::MatrixXd Q = Y * G.asDiagonal() - Eigen::MatrixXd(Gp.asDiagonal());

    std::vector<int> open_idx, closed_idx;
    for (int i = 0; i < n; ++i) (basis[i].open ? open_idx : closed_idx).push_back(i);
    auto take = [](const Eigen::MatrixXd& M, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
        Eigen::MatrixXd out(rows.size(), cols.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = M(rows[r], cols[c]);
        return out;
    };

    Eigen::MatrixXd Pt, Qt;
    if (closed_idx.empty()) {
        Pt = take(P, open_idx, open_idx);
        Qt = take(Q, open_idx, open_idx);
    } else {
        const Eigen::MatrixXd Pcc = take(P, closed_idx, closed_idx);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Pcc);
        const Eigen::MatrixXd PocPcc = take(P, open_idx, closed_idx) * lu.inverse();
        Pt = take(P, open_idx, open_idx) - PocPcc * take(P, closed_idx, open_idx);
        Qt = take(Q, open_idx, open_idx) - PocPcc * take(Q, closed_idx, open_idx);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> qlu(Qt);
    if (!qlu.isInvertible()) {
        std::ostringstream os;
        os << "propagate: singular match at R_match = " << Rm
           << " (rank " << qlu.rank() << "/" << Qt.rows() << ")";
        throw numerical_error(os.str());
    }
    const Eigen::MatrixXd K = qlu.solve(Pt);  // psi ~ j - n K

    const int no = static_cast<int>(open_idx.size());
    const Eigen::MatrixXcd iK = std::complex<double>(0.0, 1.0) * K.cast<std::complex<double>>();
    const Eigen::MatrixXcd Io = Eigen::MatrixXcd::Identity(no, no);
    const Eigen::MatrixXcd S = (Io - iK).partialPivLu().solve(Io + iK);

    SMatrixBlock block;
    block.J = J;
    for (int i : open_idx) block.open_channels.push_back(basis[i]);
    block.S = S;
    block.unitarity_defect = (S * S.adjoint() - Io).cwiseAbs().maxCoeff();
    block.symmetry_defect = (S - S.transpose()).cwiseAbs().maxCoeff();
    if (!S.allFinite()) throw numerical_error("propagate: non-finite S matrix");
    return block;
}

SMatrixBlock propagate(HalfInt J, const CollisionSpec& spec, const PotentialModel& model,
                       const PropagationConfig& cfg, const PhysicalConstants& pc) {
    spec.validate();
    return propagate_at_energy(spec.total_energy_cm1(), spec.trunc, J, spec.mu_amu, model, cfg,
                               pc);
}

std::vector<SMatrixBlock> solve_all(const CollisionSpec& spec, const PotentialModel& model,
                                    const PropagationConfig& cfg, const PhysicalConstants& pc,
                                    int nthreads) {
    spec.validate();
    const int nJ = cfg.J_max + 1;
    std::vector<SMatrixBlock> blocks(nJ);
    if (nthreads <= 1) {
        for (int J = 0; J < nJ; ++J) {
            blocks[J] = propagate(HalfInt(J), spec, model, cfg, pc);
        }
        return blocks;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int J = next.fetch_add(1); J < nJ; J = next.fetch_add(1)) {
                    blocks[J] = propagate(HalfInt(J), spec, model, cfg, pc);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return blocks;
}

Eigen::MatrixXcd t_from_s(const SMatrixBlock& block) {
    return Eigen::MatrixXcd::Identity(block.S.rows(), block.S.cols()) - block.S;
}

Eigen::MatrixXcd s_from_t(const Eigen::MatrixXcd& T) {
    return Eigen::MatrixXcd::Identity(T.rows(), T.cols()) - T;
}

}  // namespace escat
