#include "escat/vibwave.hpp"

#include <fftw3.h>

#include <cmath>
#include <ctime>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "escat/angmom.hpp"
#include "escat/errors.hpp"

namespace escat {

namespace {

std::mutex g_fftw_mutex;  // FFTW planning is not thread-safe

// Collinear slice of the angular expansion: A_{l1 l2 l}(z^,z^,z^) =
// C^{l 0}_{l1 0 l2 0} sqrt((2l1+1)(2l2+1)(2l+1)) / (4 pi)^{3/2}.
double collinear_weight(int l1, int l2, int l) {
    const double c = angmom::clebsch_gordan(HalfInt(l1), HalfInt(0), HalfInt(l2), HalfInt(0),
                                            HalfInt(l), HalfInt(0));
    return c * std::sqrt((2.0 * l1 + 1.0) * (2.0 * l2 + 1.0) * (2.0 * l + 1.0)) /
           std::pow(4.0 * M_PI, 1.5);
}

double collinear_potential(const PotentialModel& model, double R) {
    double v = 0.0;
    for (const auto& t : model.terms) {
        v += t.radial.eval(R) * collinear_weight(t.lambda1, t.lambda2, t.lambda);
    }
    return v;
}

std::vector<double> fft_momenta(int n, double length) {
    std::vector<double> k(n);
    for (int m = 0; m < n; ++m) {
        const int f = (m <= n / 2) ? m : m - n;
        k[m] = 2.0 * M_PI * f / length;
    }
    return k;
}

}  // namespace

void VibGridSpec::validate(double E_mean_cm1, double mu_R_amu, const MorseParams& morse,
                           const PhysicalConstants& pc) const {
    if (nR < 16 || nr < 8) throw input_error("VibGridSpec: grid too small");
    if (!(R_min > 0.0) || !(R_max > R_min) || !(r_max > r_min) || !(r_min > 0.0)) {
        throw input_error("VibGridSpec: malformed ranges");
    }
    if (!(absorber_start_R > R_min) || !(absorber_start_R < R_max)) {
        throw input_error("VibGridSpec: absorbing layer must sit inside (R_min, R_max)");
    }
    const double C_R = pc.hbar2_over_2amuA2_cm1 / mu_R_amu;
    const double C_r = pc.hbar2_over_2amuA2_cm1 / morse.mu_amu;
    // translational momentum content: mean + 4 width-sigmas
    const double dR = (R_max - R_min) / nR;
    const double k_need = std::sqrt(E_mean_cm1 / C_R) + 4.0 / (2.0 * 0.25);  // sigma_R >= 0.25
    if (M_PI / dR < 1.2 * k_need) {
        throw input_error("VibGridSpec: R spacing too coarse for the packet momentum; need nR >= " +
                          std::to_string(int((R_max - R_min) * 1.2 * k_need / M_PI) + 1));
    }
    // vibrational momentum content up to ~v=4
    const double dr = (r_max - r_min) / nr;
    const double evib = std::min(morse.De_cm1, 5.0 * morse.a_inv_A *
                                                   std::sqrt(morse.De_cm1 * C_r));
    const double kr_need = std::sqrt(evib / C_r);
    if (M_PI / dr < 1.2 * kr_need) {
        throw input_error("VibGridSpec: r spacing too coarse for the oscillator states");
    }
    if (!(dt > 0.0)) throw input_error("VibGridSpec: dt must be positive");
    // split-step accuracy: phases of the occupied energy scale per step
    const double e_char = E_mean_cm1 + 3.0 * 2.0 * morse.a_inv_A * std::sqrt(morse.De_cm1 * C_r);
    if (dt * e_char > 0.5) {
        std::ostringstream os;
        os << "VibGridSpec: dt too large for E ~ " << e_char << " cm^-1; suggest dt <= "
           << 0.25 / e_char;
        throw input_error(os.str());
    }
}

struct VibPropagator::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

VibPropagator::VibPropagator(const VibGridSpec& grid, const MorseParams& morse,
                             const PotentialModel& model, double mu_R_amu, double R_surface,
                             const PhysicalConstants& pc)
    : grid_(grid), morse_(morse), mu_R_(mu_R_amu) {
    C_R_ = pc.hbar2_over_2amuA2_cm1 / mu_R_amu;
    C_r_ = pc.hbar2_over_2amuA2_cm1 / morse.mu_amu;

    const int nR = grid.nR, nr = grid.nr;
    const double dR = (grid.R_max - grid.R_min) / nR;
    const double dr = (grid.r_max - grid.r_min) / nr;
    R_surface_ = R_surface > 0.0 ? R_surface : 0.5 * (grid.absorber_start_R + grid.R_min) +
                                                   0.4 * (grid.absorber_start_R - grid.R_min);
    surf_idx_ = static_cast<int>(std::lround((R_surface_ - grid.R_min) / dR));
    surf_idx_ = std::clamp(surf_idx_, 2, nR - 3);

    // 1D oscillator eigenstates of the spectral Hamiltonian on the r grid,
    // so channel projections are exactly orthonormal for the propagator.
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nr, nr);
    const auto kr = fft_momenta(nr, grid.r_max - grid.r_min);
    for (int d = 0; d < nr; ++d) {
        double t = 0.0;
        for (int m = 0; m < nr; ++m) {
            t += C_r_ * kr[m] * kr[m] * std::cos(2.0 * M_PI * m * d / nr);
        }
        t /= nr;
        for (int i = 0; i < nr; ++i) H(i, (i + d) % nr) += t;
    }
    H = 0.5 * (H + H.transpose()).eval();
    for (int i = 0; i < nr; ++i) H(i, i) += morse.eval(grid.r_min + (i + 0.5) * dr);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    n_vib_ = std::min(6, nr);
    vib_states_ = es.eigenvectors().leftCols(n_vib_);
    vib_energies_ = es.eigenvalues().head(n_vib_);

    // grid arrays
    psi_.assign(static_cast<std::size_t>(nR) * nr * nr, {0.0, 0.0});
    vpot_.resize(psi_.size());
    cap_.resize(psi_.size());
    kin_phase_.resize(psi_.size());
    kR_ = fft_momenta(nR, grid.R_max - grid.R_min);

    const double cap_w = grid.R_max - grid.absorber_start_R;
    for (int a = 0; a < nR; ++a) {
        const double R = grid.R_min + (a + 0.5) * dR;
        const double capR = R > grid.absorber_start_R
                                ? grid.absorber_strength_cm1 *
                                      std::pow((R - grid.absorber_start_R) / cap_w, 2)
                                : 0.0;
        for (int i = 0; i < nr; ++i) {
            const double r1 = grid.r_min + (i + 0.5) * dr;
            for (int j = 0; j < nr; ++j) {
                const double r2 = grid.r_min + (j + 0.5) * dr;
                const double Reff = R - 0.5 * ((r1 - morse.re_A) + (r2 - morse.re_A));
                const double v = morse.eval(r1) + morse.eval(r2) +
                                 collinear_potential(model, std::max(Reff, 1e-3));
                const std::size_t idx =
                    (static_cast<std::size_t>(a) * nr + i) * nr + j;
                vpot_[idx] = v;
                cap_[idx] = capR;
            }
        }
    }
    for (int a = 0; a < nR; ++a) {
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < nr; ++j) {
                const std::size_t idx = (static_cast<std::size_t>(a) * nr + i) * nr + j;
                kin_phase_[idx] =
                    C_R_ * kR_[a] * kR_[a] + C_r_ * (kr[i] * kr[i] + kr[j] * kr[j]);
            }
        }
    }

    plans_ = new Plans;
    std::scoped_lock lock(g_fftw_mutex);
    auto* data = reinterpret_cast<fftw_complex*>(psi_.data());
    plans_->fwd = fftw_plan_dft_3d(nR, nr, nr, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_dft_3d(nR, nr, nr, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
}

VibPropagator::~VibPropagator() {
    std::scoped_lock lock(g_fftw_mutex);
    if (plans_) {
        fftw_destroy_plan(plans_->fwd);
        fftw_destroy_plan(plans_->bwd);
        delete plans_;
    }
}

double VibPropagator::vib_energy(int v) const { return vib_energies_(v); }

void VibPropagator::set_initial_state(const VibInitialState& init) {
    if (init.v_a >= n_vib_ || init.v_b >= n_vib_ || init.v_a < 0 || init.v_b < 0) {
        throw input_error("VibInitialState: vibrational label outside the computed levels");
    }
    if (init.v_a == init.v_b) {
        throw input_error("VibInitialState: the two vibrational labels must differ");
    }
    const int nR = grid_.nR, nr = grid_.nr;
    const double dR = (grid_.R_max - grid_.R_min) / nR;
    const double k0 = std::sqrt(init.E_mean_cm1 / C_R_);
    const std::complex<double> I(0.0, 1.0);
    const double ca = std::cos(init.alpha);
    const std::complex<double> cb = std::sin(init.alpha) * std::exp(I * init.beta);

    std::vector<std::complex<double>> g(nR);
    double gn = 0.0;
    for (int a = 0; a < nR; ++a) {
        const double R = grid_.R_min + (a + 0.5) * dR;
        const double e = (R - init.R0) / (2.0 * init.sigma_R);
        g[a] = std::exp(-e * e) * std::exp(-I * k0 * R);  // incoming toward small R
        gn += std::norm(g[a]);
    }
    for (auto& v : g) v /= std::sqrt(gn);

    for (int a = 0; a < nR; ++a) {
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < nr; ++j) {
                const std::size_t idx = (static_cast<std::size_t>(a) * nr + i) * nr + j;
                psi_[idx] = g[a] * (ca * vib_states_(i, init.v_a) * vib_states_(j, init.v_b) +
                                    cb * vib_states_(i, init.v_b) * vib_states_(j, init.v_a));
            }
        }
    }
}

void VibPropagator::apply_potential(double scale, bool absorb) {
    const double dt = grid_.dt * scale;
    for (std::size_t i = 0; i < psi_.size(); ++i) {
        const double re = -vpot_[i] * dt;
        double damp = 1.0;
        if (absorb && cap_[i] != 0.0) damp = std::exp(-cap_[i] * dt);
        psi_[i] *= std::polar(damp, re);
    }
}

void VibPropagator::apply_kinetic() {
    fftw_execute(plans_->fwd);
    const double inv_n = 1.0 / static_cast<double>(psi_.size());
    const double dt = grid_.dt;
    for (std::size_t i = 0; i < psi_.size(); ++i) {
        psi_[i] *= std::polar(inv_n, -kin_phase_[i] * dt);
    }
    fftw_execute(plans_->bwd);
}

void VibPropagator::apply_kinetic_inverse() {
    fftw_execute(plans_->fwd);
    const double inv_n = 1.0 / static_cast<double>(psi_.size());
    const double dt = grid_.dt;
    for (std::size_t i = 0; i < psi_.size(); ++i) {
        psi_[i] *= std::polar(inv_n, +kin_phase_[i] * dt);
    }
    fftw_execute(plans_->bwd);
}

void VibPropagator::step(bool absorb) {
    apply_potential(0.5, absorb);
    apply_kinetic();
    apply_potential(0.5, absorb);
}

void VibPropagator::step_backward() {
    apply_potential(-0.5, false);
    apply_kinetic_inverse();
    apply_potential(-0.5, false);
}

double VibPropagator::norm() const {
    double n = 0.0;
    for (const auto& v : psi_) n += std::norm(v);
    return n;
}

std::complex<double> VibPropagator::overlap(const std::vector<std::complex<double>>& other) const {
    if (other.size() != psi_.size()) throw input_error("overlap: size mismatch");
    std::complex<double> s{0.0, 0.0};
    for (std::size_t i = 0; i < psi_.size(); ++i) s += std::conj(other[i]) * psi_[i];
    return s;
}

double VibPropagator::channel_population(int v1, int v2) const {
    const int nR = grid_.nR, nr = grid_.nr;
    double tot = 0.0;
    for (int a = 0; a < nR; ++a) {
        std::complex<double> chi{0.0, 0.0};
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < nr; ++j) {
                const std::size_t idx = (static_cast<std::size_t>(a) * nr + i) * nr + j;
                chi += vib_states_(i, v1) * vib_states_(j, v2) * psi_[idx];
            }
        }
        tot += std::norm(chi);
    }
    return tot;
}

Eigen::MatrixXd VibPropagator::channel_flux() const {
    const int nR = grid_.nR, nr = grid_.nr;
    const double dR = (grid_.R_max - grid_.R_min) / nR;
    // chi_{v1 v2}(R) by one GEMM per v1: reshape psi as (nR*nr) x nr
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_vib_, n_vib_);
    Eigen::VectorXcd chi(nR), dchi(nR);
    std::vector<std::complex<double>> work(nR);
    for (int v1 = 0; v1 < n_vib_; ++v1) {
        for (int v2 = 0; v2 < n_vib_; ++v2) {
            for (int a = 0; a < nR; ++a) {
                std::complex<double> s{0.0, 0.0};
                for (int i = 0; i < nr; ++i) {
                    const std::complex<double>* row =
                        psi_.data() + (static_cast<std::size_t>(a) * nr + i) * nr;
                    double w1 = vib_states_(i, v1);
                    if (w1 == 0.0) continue;
                    std::complex<double> inner{0.0, 0.0};
                    for (int j = 0; j < nr; ++j) inner += vib_states_(j, v2) * row[j];
                    s += w1 * inner;
                }
                chi(a) = s;
            }
            // spectral derivative along R
            for (int a = 0; a < nR; ++a) work[a] = chi(a);
            fftw_complex* data = reinterpret_cast<fftw_complex*>(work.data());
            fftw_plan p1, p2;
            {
                std::scoped_lock lock(g_fftw_mutex);
                p1 = fftw_plan_dft_1d(nR, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
                p2 = fftw_plan_dft_1d(nR, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
            }
            fftw_execute(p1);
            const std::complex<double> I(0.0, 1.0);
            for (int a = 0; a < nR; ++a) work[a] *= I * kR_[a] / double(nR);
            fftw_execute(p2);
            {
                std::scoped_lock lock(g_fftw_mutex);
                fftw_destroy_plan(p1);
                fftw_destroy_plan(p2);
            }
            const std::complex<double> c = chi(surf_idx_);
            const std::complex<double> dc = work[surf_idx_];
            out(v1, v2) = 2.0 * C_R_ * std::imag(std::conj(c) * dc) / dR;
        }
    }
    return out;
}

double VibResult::P(int v1, int v2) const {
    for (const auto& c : channels) {
        if (c.v1 == v1 && c.v2 == v2) return c.P;
    }
    return 0.0;
}

VibResult propagate_vib(const VibGridSpec& grid, const VibInitialState& init,
                        const MorseParams& morse, const PotentialModel& model, double mu_R_amu,
                        double R_surface, const PhysicalConstants& pc) {
    grid.validate(init.E_mean_cm1, mu_R_amu, morse, pc);
    VibPropagator prop(grid, morse, model, mu_R_amu, R_surface, pc);
    prop.set_initial_state(init);

    const double C_R = pc.hbar2_over_2amuA2_cm1 / mu_R_amu;
    const double vg = 2.0 * C_R * std::sqrt(init.E_mean_cm1 / C_R);
    const double T = grid.total_time > 0.0
                         ? grid.total_time
                         : 3.0 * (grid.R_max - grid.R_min) / vg;
    const int nsteps = std::max(1, static_cast<int>(std::ceil(T / grid.dt)));

    const int nv = prop.vib_levels();
    VibResult res;
    res.channels.reserve(nv * nv);
    for (int v1 = 0; v1 < nv; ++v1) {
        for (int v2 = 0; v2 < nv; ++v2) res.channels.push_back({v1, v2, 0.0, {}});
    }

    const int record_every = 8;
    for (int s = 0; s < nsteps; ++s) {
        prop.step(true);
        if (s % record_every == 0 || s + 1 == nsteps) {
            const Eigen::MatrixXd flux = prop.channel_flux();
            const double w = grid.dt * record_every;
            for (auto& c : res.channels) {
                c.flux_series.push_back(flux(c.v1, c.v2));
                c.P += flux(c.v1, c.v2) * w;
            }
        }
    }
    res.steps = nsteps;
    res.norm_end = prop.norm();
    res.absorbed = 1.0 - res.norm_end;
    for (const auto& c : res.channels) res.sum_P += c.P;
    res.norm_account = res.sum_P + res.norm_end;
    return res;
}

std::vector<VibScanPoint> energy_scan(const VibGridSpec& grid,
                                      const VibInitialState& init_template,
                                      const std::vector<double>& energies_cm1,
                                      const std::vector<double>& betas, const MorseParams& morse,
                                      const PotentialModel& model, double mu_R_amu, int nthreads,
                                      const PhysicalConstants& pc) {
    struct Cell {
        double E, beta;
    };
    std::vector<Cell> cells;
    for (double E : energies_cm1) {
        for (double b : betas) cells.push_back({E, b});
    }
    std::vector<VibScanPoint> out(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            VibInitialState init = init_template;
            init.E_mean_cm1 = cells[i].E;
            init.beta = cells[i].beta;
            const VibResult r = propagate_vib(grid, init, morse, model, mu_R_amu, 0.0, pc);
            out[i] = {cells[i].E, cells[i].beta, r.P(1, 1), r.sum_P, r.norm_account};
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

void write_scan_csv(std::ostream& os, const std::vector<VibScanPoint>& points, bool timestamp) {
    os << "# vib scan csv schema=1\n";
    if (timestamp) {
        std::time_t t = std::time(nullptr);
        char buf[64];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
        os << "# generated " << buf << "\n";
    }
    os << "E_mean_cm1,beta,P11,sum_P,norm_account\n";
    os << std::setprecision(17);
    for (const auto& p : points) {
        os << p.E_mean_cm1 << "," << p.beta << "," << p.P11 << "," << p.sum_P << ","
           << p.norm_account << "\n";
    }
}

}  // namespace escat
