#include "escat/xsec.hpp"

#include <json.hpp>

#include <cmath>
#include <ctime>
#include <iomanip>

#include "escat/errors.hpp"

namespace escat {

namespace {

double flux(const TransitionSpec& spec, bool on) {
    return on ? spec.kp_A_inv / spec.k_A_inv : 1.0;
}

// phi-integrated, m'-summed differential cross section at one angle.
double sigma_at(const std::vector<PartialWaveAmplitude>& tables, double cos_theta,
                double flux_factor) {
    double s = 0.0;
    for (const auto& pw : tables) s += pw.norm2(cos_theta);
    return flux_factor * 2.0 * M_PI * s;
}

double integrate_total(const std::vector<PartialWaveAmplitude>& tables, double flux_factor,
                       int order) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    double tot = 0.0;
    for (int i = 0; i < order; ++i) tot += w[i] * sigma_at(tables, x[i], flux_factor);
    return tot;
}

std::string channel_tag(int j1, int v1, int j2, int v2) {
    return std::to_string(j1) + ":" + std::to_string(v1) + ":" + std::to_string(j2) + ":" +
           std::to_string(v2);
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    if (n < 1) throw input_error("gauss_legendre: order must be >= 1");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

CrossSectionReport dcs(const TMatrixSet& set, const TransitionSpec& spec,
                       const InitialStateSpec& initial, const DcsOptions& opts) {
    if (opts.profile_nodes < 2) throw input_error("dcs: profile_nodes must be >= 2");
    const auto tables = amplitude_tables(set, spec, initial, opts.path);
    const double ff = flux(spec, opts.flux_factor);

    CrossSectionReport rep;
    rep.initial_tag = initial.tag();
    rep.out_j1 = spec.out1.j.as_int();
    rep.out_v1 = spec.out1.v;
    rep.out_j2 = spec.out2.j.as_int();
    rep.out_v2 = spec.out2.v;
    rep.E_k_cm1 = set.E_k_cm1;

    rep.theta.resize(opts.profile_nodes);
    rep.sigma.resize(opts.profile_nodes);
    for (int i = 0; i < opts.profile_nodes; ++i) {
        rep.theta[i] = M_PI * i / (opts.profile_nodes - 1);
        rep.sigma[i] = sigma_at(tables, std::cos(rep.theta[i]), ff);
    }

    rep.total_A2 = integrate_total(tables, ff, opts.quadrature_order);
    rep.total_refined_A2 = integrate_total(tables, ff, 2 * opts.quadrature_order);
    const double scale = std::max(std::abs(rep.total_refined_A2), 1e-300);
    rep.total_converged = std::abs(rep.total_refined_A2 - rep.total_A2) <= 1e-3 * scale;

    if (opts.phi_quadrature_check) {
        // |f|^2 summed over final pairs is phi-independent term by term; the
        // numerical phi integral cross-checks the e^{i m' phi} bookkeeping.
        double worst = 0.0;
        for (int i = 0; i < opts.profile_nodes; i += std::max(1, opts.profile_nodes / 16)) {
            const double th = rep.theta[i];
            double acc = 0.0;
            for (int p = 0; p < opts.phi_nodes; ++p) {
                const double phi = 2.0 * M_PI * p / opts.phi_nodes;
                double s = 0.0;
                for (const auto& pw : tables) s += std::norm(pw.eval(th, phi));
                acc += s;
            }
            acc *= ff * 2.0 * M_PI / opts.phi_nodes;
            const double ref = std::max(std::abs(rep.sigma[i]), 1e-300);
            worst = std::max(worst, std::abs(acc - rep.sigma[i]) / ref);
        }
        rep.phi_check_max_rel = worst;
    }
    return rep;
}

double total(const TMatrixSet& set, const TransitionSpec& spec, const InitialStateSpec& initial,
             int quadrature_order, const DcsOptions& opts) {
    const auto tables = amplitude_tables(set, spec, initial, opts.path);
    return integrate_total(tables, flux(spec, opts.flux_factor), quadrature_order);
}

AveragingCheck averaging_identity_check(const TMatrixSet& set, const TransitionSpec& spec,
                                        int quadrature_order, int profile_nodes) {
    const auto tp = amplitude_tables(set, spec, InitialStateSpec::plus(),
                                     FormulaPath::incoming_sym);
    const auto tm = amplitude_tables(set, spec, InitialStateSpec::minus(),
                                     FormulaPath::incoming_sym);
    const auto tf = amplitude_tables(set, spec, InitialStateSpec::pair(),
                                     FormulaPath::incoming_sym);

    AveragingCheck out;
    out.sigma_plus = integrate_total(tp, 1.0, quadrature_order);
    out.sigma_minus = integrate_total(tm, 1.0, quadrature_order);
    out.sigma_pair = integrate_total(tf, 1.0, quadrature_order);
    const double avg = 0.5 * (out.sigma_plus + out.sigma_minus);
    out.integrated_rel_dev =
        std::abs(out.sigma_pair - avg) / std::max(std::abs(out.sigma_pair), 1e-300);

    double worst = 0.0;
    for (int i = 0; i < profile_nodes; ++i) {
        const double th = M_PI * i / (profile_nodes - 1);
        const double lhs = sigma_at(tp, std::cos(th), 1.0) + sigma_at(tm, std::cos(th), 1.0);
        const double rhs = sigma_at(tf, std::cos(th), 1.0) + sigma_at(tf, -std::cos(th), 1.0);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
    }
    out.parallelogram_max_rel = worst;
    return out;
}

double control_metric(double sigma_plus, double sigma_minus, double sigma_ref) {
    if (!(sigma_ref > 0.0)) {
        throw input_error("control_metric: reference cross section must be positive");
    }
    return std::abs(100.0 * (sigma_plus - sigma_minus) / sigma_ref);
}

SatelliteReport satellite_accounting(const TMatrixSet& t_entangled, const TMatrixSet* t_sat11,
                                     const TMatrixSet* t_sat22, const ProductPrep& prep,
                                     const MoleculeLabels& out1, const MoleculeLabels& out2,
                                     const SatelliteOptions& opts, const PhysicalConstants& pc) {
    SatelliteReport rep;
    rep.decomposition = decompose_product(prep);
    rep.satellites_included = opts.include_satellites;

    DcsOptions dopts;
    dopts.quadrature_order = opts.quadrature_order;
    dopts.flux_factor = opts.flux_factor;

    // entangled component from the main set
    const auto spec_ent =
        TransitionSpec::from_set(t_entangled, prep.mol1, prep.mol2, out1, out2, pc);
    rep.entangled.name = "entangled";
    rep.entangled.weight = rep.decomposition.y * rep.decomposition.y;
    rep.entangled.channel_open = true;
    rep.entangled.computed = true;
    rep.entangled.sigma_total_A2 =
        total(t_entangled, spec_ent,
              InitialStateSpec::general(rep.decomposition.alpha, rep.decomposition.beta),
              opts.quadrature_order, dopts);

    const double E_k = t_entangled.E_k_cm1;
    const double E_out = level_energy(out1.j, out1.v, t_entangled.trunc) +
                         level_energy(out2.j, out2.v, t_entangled.trunc);

    auto handle_satellite = [&](const MoleculeLabels& mol, std::complex<double> coef,
                                const TMatrixSet* tsat, const std::string& name) {
        SatelliteComponent c;
        c.name = name;
        c.weight = std::norm(coef);
        const double E_total_sat = E_k + 2.0 * level_energy(mol.j, mol.v, t_entangled.trunc);
        c.channel_open = E_total_sat >= E_out;
        if (!c.channel_open) {
            c.computed = true;  // exactly zero below threshold
            c.sigma_total_A2 = 0.0;
            return c;
        }
        if (!tsat) {
            c.computed = false;  // needs a solve at the satellite's total energy
            return c;
        }
        if (std::abs(tsat->E_total_cm1 - E_total_sat) > 1e-6 * std::max(1.0, E_total_sat)) {
            throw input_error("satellite_accounting: " + name +
                              " T set total energy does not match E_k + 2 E(level)");
        }
        const auto spec_sat = TransitionSpec::from_set(*tsat, mol, mol, out1, out2, pc);
        c.computed = true;
        c.sigma_total_A2 =
            total(*tsat, spec_sat, InitialStateSpec::identical(), opts.quadrature_order, dopts);
        return c;
    };

    rep.satellite11 = handle_satellite(prep.mol1, rep.decomposition.satellite11, t_sat11, "satellite11");
    rep.satellite22 = handle_satellite(prep.mol2, rep.decomposition.satellite22, t_sat22, "satellite22");

    rep.sigma_dp_total_A2 = rep.entangled.weight * rep.entangled.sigma_total_A2;
    double sat_contrib = 0.0;
    for (const auto* c : {&rep.satellite11, &rep.satellite22}) {
        if (c->computed) sat_contrib += c->weight * c->sigma_total_A2;
    }
    if (opts.include_satellites) rep.sigma_dp_total_A2 += sat_contrib;
    rep.satellite_to_entangled_ratio =
        sat_contrib / std::max(rep.entangled.weight * rep.entangled.sigma_total_A2, 1e-300);
    return rep;
}

namespace {
std::string now_string() {
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}
}  // namespace

void write_dcs_csv(std::ostream& os, const CrossSectionReport& rep, bool timestamp) {
    os << "# dcs csv schema=1\n";
    if (timestamp) os << "# generated " << now_string() << "\n";
    os << "# total_A2=" << std::setprecision(17) << rep.total_A2
       << " converged=" << (rep.total_converged ? 1 : 0);
    if (rep.d_c_percent) os << " d_c_percent=" << *rep.d_c_percent;
    os << "\n";
    os << "theta_rad,sigma,initial_tag,final_channel,E_k\n";
    const std::string chan = channel_tag(rep.out_j1, rep.out_v1, rep.out_j2, rep.out_v2);
    os << std::setprecision(17);
    for (std::size_t i = 0; i < rep.theta.size(); ++i) {
        os << rep.theta[i] << "," << rep.sigma[i] << "," << rep.initial_tag << "," << chan << ","
           << rep.E_k_cm1 << "\n";
    }
}

void write_dcs_json(std::ostream& os, const CrossSectionReport& rep, bool timestamp) {
    nlohmann::json j;
    j["schema"] = 1;
    if (timestamp) j["generated"] = now_string();
    j["initial_tag"] = rep.initial_tag;
    j["final_channel"] = channel_tag(rep.out_j1, rep.out_v1, rep.out_j2, rep.out_v2);
    j["E_k_cm1"] = rep.E_k_cm1;
    j["total_A2"] = rep.total_A2;
    j["total_refined_A2"] = rep.total_refined_A2;
    j["total_converged"] = rep.total_converged;
    if (rep.d_c_percent) j["d_c_percent"] = *rep.d_c_percent;
    j["theta_rad"] = rep.theta;
    j["sigma"] = rep.sigma;
    os << j.dump(2) << "\n";
}

}  // namespace escat
