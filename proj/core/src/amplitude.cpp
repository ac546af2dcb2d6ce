#include "escat/amplitude.hpp"

#include <cmath>
#include <sstream>

#include "escat/angmom.hpp"
#include "escat/errors.hpp"

namespace escat {

namespace {

using cplx = std::complex<double>;

// Compensated complex accumulator; the ultracold sums cancel heavily.
struct Kahan {
    cplx sum{0.0, 0.0};
    cplx carry{0.0, 0.0};
    void add(cplx v) {
        const cplx y = v - carry;
        const cplx t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

cplx ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

struct MissingKeys {
    std::vector<std::string> keys;
    void record(HalfInt J, const ChannelKey& bra, const ChannelKey& ket) {
        if (keys.size() >= 12) return;
        std::ostringstream os;
        os << "(J=" << J.str() << " bra=[" << bra.tj1 / 2 << "," << bra.v1 << "," << bra.tj2 / 2
           << "," << bra.v2 << ";j12=" << bra.tj12 / 2 << ",l=" << bra.tl / 2 << "] ket=["
           << ket.tj1 / 2 << "," << ket.v1 << "," << ket.tj2 / 2 << "," << ket.v2
           << ";j12=" << ket.tj12 / 2 << ",l=" << ket.tl / 2 << "])";
        keys.push_back(os.str());
    }
    void throw_if_any() const {
        if (keys.empty()) return;
        std::string msg = "amplitude: required T entries absent:";
        for (const auto& k : keys) msg += "\n  " + k;
        if (keys.size() >= 12) msg += "\n  ...";
        throw input_error(msg);
    }
};

struct Labels {
    int j1, m1, v1, j2, m2, v2;        // initial
    int j1p, m1p, v1p, j2p, m2p, v2p;  // final
};

Labels int_labels(const TransitionSpec& spec, int m1p, int m2p) {
    Labels L{};
    L.j1 = spec.in1.j.as_int();
    L.m1 = spec.in1.m.as_int();
    L.v1 = spec.in1.v;
    L.j2 = spec.in2.j.as_int();
    L.m2 = spec.in2.m.as_int();
    L.v2 = spec.in2.v;
    L.j1p = spec.out1.j.as_int();
    L.m1p = m1p;
    L.v1p = spec.out1.v;
    L.j2p = spec.out2.j.as_int();
    L.m2p = m2p;
    L.v2p = spec.out2.v;
    return L;
}

double cg(int j1, int m1, int j2, int m2, int j3, int m3) {
    return angmom::clebsch_gordan(HalfInt(j1), HalfInt(m1), HalfInt(j2), HalfInt(m2), HalfInt(j3),
                                  HalfInt(m3));
}

int table_lmax(const TMatrixSet& set, int j1p, int j2p) { return set.max_J() + j1p + j2p; }

// Incoming-symmetrized family.  The bracket weights w12(l) / w21(l) multiply
// C^{j12 m12}_{j1 m1 j2 m2} T(..|j1 v1 j2 v2 j12 l) and
// C^{j12 m12}_{j2 m2 j1 m1} T(..|j2 v2 j1 v1 j12 l); every route that
// symmetrizes the incoming state only is one choice of weights.
template <typename W12, typename W21>
std::vector<cplx> build_incoming(const TMatrixSet& set, const TransitionSpec& spec, int m1p,
                                 int m2p, W12&& w12, W21&& w21) {
    const Labels L = int_labels(spec, m1p, m2p);
    const int m12 = L.m1 + L.m2;
    const int m12p = L.m1p + L.m2p;
    const int M = m12;  // C^{JM}_{l 0 j12 m12} forces M = m12
    const int mp = M - m12p;

    std::vector<Kahan> acc(table_lmax(set, L.j1p, L.j2p) + 1);
    MissingKeys missing;

    for (const auto& blk : set.blocks) {
        const int J = blk.J.as_int();
        if (std::abs(M) > J) continue;
        for (int j12 = std::abs(L.j1 - L.j2); j12 <= L.j1 + L.j2; ++j12) {
            if (std::abs(m12) > j12) continue;
            const double ci12 = cg(L.j1, L.m1, L.j2, L.m2, j12, m12);
            const double ci21 = cg(L.j2, L.m2, L.j1, L.m1, j12, m12);
            if (ci12 == 0.0 && ci21 == 0.0) continue;
            for (int l = std::abs(J - j12); l <= J + j12; ++l) {
                const double cw12 = w12(l) * ci12;
                const double cw21 = w21(l) * ci21;
                if (cw12 == 0.0 && cw21 == 0.0) continue;
                const double cl0 = cg(l, 0, j12, m12, J, M);
                if (cl0 == 0.0) continue;
                for (int j12p = std::abs(L.j1p - L.j2p); j12p <= L.j1p + L.j2p; ++j12p) {
                    if (std::abs(m12p) > j12p) continue;
                    const double cf = cg(L.j1p, L.m1p, L.j2p, L.m2p, j12p, m12p);
                    if (cf == 0.0) continue;
                    for (int lp = std::abs(J - j12p); lp <= J + j12p; ++lp) {
                        if (std::abs(mp) > lp) continue;
                        const double clp = cg(lp, mp, j12p, m12p, J, M);
                        if (clp == 0.0) continue;
                        const ChannelKey bra{2 * L.j1p, L.v1p, 2 * L.j2p, L.v2p, 2 * j12p,
                                             2 * lp};
                        cplx bracket = 0.0;
                        if (cw12 != 0.0) {
                            const ChannelKey ket{2 * L.j1, L.v1, 2 * L.j2, L.v2, 2 * j12, 2 * l};
                            if (auto t = set.lookup(blk.J, bra, ket)) {
                                bracket += cw12 * *t;
                            } else {
                                missing.record(blk.J, bra, ket);
                            }
                        }
                        if (cw21 != 0.0) {
                            const ChannelKey ket{2 * L.j2, L.v2, 2 * L.j1, L.v1, 2 * j12, 2 * l};
                            if (auto t = set.lookup(blk.J, bra, ket)) {
                                bracket += cw21 * *t;
                            } else {
                                missing.record(blk.J, bra, ket);
                            }
                        }
                        if (bracket == 0.0) continue;
                        acc[lp].add(std::sqrt(2.0 * l + 1.0) * ipow(l - lp) * cl0 * clp * cf *
                                    bracket);
                    }
                }
            }
        }
    }
    missing.throw_if_any();

    const cplx pref = cplx(0.0, 1.0) * std::sqrt(M_PI) / std::sqrt(spec.k_A_inv * spec.kp_A_inv);
    std::vector<cplx> coef(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) coef[i] = pref * acc[i].sum;
    return coef;
}

std::vector<cplx> build_unsym(const TMatrixSet& set, const TransitionSpec& spec, int m1p, int m2p,
                              bool reversed_z, bool exchanged_initial) {
    auto zero = [](int) { return 0.0; };
    auto one = [](int) { return 1.0; };
    auto alt = [](int l) { return l % 2 == 0 ? 1.0 : -1.0; };
    if (!exchanged_initial && !reversed_z) return build_incoming(set, spec, m1p, m2p, one, zero);
    if (!exchanged_initial && reversed_z) return build_incoming(set, spec, m1p, m2p, alt, zero);
    if (exchanged_initial && !reversed_z) return build_incoming(set, spec, m1p, m2p, zero, one);
    return build_incoming(set, spec, m1p, m2p, zero, alt);
}

std::vector<cplx> build_pm(const TMatrixSet& set, const TransitionSpec& spec, int m1p, int m2p,
                           int sign) {
    if (sign != 1 && sign != -1) throw input_error("amplitude_pm: sign must be +1 or -1");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto w12 = [=](int l) {
        return (1.0 + sign * (l % 2 == 0 ? 1.0 : -1.0)) * inv_sqrt2;
    };
    auto w21 = [=](int l) {
        return sign * (1.0 + sign * (l % 2 == 0 ? 1.0 : -1.0)) * inv_sqrt2;
    };
    return build_incoming(set, spec, m1p, m2p, w12, w21);
}

std::vector<cplx> build_sym_pair(const TMatrixSet& set, const TransitionSpec& spec, int m1p,
                                 int m2p) {
    auto one = [](int) { return 1.0; };
    auto alt = [](int l) { return l % 2 == 0 ? 1.0 : -1.0; };
    return build_incoming(set, spec, m1p, m2p, one, alt);
}

std::vector<cplx> build_identical_pair(const TMatrixSet& set, const TransitionSpec& spec, int m1p,
                                       int m2p) {
    if (!(spec.in1 == spec.in2)) {
        throw input_error("identical-pair amplitude requires equal initial labels");
    }
    // f~(z, aa) + f~(-z, aa): only even incoming l survives.
    auto w12 = [](int l) { return 1.0 + (l % 2 == 0 ? 1.0 : -1.0); };
    auto zero = [](int) { return 0.0; };
    return build_incoming(set, spec, m1p, m2p, w12, zero);
}

// Outgoing-symmetrized route: four T families with swapped final labels and
// Y(-R^) = (-1)^{l'} Y(R^).
std::vector<cplx> build_outgoing(const TMatrixSet& set, const TransitionSpec& spec, int m1p,
                                 int m2p, int sign) {
    if (sign != 1 && sign != -1) {
        throw input_error("amplitude_outgoing_sym: sign must be +1 or -1");
    }
    const Labels L = int_labels(spec, m1p, m2p);
    const int m12 = L.m1 + L.m2;
    const int m12p = L.m1p + L.m2p;
    const int M = m12;
    const int mp = M - m12p;

    std::vector<Kahan> acc(table_lmax(set, L.j1p, L.j2p) + 1);
    MissingKeys missing;

    for (const auto& blk : set.blocks) {
        const int J = blk.J.as_int();
        if (std::abs(M) > J) continue;
        for (int j12 = std::abs(L.j1 - L.j2); j12 <= L.j1 + L.j2; ++j12) {
            if (std::abs(m12) > j12) continue;
            const double ci12 = cg(L.j1, L.m1, L.j2, L.m2, j12, m12);
            const double ci21 = cg(L.j2, L.m2, L.j1, L.m1, j12, m12);
            if (ci12 == 0.0 && ci21 == 0.0) continue;
            for (int l = std::abs(J - j12); l <= J + j12; ++l) {
                const double cl0 = cg(l, 0, j12, m12, J, M);
                if (cl0 == 0.0) continue;
                for (int j12p = std::abs(L.j1p - L.j2p); j12p <= L.j1p + L.j2p; ++j12p) {
                    if (std::abs(m12p) > j12p) continue;
                    const double cf12 = cg(L.j1p, L.m1p, L.j2p, L.m2p, j12p, m12p);
                    const double cf21 = cg(L.j2p, L.m2p, L.j1p, L.m1p, j12p, m12p);
                    if (cf12 == 0.0 && cf21 == 0.0) continue;
                    for (int lp = std::abs(J - j12p); lp <= J + j12p; ++lp) {
                        if (std::abs(mp) > lp) continue;
                        const double clp = cg(lp, mp, j12p, m12p, J, M);
                        if (clp == 0.0) continue;
                        const double ylp_parity = lp % 2 == 0 ? 1.0 : -1.0;
                        const ChannelKey bra12{2 * L.j1p, L.v1p, 2 * L.j2p, L.v2p, 2 * j12p,
                                               2 * lp};
                        const ChannelKey bra21 = bra12.exchanged();
                        const ChannelKey ket12{2 * L.j1, L.v1, 2 * L.j2, L.v2, 2 * j12, 2 * l};
                        const ChannelKey ket21 = ket12.exchanged();

                        auto fetch = [&](const ChannelKey& b, const ChannelKey& k) -> cplx {
                            if (auto t = set.lookup(blk.J, b, k)) return *t;
                            missing.record(blk.J, b, k);
                            return 0.0;
                        };
                        cplx term = 0.0;
                        if (ci12 != 0.0) {
                            term += ci12 * (cf12 * fetch(bra12, ket12) +
                                            cf21 * ylp_parity * fetch(bra21, ket12));
                        }
                        if (ci21 != 0.0) {
                            term += double(sign) * ci21 *
                                    (cf12 * fetch(bra12, ket21) +
                                     cf21 * ylp_parity * fetch(bra21, ket21));
                        }
                        if (term == 0.0) continue;
                        acc[lp].add(std::sqrt(2.0 * l + 1.0) * ipow(l - lp) * cl0 * clp * term);
                    }
                }
            }
        }
    }
    missing.throw_if_any();

    const cplx pref =
        cplx(0.0, 1.0) * std::sqrt(M_PI) / std::sqrt(2.0 * spec.k_A_inv * spec.kp_A_inv);
    std::vector<cplx> coef(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) coef[i] = pref * acc[i].sum;
    return coef;
}

// Reduced (4,0)->(2,2) form: the ket-exchange relation folds the exchanged-T
// family into [1 + (-1)^{l + j12'}] on the direct one, with l' - l even.
std::vector<cplx> build_reduced(const TMatrixSet& set, const TransitionSpec& spec, int m1p,
                                int m2p, int sign, double exchange_tol) {
    if (sign != 1 && sign != -1) {
        throw input_error("amplitude_reduced_2020: sign must be +1 or -1");
    }
    const Labels L = int_labels(spec, m1p, m2p);
    if (L.j1 != 4 || L.j2 != 0 || L.j1p != 2 || L.j2p != 2 || L.m1 != 0 || L.m2 != 0 ||
        L.v1 != 0 || L.v2 != 0 || L.v1p != 0 || L.v2p != 0) {
        throw input_error(
            "amplitude_reduced_2020: only the (j1,j2)=(4,0), m1=m2=0 -> (2,2) transition is "
            "supported");
    }
    const auto rep = check_exchange_relation(set, HalfInt(2), 0, HalfInt(4), 0, HalfInt(0), 0);
    if (rep.max_relative_deviation > exchange_tol) {
        std::ostringstream os;
        os << "amplitude_reduced_2020: stored set violates the ket-exchange relation ("
           << rep.max_relative_deviation << " > " << exchange_tol << "); use amplitude_pm instead";
        throw input_error(os.str());
    }

    const int m12p = L.m1p + L.m2p;
    const int mp = -m12p;  // M = 0
    std::vector<Kahan> acc(table_lmax(set, 2, 2) + 1);
    MissingKeys missing;
    const double c40 = cg(4, 0, 0, 0, 4, 0);

    for (const auto& blk : set.blocks) {
        const int J = blk.J.as_int();
        for (int l = std::abs(J - 4); l <= J + 4; ++l) {
            const double parity_factor = 1.0 + sign * (l % 2 == 0 ? 1.0 : -1.0);
            if (parity_factor == 0.0) continue;  // [1 +- (-1)^l]
            const double cl0 = cg(l, 0, 4, 0, J, 0);
            if (cl0 == 0.0) continue;
            for (int j12p = 0; j12p <= 4; ++j12p) {
                if ((l + j12p) % 2 != 0) continue;  // [1 + (-1)^{l+j12'}] support
                if (std::abs(m12p) > j12p) continue;
                const double cf = cg(2, L.m1p, 2, L.m2p, j12p, m12p);
                if (cf == 0.0) continue;
                for (int lp = std::abs(J - j12p); lp <= J + j12p; ++lp) {
                    if ((lp - l) % 2 != 0) continue;  // 2n = l' - l
                    if (std::abs(mp) > lp) continue;
                    const double clp = cg(lp, mp, j12p, m12p, J, 0);
                    if (clp == 0.0) continue;
                    const int n = (lp - l) / 2;
                    const ChannelKey bra{4, 0, 4, 0, 2 * j12p, 2 * lp};
                    const ChannelKey ket{8, 0, 0, 0, 8, 2 * l};
                    const auto t = set.lookup(blk.J, bra, ket);
                    if (!t) {
                        missing.record(blk.J, bra, ket);
                        continue;
                    }
                    if (*t == cplx(0.0, 0.0)) continue;
                    acc[lp].add(std::sqrt(2.0 * l + 1.0) * (n % 2 == 0 ? 1.0 : -1.0) *
                                parity_factor * 2.0 * cl0 * clp * cf * c40 * *t);
                }
            }
        }
    }
    missing.throw_if_any();

    const cplx pref =
        cplx(0.0, 1.0) * std::sqrt(M_PI) / std::sqrt(2.0 * spec.k_A_inv * spec.kp_A_inv);
    std::vector<cplx> coef(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) coef[i] = pref * acc[i].sum;
    return coef;
}

std::vector<cplx> combine(const std::vector<cplx>& a, cplx ca, const std::vector<cplx>& b,
                          cplx cb) {
    std::vector<cplx> out(std::max(a.size(), b.size()), cplx(0.0, 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += ca * a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += cb * b[i];
    return out;
}

std::vector<cplx> build_for_initial(const TMatrixSet& set, const TransitionSpec& spec, int m1p,
                                    int m2p, const InitialStateSpec& initial, FormulaPath path) {
    using Kind = InitialStateSpec::Kind;
    switch (path) {
        case FormulaPath::unsymmetrized:
            throw input_error("amplitude_tables: use amplitude_unsym for the unsymmetrized path");
        case FormulaPath::outgoing_sym: {
            if (initial.kind == Kind::pm_plus) return build_outgoing(set, spec, m1p, m2p, +1);
            if (initial.kind == Kind::pm_minus) return build_outgoing(set, spec, m1p, m2p, -1);
            if (initial.kind == Kind::alpha_beta) {
                const auto [cp, cm] = pm_basis_coefficients(initial.alpha, initial.beta);
                return combine(build_outgoing(set, spec, m1p, m2p, +1), cp,
                               build_outgoing(set, spec, m1p, m2p, -1), cm);
            }
            throw input_error("outgoing_sym path supports the +, -, alpha-beta initial states");
        }
        case FormulaPath::reduced: {
            if (initial.kind == Kind::pm_plus) return build_reduced(set, spec, m1p, m2p, +1, 1e-6);
            if (initial.kind == Kind::pm_minus)
                return build_reduced(set, spec, m1p, m2p, -1, 1e-6);
            throw input_error("reduced path supports the +/- initial states only");
        }
        case FormulaPath::incoming_sym: break;
    }
    switch (initial.kind) {
        case Kind::pm_plus: return build_pm(set, spec, m1p, m2p, +1);
        case Kind::pm_minus: return build_pm(set, spec, m1p, m2p, -1);
        case Kind::alpha_beta: {
            const auto [cp, cm] = pm_basis_coefficients(initial.alpha, initial.beta);
            return combine(build_pm(set, spec, m1p, m2p, +1), cp,
                           build_pm(set, spec, m1p, m2p, -1), cm);
        }
        case Kind::sym_pair: return build_sym_pair(set, spec, m1p, m2p);
        case Kind::identical_pair: return build_identical_pair(set, spec, m1p, m2p);
    }
    throw input_error("amplitude_tables: unknown initial state kind");
}

}  // namespace

// ------------------------------------------------------------------ public

std::string to_string(FormulaPath p) {
    switch (p) {
        case FormulaPath::unsymmetrized: return "unsymmetrized";
        case FormulaPath::incoming_sym: return "incoming_sym";
        case FormulaPath::outgoing_sym: return "outgoing_sym";
        case FormulaPath::reduced: return "reduced";
    }
    return "?";
}

std::string InitialStateSpec::tag() const {
    switch (kind) {
        case Kind::pm_plus: return "plus";
        case Kind::pm_minus: return "minus";
        case Kind::alpha_beta: {
            std::ostringstream os;
            os << "alpha=" << alpha << ",beta=" << beta;
            return os.str();
        }
        case Kind::sym_pair: return "pair";
        case Kind::identical_pair: return "identical";
    }
    return "?";
}

TransitionSpec TransitionSpec::from_set(const TMatrixSet& set, const MoleculeLabels& in1,
                                        const MoleculeLabels& in2, const MoleculeLabels& out1,
                                        const MoleculeLabels& out2, const PhysicalConstants& pc) {
    TransitionSpec spec{in1, in2, out1, out2, 0.0, 0.0};
    for (const auto& [mol, what] :
         {std::pair<MoleculeLabels, const char*>{in1, "initial"}, {in2, "initial"},
          {out1, "final"}, {out2, "final"}}) {
        require_valid_jm(mol.j, mol.m, "TransitionSpec");
        if (mol.v < 0 || mol.v > set.trunc.v_max || mol.j.as_int() > set.trunc.j_max ||
            (set.trunc.para_only && mol.j.as_int() % 2 != 0)) {
            throw input_error(std::string("TransitionSpec: ") + what +
                              " labels outside the set's basis truncation");
        }
    }
    const double Ein =
        level_energy(in1.j, in1.v, set.trunc) + level_energy(in2.j, in2.v, set.trunc);
    const double Eout =
        level_energy(out1.j, out1.v, set.trunc) + level_energy(out2.j, out2.v, set.trunc);
    const Wavenumber k = wavenumber(set.E_total_cm1, Ein, set.mu_amu, pc);
    const Wavenumber kp = wavenumber(set.E_total_cm1, Eout, set.mu_amu, pc);
    if (!k.open) throw input_error("TransitionSpec: initial channel closed at this energy");
    if (!kp.open) throw input_error("TransitionSpec: final channel closed at this energy");
    spec.k_A_inv = k.value_A_inv;
    spec.kp_A_inv = kp.value_A_inv;
    return spec;
}

std::complex<double> PartialWaveAmplitude::eval_theta(double cos_theta) const {
    if (coef.empty()) return {0.0, 0.0};
    std::vector<double> th(coef.size());
    angmom::sph_harmonic_theta_all(static_cast<int>(coef.size()) - 1, m_prime, cos_theta,
                                   th.data());
    Kahan acc;
    for (std::size_t l = 0; l < coef.size(); ++l) {
        if (coef[l] != cplx(0.0, 0.0) && th[l] != 0.0) acc.add(coef[l] * th[l]);
    }
    return acc.sum;
}

std::complex<double> PartialWaveAmplitude::eval(double theta, double phi) const {
    return eval_theta(std::cos(theta)) * std::exp(cplx(0.0, m_prime * phi));
}

double PartialWaveAmplitude::norm2(double cos_theta) const {
    return std::norm(eval_theta(cos_theta));
}

std::vector<PartialWaveAmplitude> amplitude_tables(const TMatrixSet& set,
                                                   const TransitionSpec& spec,
                                                   const InitialStateSpec& initial,
                                                   FormulaPath path) {
    const int j1p = spec.out1.j.as_int();
    const int j2p = spec.out2.j.as_int();
    const int m12 = spec.in1.m.as_int() + spec.in2.m.as_int();
    std::vector<PartialWaveAmplitude> out;
    for (int m1p = -j1p; m1p <= j1p; ++m1p) {
        for (int m2p = -j2p; m2p <= j2p; ++m2p) {
            PartialWaveAmplitude pw;
            pw.m1p = m1p;
            pw.m2p = m2p;
            pw.m_prime = m12 - (m1p + m2p);
            pw.coef = build_for_initial(set, spec, m1p, m2p, initial, path);
            out.push_back(std::move(pw));
        }
    }
    return out;
}

std::complex<double> amplitude_unsym(const TMatrixSet& set, const TransitionSpec& spec,
                                     bool reversed_z, bool exchanged_initial, double theta,
                                     double phi) {
    PartialWaveAmplitude pw;
    pw.m1p = spec.out1.m.as_int();
    pw.m2p = spec.out2.m.as_int();
    pw.m_prime = spec.in1.m.as_int() + spec.in2.m.as_int() - (pw.m1p + pw.m2p);
    pw.coef = build_unsym(set, spec, pw.m1p, pw.m2p, reversed_z, exchanged_initial);
    return pw.eval(theta, phi);
}

std::complex<double> amplitude_pm(const TMatrixSet& set, const TransitionSpec& spec, int sign,
                                  double theta, double phi) {
    PartialWaveAmplitude pw;
    pw.m1p = spec.out1.m.as_int();
    pw.m2p = spec.out2.m.as_int();
    pw.m_prime = spec.in1.m.as_int() + spec.in2.m.as_int() - (pw.m1p + pw.m2p);
    pw.coef = build_pm(set, spec, pw.m1p, pw.m2p, sign);
    return pw.eval(theta, phi);
}

std::complex<double> amplitude_general(const TMatrixSet& set, const TransitionSpec& spec,
                                       double alpha, double beta, double theta, double phi) {
    const auto [cp, cm] = pm_basis_coefficients(alpha, beta);
    return cp * amplitude_pm(set, spec, +1, theta, phi) +
           cm * amplitude_pm(set, spec, -1, theta, phi);
}

std::complex<double> amplitude_outgoing_sym(const TMatrixSet& set, const TransitionSpec& spec,
                                            int sign, double theta, double phi) {
    PartialWaveAmplitude pw;
    pw.m1p = spec.out1.m.as_int();
    pw.m2p = spec.out2.m.as_int();
    pw.m_prime = spec.in1.m.as_int() + spec.in2.m.as_int() - (pw.m1p + pw.m2p);
    pw.coef = build_outgoing(set, spec, pw.m1p, pw.m2p, sign);
    return pw.eval(theta, phi);
}

std::complex<double> amplitude_reduced_2020(const TMatrixSet& set, const TransitionSpec& spec,
                                            int sign, double theta, double phi,
                                            double exchange_tol) {
    PartialWaveAmplitude pw;
    pw.m1p = spec.out1.m.as_int();
    pw.m2p = spec.out2.m.as_int();
    pw.m_prime = -(pw.m1p + pw.m2p);
    pw.coef = build_reduced(set, spec, pw.m1p, pw.m2p, sign, exchange_tol);
    return pw.eval(theta, phi);
}

AmplitudeField evaluate_field(const TMatrixSet& set, const TransitionSpec& spec,
                              const InitialStateSpec& initial, FormulaPath path, int n_theta,
                              int n_phi) {
    if (n_theta < 2 || n_phi < 1) throw input_error("evaluate_field: grid too small");
    AmplitudeField field;
    field.path = path;
    field.initial_tag = initial.tag();
    field.theta.resize(n_theta);
    for (int i = 0; i < n_theta; ++i) field.theta[i] = M_PI * i / (n_theta - 1);
    field.phi.resize(n_phi);
    for (int i = 0; i < n_phi; ++i) field.phi[i] = 2.0 * M_PI * i / n_phi;

    const auto tables = amplitude_tables(set, spec, initial, path);
    for (const auto& pw : tables) {
        AmplitudeField::Component comp;
        comp.m1p = pw.m1p;
        comp.m2p = pw.m2p;
        comp.f.resize(n_theta, n_phi);
        for (int it = 0; it < n_theta; ++it) {
            const cplx ftheta = pw.eval_theta(std::cos(field.theta[it]));
            for (int ip = 0; ip < n_phi; ++ip) {
                comp.f(it, ip) = ftheta * std::exp(cplx(0.0, pw.m_prime * field.phi[ip]));
            }
        }
        field.components.push_back(std::move(comp));
    }
    return field;
}

}  // namespace escat
