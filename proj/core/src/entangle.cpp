#include "escat/entangle.hpp"

#include <cmath>

#include "escat/errors.hpp"

namespace escat {

void EntangledPairState::validate() const {
    require_valid_jm(mol1.j, mol1.m, "EntangledPairState.mol1");
    require_valid_jm(mol2.j, mol2.m, "EntangledPairState.mol2");
    if (mol1.v < 0 || mol2.v < 0) throw input_error("EntangledPairState: v < 0");
    if (mol1 == mol2) {
        throw input_error("EntangledPairState: identical (j,m,v) labels admit no entanglement");
    }
}

EntangledPairState EntangledPairState::plus(const MoleculeLabels& a, const MoleculeLabels& b) {
    EntangledPairState s{a, b, M_PI / 4.0, 0.0};
    s.validate();
    return s;
}

EntangledPairState EntangledPairState::minus(const MoleculeLabels& a, const MoleculeLabels& b) {
    EntangledPairState s{a, b, M_PI / 4.0, M_PI};
    s.validate();
    return s;
}

void ProductPrep::validate() const {
    require_valid_jm(mol1.j, mol1.m, "ProductPrep.mol1");
    require_valid_jm(mol2.j, mol2.m, "ProductPrep.mol2");
    if (mol1 == mol2) throw input_error("ProductPrep: the two basis labels must differ");
}

std::string to_string(EntanglementCase c) {
    switch (c) {
        case EntanglementCase::case_a: return "case_a";
        case EntanglementCase::case_b: return "case_b";
        case EntanglementCase::case_c: return "case_c";
        case EntanglementCase::mixed: return "mixed";
    }
    return "?";
}

std::pair<std::complex<double>, std::complex<double>> pm_basis_coefficients(double alpha,
                                                                            double beta) {
    const std::complex<double> e = std::polar(1.0, beta);
    const double c = std::cos(alpha), s = std::sin(alpha);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {(c + s * e) * inv_sqrt2, (c - s * e) * inv_sqrt2};
}

std::pair<std::complex<double>, std::complex<double>> pm_basis_coefficients(
    const EntangledPairState& state) {
    state.validate();
    return pm_basis_coefficients(state.alpha, state.beta);
}

Decomposition decompose_product(const ProductPrep& prep) {
    prep.validate();
    const double c1 = std::cos(prep.alpha1), s1 = std::sin(prep.alpha1);
    const double c2 = std::cos(prep.alpha2), s2 = std::sin(prep.alpha2);

    Decomposition d;
    d.y = std::sqrt(c1 * c1 * s2 * s2 + s1 * s1 * c2 * c2);
    if (d.y < 1e-14) {
        throw input_error(
            "decompose_product: degenerate preparation (y = 0, both molecules share one basis "
            "state)");
    }
    d.satellite11 = c1 * c2;
    d.satellite22 = s1 * s2 * std::polar(1.0, prep.beta1 + prep.beta2);

    // Factor the entangled component as y e^{i phase}(cos a |12> + sin a e^{i b}|21>)
    // with a in [0, pi/2]; negative real coefficients fold into phase/beta.
    double ca = c1 * s2;         // coefficient of |12> before the e^{i beta2} split
    double cb = s1 * c2;         // coefficient of |21>, carrying e^{i beta1}
    d.global_phase = prep.beta2;
    if (ca < 0.0) {
        d.global_phase += M_PI;
        ca = -ca;
        cb = -cb;
    }
    d.alpha = std::acos(std::clamp(ca / d.y, -1.0, 1.0));
    d.beta = prep.beta1 - prep.beta2;
    if (cb < 0.0) d.beta += M_PI;
    return d;
}

EntanglementCase classify_case(const EntangledPairState& state) {
    state.validate();
    const bool dj = state.mol1.j != state.mol2.j;
    const bool dm = state.mol1.m != state.mol2.m;
    const bool dv = state.mol1.v != state.mol2.v;
    if (dm && !dj && !dv) return EntanglementCase::case_a;
    if (dv && !dj && !dm) return EntanglementCase::case_b;
    if (dj && !dm && !dv) return EntanglementCase::case_c;
    return EntanglementCase::mixed;
}

BetaSwitchWeights beta_switch_coefficients(double beta) {
    // a1 = a2 = pi/4: y^2 = 1/2 and alpha = pi/4, so the weights are
    // y^2 |c_+-|^2 = (1 +- cos beta)/4.
    const auto [cp, cm] = pm_basis_coefficients(M_PI / 4.0, beta);
    return {0.5 * std::norm(cp), 0.5 * std::norm(cm)};
}

}  // namespace escat
