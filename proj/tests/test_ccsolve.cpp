#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "escat/ccsolve.hpp"
#include "oracle_numerov.hpp"

using namespace escat;

namespace {

PotentialModel iso_only_model(double eps = 24.0, double rm = 3.5) {
    PotentialModel m;
    RadialTerm iso;
    iso.lambda1 = iso.lambda2 = iso.lambda = 0;
    const double scale = std::pow(4.0 * M_PI, 1.5);
    iso.radial = RadialTable::sample(
        [=](double R) {
            const double s6 = std::pow(rm / R, 6);
            return scale * eps * (s6 * s6 - 2.0 * s6);
        },
        0.4, 250.0, 3072);
    m.terms.push_back(iso);
    return m;
}

PotentialModel zero_model() {
    PotentialModel m;
    RadialTerm iso;
    iso.lambda1 = iso.lambda2 = iso.lambda = 0;
    iso.radial = RadialTable::sample([](double) { return 0.0; }, 0.4, 250.0, 16);
    m.terms.push_back(iso);
    return m;
}

CollisionSpec spec20(double E_k, int j_max) {
    CollisionSpec s;
    s.E_k_cm1 = E_k;
    s.mol1 = {HalfInt(2), HalfInt(0), 0};
    s.mol2 = {HalfInt(0), HalfInt(0), 0};
    s.trunc.j_max = j_max;
    s.trunc.v_max = 0;
    s.trunc.para_only = true;
    s.trunc.B_cm1 = 59.3;
    s.mu_amu = 1.00794;
    return s;
}

double phase_mod_pi(std::complex<double> s_elem) {
    double d = 0.5 * std::arg(s_elem);
    while (d > M_PI / 2.0) d -= M_PI;
    while (d < -M_PI / 2.0) d += M_PI;
    return d;
}

double phase_diff_mod_pi(double a, double b) {
    double d = a - b;
    while (d > M_PI / 2.0) d -= M_PI;
    while (d < -M_PI / 2.0) d += M_PI;
    return std::abs(d);
}

}  // namespace

TEST_CASE("zero potential gives S = identity") {
    // The hard-wall start must sit at R ~ 0 for free motion, where it
    // coincides with the regular boundary condition (an l = 0 wall at a
    // finite R_start is a real hard sphere with delta = -k R_start).
    auto spec = spec20(30.0, 2);
    PropagationConfig cfg;
    cfg.R_start = 1e-7;
    cfg.R_match = 25.0;
    cfg.step = 0.02;
    auto block = propagate(HalfInt(1), spec, zero_model(), cfg);
    const auto T = t_from_s(block);
    CHECK(T.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(block.unitarity_defect < 1e-10);
}

TEST_CASE("single-channel phase shifts match the Numerov oracle to 1e-6") {
    const double mu = 1.00794;
    const PhysicalConstants pc;
    const double uf = mu / pc.hbar2_over_2amuA2_cm1;
    auto U = [&](double R) {
        const double s6 = std::pow(3.5 / R, 6);
        return uf * 24.0 * (s6 * s6 - 2.0 * s6);
    };
    auto model = iso_only_model();

    BasisTruncation trunc;
    trunc.j_max = 0;
    trunc.v_max = 0;
    for (double E_k : {4.0, 40.0, 400.0}) {
        const double k = std::sqrt(E_k * uf);
        for (int l : {0, 1, 3}) {
            PropagationConfig cfg;
            cfg.R_start = 1.5;
            cfg.R_match = 40.0;
            cfg.step = 0.01;
            cfg.long_range_R = 40.0;  // uniform step for the oracle comparison
            auto blk = propagate_at_energy(E_k, trunc, HalfInt(l), mu, model, cfg);
            REQUIRE(blk.open_channels.size() == 1);
            const double d_cc = phase_mod_pi(blk.S(0, 0));
            const double d_or = oracle::numerov_phase(U, l, k, 1.5, 40.0, 2.5e-4);
            CHECK(phase_diff_mod_pi(d_cc, d_or) < 1e-6);
        }
    }
}

TEST_CASE("halving the step reduces the phase error") {
    const double mu = 1.00794;
    const PhysicalConstants pc;
    const double uf = mu / pc.hbar2_over_2amuA2_cm1;
    auto U = [&](double R) {
        const double s6 = std::pow(3.5 / R, 6);
        return uf * 24.0 * (s6 * s6 - 2.0 * s6);
    };
    auto model = iso_only_model();
    BasisTruncation trunc;
    trunc.j_max = 0;
    const double E_k = 40.0;
    const int l = 2;
    const double d_or =
        oracle::numerov_phase(U, l, std::sqrt(E_k * uf), 1.5, 40.0, 2.5e-4);
    double err_coarse = 0.0, err_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        PropagationConfig cfg;
        cfg.R_start = 1.5;
        cfg.R_match = 40.0;
        cfg.step = pass == 0 ? 0.16 : 0.08;
        cfg.long_range_R = 40.0;  // uniform
        auto blk = propagate_at_energy(E_k, trunc, HalfInt(l), mu, model, cfg);
        const double err = phase_diff_mod_pi(phase_mod_pi(blk.S(0, 0)), d_or);
        (pass == 0 ? err_coarse : err_fine) = err;
        CHECK(blk.unitarity_defect < 1e-6);
    }
    CHECK(err_fine < err_coarse);
    CHECK(err_fine < err_coarse / 4.0);  // ~O(h^4) propagator
}

TEST_CASE("multichannel block: unitarity, symmetry, flux conservation") {
    auto spec = spec20(4.0, 2);
    PropagationConfig cfg;
    cfg.R_start = 1.5;
    cfg.R_match = 30.0;
    cfg.step = 0.01;
    auto blk = propagate(HalfInt(2), spec, default_model(), cfg);
    CHECK(blk.unitarity_defect < 1e-6);
    CHECK(blk.symmetry_defect < 1e-6);
    // flux conservation per row
    const auto rows = (blk.S * blk.S.adjoint()).diagonal();
    for (Eigen::Index i = 0; i < rows.size(); ++i) {
        CHECK(std::abs(rows(i).real() - 1.0) < 1e-6);
    }
    // closed channels were eliminated: only open ones reported
    for (const auto& c : blk.open_channels) CHECK(c.open);
}

TEST_CASE("exchange relation on the symmetric default model (J = 1)") {
    auto spec = spec20(4.0, 4);
    spec.mol1 = {HalfInt(4), HalfInt(0), 0};
    spec.mol2 = {HalfInt(0), HalfInt(0), 0};
    PropagationConfig cfg;
    cfg.R_start = 1.5;
    cfg.R_match = 30.0;
    cfg.step = 0.015;
    auto blk = propagate(HalfInt(1), spec, default_model(), cfg);
    CHECK(blk.unitarity_defect < 1e-6);

    // T(2020 j12' l' | 4000 4 l) = (-1)^{j12'} T(2020 j12' l' | 0040 4 l)
    const auto T = t_from_s(blk);
    std::map<std::uint64_t, int> idx;
    for (std::size_t i = 0; i < blk.open_channels.size(); ++i) {
        idx[key_of(blk.open_channels[i]).packed()] = int(i);
    }
    double ref = 0.0, worst = 0.0;
    int compared = 0;
    for (std::size_t i = 0; i < blk.open_channels.size(); ++i) {
        const auto& bra = blk.open_channels[i];
        if (bra.mol1.j.as_int() != 2 || bra.mol2.j.as_int() != 2) continue;
        for (std::size_t j = 0; j < blk.open_channels.size(); ++j) {
            const auto& ket = blk.open_channels[j];
            if (ket.mol1.j.as_int() != 4 || ket.mol2.j.as_int() != 0) continue;
            const int je = idx.at(key_of(ket).exchanged().packed());
            const double ph = bra.j12.as_int() % 2 == 0 ? 1.0 : -1.0;
            const std::complex<double> diff = T(i, j) - ph * T(i, je);
            worst = std::max(worst, std::abs(diff));
            ref = std::max({ref, std::abs(T(i, j)), std::abs(T(i, je))});
            ++compared;
        }
    }
    REQUIRE(compared > 0);
    CHECK(worst / ref < 1e-6);
}

TEST_CASE("no open channels raises input_error") {
    BasisTruncation trunc;
    trunc.j_max = 2;
    trunc.B_cm1 = 59.3;
    PropagationConfig cfg;
    // total energy below every channel threshold is impossible (ground level
    // is 0); drive the error with a negative total energy instead
    CHECK_THROWS_AS(
        propagate_at_energy(-5.0, trunc, HalfInt(0), 1.00794, iso_only_model(), cfg),
        input_error);
}

TEST_CASE("t_from_s round trip and diagonal identity") {
    auto spec = spec20(40.0, 0);
    spec.mol1 = {HalfInt(0), HalfInt(0), 0};
    spec.mol2 = {HalfInt(2), HalfInt(0), 0};
    spec.trunc.j_max = 2;
    PropagationConfig cfg;
    cfg.R_start = 1.5;
    cfg.R_match = 30.0;
    cfg.step = 0.02;
    auto blk = propagate(HalfInt(0), spec, iso_only_model(), cfg);
    const auto T = t_from_s(blk);
    const auto S2 = s_from_t(T);
    CHECK((S2 - blk.S).cwiseAbs().maxCoeff() < 1e-15);
    // the iso model is diagonal: |T| = 2 |sin delta| on the diagonal
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
        const double delta = 0.5 * std::arg(blk.S(i, i));
        CHECK(std::abs(T(i, i)) == doctest::Approx(2.0 * std::abs(std::sin(delta))).epsilon(1e-8));
    }
}
