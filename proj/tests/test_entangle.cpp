#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "escat/entangle.hpp"

using namespace escat;

namespace {
const MoleculeLabels kA{HalfInt(2), HalfInt(0), 0};
const MoleculeLabels kB{HalfInt(0), HalfInt(0), 0};

// Expand the product state in the four-vector basis {|11>,|12>,|21>,|22>}.
std::array<std::complex<double>, 4> product_coeffs(const ProductPrep& p) {
    const std::complex<double> I(0.0, 1.0);
    const std::complex<double> a1 = std::cos(p.alpha1);
    const std::complex<double> b1 = std::sin(p.alpha1) * std::exp(I * p.beta1);
    const std::complex<double> a2 = std::cos(p.alpha2);
    const std::complex<double> b2 = std::sin(p.alpha2) * std::exp(I * p.beta2);
    return {a1 * a2, a1 * b2, b1 * a2, b1 * b2};
}

// Re-assemble the four coefficients from a Decomposition.
std::array<std::complex<double>, 4> decomposition_coeffs(const Decomposition& d) {
    const std::complex<double> I(0.0, 1.0);
    const std::complex<double> g = d.y * std::exp(I * d.global_phase);
    return {d.satellite11, g * std::cos(d.alpha), g * std::sin(d.alpha) * std::exp(I * d.beta),
            d.satellite22};
}
}  // namespace

TEST_CASE("pm basis coefficients at the special points") {
    auto plus = EntangledPairState::plus(kA, kB);
    auto [cp, cm] = pm_basis_coefficients(plus);
    CHECK(std::abs(cp - 1.0) < 1e-15);
    CHECK(std::abs(cm) < 1e-15);

    auto minus = EntangledPairState::minus(kA, kB);
    auto [cp2, cm2] = pm_basis_coefficients(minus);
    CHECK(std::abs(cp2) < 1e-15);
    CHECK(std::abs(cm2 - 1.0) < 1e-15);

    // alpha = pi/4, beta = pi/2: c_+- = (1 +- i)/2
    auto [cp3, cm3] = pm_basis_coefficients(M_PI / 4.0, M_PI / 2.0);
    CHECK(std::abs(cp3 - std::complex<double>(0.5, 0.5)) < 1e-15);
    CHECK(std::abs(cm3 - std::complex<double>(0.5, -0.5)) < 1e-15);
    CHECK(std::norm(cp3) + std::norm(cm3) == doctest::Approx(1.0));
}

TEST_CASE("pm basis round trip") {
    // c+|+> + c-|-> re-expands to cos(a)|12> + sin(a)e^{ib}|21>
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ua(0.0, M_PI / 2.0), ub(-2.0 * M_PI, 2.0 * M_PI);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = ua(rng), b = ub(rng);
        auto [cp, cm] = pm_basis_coefficients(a, b);
        const std::complex<double> c12 = (cp + cm) * inv_sqrt2;
        const std::complex<double> c21 = (cp - cm) * inv_sqrt2;
        CHECK(std::abs(c12 - std::cos(a)) < 1e-14);
        CHECK(std::abs(c21 - std::sin(a) * std::exp(std::complex<double>(0, b))) < 1e-14);
    }
}

TEST_CASE("decompose_product frozen example") {
    // a1 = a2 = pi/4, b1 = b2 = 0: y = 1/sqrt2, alpha = pi/4, beta = 0,
    // satellites 1/2 and 1/2 (hand expansion of the product state)
    ProductPrep p{kA, kB, M_PI / 4.0, 0.0, M_PI / 4.0, 0.0};
    auto d = decompose_product(p);
    CHECK(d.y == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(d.alpha == doctest::Approx(M_PI / 4.0).epsilon(1e-14));
    CHECK(d.beta == doctest::Approx(0.0));
    CHECK(d.satellite11.real() == doctest::Approx(0.5));
    CHECK(d.satellite22.real() == doctest::Approx(0.5));
}

TEST_CASE("decompose_product pure entangled and degenerate cases") {
    // a1 = 0, a2 = pi/2: molecule 1 in |1>, molecule 2 in |2> -> y = 1, alpha = 0
    ProductPrep pure{kA, kB, 0.0, 0.0, M_PI / 2.0, 0.0};
    auto d = decompose_product(pure);
    CHECK(d.y == doctest::Approx(1.0));
    CHECK(d.alpha == doctest::Approx(0.0));
    CHECK(std::abs(d.satellite11) < 1e-15);
    CHECK(std::abs(d.satellite22) < 1e-15);

    // a1 = a2 = 0: both molecules in |1> -> y = 0 -> degenerate
    ProductPrep degen{kA, kB, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(decompose_product(degen), input_error);
}

TEST_CASE("decomposition norm and round trip over 1000 random preps") {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> ua(0.0, M_PI / 2.0), ub(-M_PI, 3.0 * M_PI);
    int tested = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        ProductPrep p{kA, kB, ua(rng), ub(rng), ua(rng), ub(rng)};
        Decomposition d;
        try {
            d = decompose_product(p);
        } catch (const input_error&) {
            continue;  // degenerate draw
        }
        ++tested;
        const double norm =
            d.y * d.y + std::norm(d.satellite11) + std::norm(d.satellite22);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.alpha >= 0.0);
        CHECK(d.alpha <= M_PI / 2.0 + 1e-15);

        const auto want = product_coeffs(p);
        const auto got = decomposition_coeffs(d);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(want[i] - got[i]) < 1e-12);
        }
    }
    CHECK(tested > 900);
}

TEST_CASE("classify_case") {
    // only m differs
    EntangledPairState a{{HalfInt(2), HalfInt(0), 0}, {HalfInt(2), HalfInt(1), 0}, M_PI / 4, 0};
    CHECK(classify_case(a) == EntanglementCase::case_a);
    // only v differs (the vibrational pair used by the collinear model)
    EntangledPairState b{{HalfInt(0), HalfInt(0), 0}, {HalfInt(0), HalfInt(0), 2}, M_PI / 4, 0};
    CHECK(classify_case(b) == EntanglementCase::case_b);
    // only j differs
    EntangledPairState c{{HalfInt(2), HalfInt(0), 0}, {HalfInt(0), HalfInt(0), 0}, M_PI / 4, 0};
    CHECK(classify_case(c) == EntanglementCase::case_c);
    EntangledPairState m{{HalfInt(2), HalfInt(1), 0}, {HalfInt(0), HalfInt(0), 0}, M_PI / 4, 0};
    CHECK(classify_case(m) == EntanglementCase::mixed);
    EntangledPairState bad{kA, kA, M_PI / 4, 0};
    CHECK_THROWS_AS(classify_case(bad), input_error);
}

TEST_CASE("beta switch weights") {
    auto w0 = beta_switch_coefficients(0.0);
    CHECK(w0.weight_plus == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(w0.weight_minus == doctest::Approx(0.0));
    auto wpi = beta_switch_coefficients(M_PI);
    CHECK(wpi.weight_plus == doctest::Approx(0.0));
    CHECK(wpi.weight_minus == doctest::Approx(0.5).epsilon(1e-14));
    auto wh = beta_switch_coefficients(M_PI / 2.0);
    CHECK(wh.weight_plus == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(wh.weight_minus == doctest::Approx(0.25).epsilon(1e-14));
    // 2n pi periodicity
    auto w4pi = beta_switch_coefficients(4.0 * M_PI);
    CHECK(w4pi.weight_plus == doctest::Approx(0.5).epsilon(1e-12));
}
