#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "escat/angmom.hpp"
#include "oracle_racah.hpp"

using namespace escat;
using namespace escat::angmom;

namespace {
HalfInt h(int j) { return HalfInt(j); }
}  // namespace

TEST_CASE("clebsch_gordan frozen values") {
    CHECK(clebsch_gordan(h(0), h(0), h(0), h(0), h(0), h(0)) == doctest::Approx(1.0));
    // C^{20}_{1010} = sqrt(2/3), from the Racah closed form
    CHECK(clebsch_gordan(h(1), h(0), h(1), h(0), h(2), h(0)) ==
          doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(oracle::cg(1, 0, 1, 0, 2, 0) == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    // m1 + m2 != m3 -> exactly 0
    CHECK(clebsch_gordan(h(1), h(1), h(1), h(1), h(0), h(0)) == 0.0);
    // triangle violation -> exactly 0
    CHECK(clebsch_gordan(h(1), h(0), h(1), h(0), h(3), h(0)) == 0.0);
}

TEST_CASE("clebsch_gordan malformed input throws") {
    CHECK_THROWS_AS(clebsch_gordan(HalfInt::from_twice(-2), h(0), h(1), h(0), h(1), h(0)),
                    input_error);
    // projection parity mismatch: j = 1, m = 1/2
    CHECK_THROWS_AS(
        clebsch_gordan(h(1), HalfInt::from_twice(1), h(1), h(0), h(1), HalfInt::from_twice(1)),
        input_error);
    // |m| > j
    CHECK_THROWS_AS(clebsch_gordan(h(1), h(2), h(1), h(0), h(2), h(2)), input_error);
}

TEST_CASE("clebsch_gordan matches the Racah oracle exhaustively for j <= 4") {
    for (int j1 = 0; j1 <= 4; ++j1)
        for (int j2 = 0; j2 <= 4; ++j2)
            for (int j3 = std::abs(j1 - j2); j3 <= j1 + j2; ++j3)
                for (int m1 = -j1; m1 <= j1; ++m1)
                    for (int m2 = -j2; m2 <= j2; ++m2) {
                        const int m3 = m1 + m2;
                        if (std::abs(m3) > j3) continue;
                        const double lib =
                            clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(j3), h(m3));
                        const double ora = oracle::cg(j1, m1, j2, m2, j3, m3);
                        CHECK(lib == doctest::Approx(ora).epsilon(1e-11));
                    }
}

TEST_CASE("clebsch_gordan orthogonality for j <= 6") {
    for (int j1 = 0; j1 <= 6; j1 += 2)
        for (int j2 = 0; j2 <= 6; j2 += 3)
            for (int j = std::abs(j1 - j2); j <= j1 + j2; ++j)
                for (int jp = std::abs(j1 - j2); jp <= j1 + j2; ++jp) {
                    // sum over projections at fixed target m = min(j, jp) magnitudes
                    for (int m = -std::min(j, jp); m <= std::min(j, jp); ++m) {
                        double acc = 0.0;
                        for (int m1 = -j1; m1 <= j1; ++m1) {
                            const int m2 = m - m1;
                            if (std::abs(m2) > j2) continue;
                            acc += clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(j), h(m)) *
                                   clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(jp), h(m));
                        }
                        CHECK(acc == doctest::Approx(j == jp ? 1.0 : 0.0).epsilon(1e-12));
                    }
                }
}

TEST_CASE("clebsch_gordan exchange symmetry for j <= 6") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 400; ++trial) {
        const int j1 = int(rng() % 7), j2 = int(rng() % 7);
        const int j3 = std::abs(j1 - j2) + int(rng() % (2 * std::min(j1, j2) + 1));
        const int m1 = -j1 + int(rng() % (2 * j1 + 1));
        const int m2 = -j2 + int(rng() % (2 * j2 + 1));
        const int m3 = m1 + m2;
        if (std::abs(m3) > j3) continue;
        const double a = clebsch_gordan(h(j1), h(m1), h(j2), h(m2), h(j3), h(m3));
        const double b = clebsch_gordan(h(j2), h(m2), h(j1), h(m1), h(j3), h(m3));
        const double ph = (j1 + j2 - j3) % 2 == 0 ? 1.0 : -1.0;
        CHECK(a == doctest::Approx(ph * b).epsilon(1e-13));
    }
}

TEST_CASE("wigner_3j values and symmetries") {
    CHECK(wigner_3j(h(1), h(1), h(0), h(0), h(0), h(0)) ==
          doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(oracle::threej(1, 1, 0, 0, 0, 0) ==
          doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-12));
    // against the oracle over a grid, exercising the canonical cache
    for (int j1 = 0; j1 <= 5; ++j1)
        for (int j2 = 0; j2 <= 5; ++j2)
            for (int j3 = std::abs(j1 - j2); j3 <= std::min(5, j1 + j2); ++j3)
                for (int m1 = -j1; m1 <= j1; ++m1)
                    for (int m2 = -j2; m2 <= j2; ++m2) {
                        const int m3 = -m1 - m2;
                        if (std::abs(m3) > j3) continue;
                        CHECK(wigner_3j(h(j1), h(j2), h(j3), h(m1), h(m2), h(m3)) ==
                              doctest::Approx(oracle::threej(j1, j2, j3, m1, m2, m3))
                                  .epsilon(1e-11));
                    }
    CHECK(coupling_cache_size() > 0);
}

TEST_CASE("wigner_6j values") {
    // triangle violation -> 0
    CHECK(wigner_6j(h(1), h(1), h(3), h(1), h(1), h(1)) == 0.0);
    // {1 1 1; 1 1 1} = 1/6 (classic value)
    CHECK(wigner_6j(h(1), h(1), h(1), h(1), h(1), h(1)) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b)
            for (int c = std::abs(a - b); c <= std::min(4, a + b); ++c)
                for (int d = 0; d <= 4; ++d)
                    for (int e = 0; e <= 4; ++e)
                        for (int f = 0; f <= 4; ++f) {
                            const double lib = wigner_6j(h(a), h(b), h(c), h(d), h(e), h(f));
                            const double ora = oracle::sixj(a, b, c, d, e, f);
                            CHECK(lib == doctest::Approx(ora).epsilon(1e-10));
                        }
}

TEST_CASE("wigner_9j basic identities") {
    // all-zero case
    CHECK(wigner_9j(h(0), h(0), h(0), h(0), h(0), h(0), h(0), h(0), h(0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // one zero collapses to a 6j:
    // {a b c; d e f; g h 0} = delta_{cf} delta_{gh} (-1)^{b+c+d+g}
    //                         / sqrt((2c+1)(2g+1)) {a b c; e d g}
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int a = int(rng() % 4), b = int(rng() % 4);
        const int d = int(rng() % 4), e = int(rng() % 4);
        for (int c = std::abs(a - b); c <= a + b; ++c) {
            for (int g = std::abs(a - d); g <= a + d; ++g) {
                const double nine =
                    wigner_9j(h(a), h(b), h(c), h(d), h(e), h(c), h(g), h(g), h(0));
                if (std::abs(b - e) > g || g > b + e) {
                    CHECK(nine == doctest::Approx(0.0).epsilon(1e-12));
                    continue;
                }
                const double ph = (b + c + d + g) % 2 == 0 ? 1.0 : -1.0;
                const double rhs = ph / std::sqrt((2.0 * c + 1.0) * (2.0 * g + 1.0)) *
                                   oracle::sixj(a, b, c, e, d, g);
                CHECK(nine == doctest::Approx(rhs).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("spherical harmonic values and identities") {
    const double inv_sqrt4pi = 1.0 / std::sqrt(4.0 * M_PI);
    CHECK(spherical_harmonic(0, 0, 0.7, 1.3).real() == doctest::Approx(inv_sqrt4pi));
    CHECK(spherical_harmonic(0, 0, 0.7, 1.3).imag() == doctest::Approx(0.0));
    // Y_1^0(0, 0) = sqrt(3/4pi)
    CHECK(spherical_harmonic(1, 0, 0.0, 0.0).real() ==
          doctest::Approx(std::sqrt(3.0 / (4.0 * M_PI))).epsilon(1e-14));
    // Y_1^1 = -sqrt(3/8pi) sin(theta) e^{i phi} (Condon-Shortley)
    const double th = 0.9, ph = 0.4;
    const auto y11 = spherical_harmonic(1, 1, th, ph);
    CHECK(y11.real() ==
          doctest::Approx(-std::sqrt(3.0 / (8.0 * M_PI)) * std::sin(th) * std::cos(ph))
              .epsilon(1e-13));
    CHECK_THROWS_AS(spherical_harmonic(1, 2, 0.3, 0.0), input_error);

    // parity identity Y_l^m(pi - theta, phi + pi) = (-1)^l Y_l^m(theta, phi)
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> uth(0.01, M_PI - 0.01), uph(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 200; ++trial) {
        const int l = int(rng() % 12);
        const int m = l == 0 ? 0 : int(rng() % (2 * l + 1)) - l;
        const double t = uth(rng), p = uph(rng);
        const auto a = spherical_harmonic(l, m, M_PI - t, p + M_PI);
        const auto b = spherical_harmonic(l, m, t, p);
        const double sign = l % 2 == 0 ? 1.0 : -1.0;
        CHECK(std::abs(a - sign * b) < 1e-13 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("spherical harmonic normalization over the sphere, l <= 20") {
    // Gauss-Legendre in cos(theta); phi integral is 2 pi exactly.
    const int n = 64;
    std::vector<double> x(n), w(n);
    // local Newton iteration for nodes (test-side quadrature, no library reuse)
    for (int i = 0; i < (n + 1) / 2; ++i) {
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
    for (int l : {0, 1, 5, 12, 20}) {
        for (int m : {0, 1, l / 2, l}) {
            if (m > l) continue;
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                const double v = sph_harmonic_theta(l, m, x[i]);
                acc += w[i] * v * v;
            }
            acc *= 2.0 * M_PI;
            CHECK(acc == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("sph_harmonic_theta_all matches pointwise calls") {
    std::vector<double> buf(25);
    for (double x : {-0.93, -0.2, 0.4, 0.88}) {
        for (int m : {-3, -1, 0, 2, 5}) {
            sph_harmonic_theta_all(24, m, x, buf.data());
            for (int l = 0; l <= 24; ++l) {
                const double direct = std::abs(m) <= l ? sph_harmonic_theta(l, m, x) : 0.0;
                CHECK(buf[l] == doctest::Approx(direct).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("large-j fallback is continuous with the exact path") {
    // 2j = 40 uses exact rationals, 2j = 42 the log-factorial path; both must
    // agree with the oracle.
    const double a = clebsch_gordan(h(20), h(2), h(20), h(-2), h(20), h(0));
    CHECK(a == doctest::Approx(oracle::cg(20, 2, 20, -2, 20, 0)).epsilon(1e-9));
    const double b = clebsch_gordan(h(21), h(2), h(21), h(-2), h(21), h(0));
    CHECK(b == doctest::Approx(oracle::cg(21, 2, 21, -2, 21, 0)).epsilon(1e-9));
}
