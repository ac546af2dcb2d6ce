#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "escat/pes.hpp"
#include "oracle_racah.hpp"

using namespace escat;

namespace {

// ---- quadrature oracle for the angular factor ------------------------------
// <bra| A_{l1 l2 l} |ket> by explicit magnetic sums with every Gaunt integral
// evaluated by Gauss-Legendre quadrature; uses only the test-side Racah CG
// and std::assoc_legendre, nothing from the recoupling implementation.

double ylm_theta(int l, int m, double x) {
    const int am = std::abs(m);
    if (am > l) return 0.0;
    double lnr = 0.0;
    for (int k = l - am + 1; k <= l + am; ++k) lnr += std::log(double(k));
    const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI) * std::exp(-lnr));
    double v = norm * std::assoc_legendre(l, am, x) * ((am % 2) ? -1.0 : 1.0);  // CS phase
    if (m < 0 && am % 2 != 0) v = -v;
    return v;
}

struct GaussGrid {
    std::vector<double> x, w;
    explicit GaussGrid(int n) : x(n), w(n) {
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
    }
};

double gaunt_quad(int l1, int m1, int l2, int m2, int l3, int m3) {
    if (m1 + m2 + m3 != 0) return 0.0;
    static GaussGrid g(72);
    static std::map<std::array<int, 6>, double> cache;
    const std::array<int, 6> key{l1, m1, l2, m2, l3, m3};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        acc += g.w[i] * ylm_theta(l1, m1, g.x[i]) * ylm_theta(l2, m2, g.x[i]) *
               ylm_theta(l3, m3, g.x[i]);
    }
    acc *= 2.0 * M_PI;
    cache[key] = acc;
    return acc;
}

double coupling_quadrature(const ChannelState& bra, const ChannelState& ket,
                           const RadialTerm& term) {
    const int j1 = bra.mol1.j.as_int(), j2 = bra.mol2.j.as_int();
    const int j12 = bra.j12.as_int(), l = bra.l.as_int();
    const int j1p = ket.mol1.j.as_int(), j2p = ket.mol2.j.as_int();
    const int j12p = ket.j12.as_int(), lp = ket.l.as_int();
    const int J = bra.J.as_int();
    const int L1 = term.lambda1, L2 = term.lambda2, L = term.lambda;
    const int M = 0;
    double acc = 0.0;
    for (int m1 = -j1; m1 <= j1; ++m1) {
        for (int m2 = -j2; m2 <= j2; ++m2) {
            const int m12 = m1 + m2;
            if (std::abs(m12) > j12) continue;
            const int ml = M - m12;
            if (std::abs(ml) > l) continue;
            const double cb = oracle::cg(j1, m1, j2, m2, j12, m12) *
                              oracle::cg(j12, m12, l, ml, J, M);
            if (cb == 0.0) continue;
            for (int mu1 = -L1; mu1 <= L1; ++mu1) {
                for (int mu2 = -L2; mu2 <= L2; ++mu2) {
                    const int mu = mu1 + mu2;
                    if (std::abs(mu) > L) continue;
                    const double ca = oracle::cg(L1, mu1, L2, mu2, L, mu);
                    if (ca == 0.0) continue;
                    const int m1p = m1 + mu1;
                    const int m2p = m2 + mu2;
                    if (std::abs(m1p) > j1p || std::abs(m2p) > j2p) continue;
                    const int m12p = m1p + m2p;
                    if (std::abs(m12p) > j12p) continue;
                    const int mlp = M - m12p;
                    if (std::abs(mlp) > lp) continue;
                    const double ck = oracle::cg(j1p, m1p, j2p, m2p, j12p, m12p) *
                                      oracle::cg(j12p, m12p, lp, mlp, J, M);
                    if (ck == 0.0) continue;
                    // <Y_{j m}| Y_{L mu} |Y_{j' m'}> etc.; conj(Y_lm) = (-1)^m Y_{l,-m}
                    const double g1 =
                        ((m1 % 2) ? -1.0 : 1.0) * gaunt_quad(j1, -m1, L1, mu1, j1p, m1p);
                    if (g1 == 0.0) continue;
                    const double g2 =
                        ((m2 % 2) ? -1.0 : 1.0) * gaunt_quad(j2, -m2, L2, mu2, j2p, m2p);
                    if (g2 == 0.0) continue;
                    const double g3 = (((ml + mu) % 2) ? -1.0 : 1.0) *
                                      gaunt_quad(l, -ml, L, -mu, lp, mlp);
                    if (g3 == 0.0) continue;
                    acc += cb * ck * ca * g1 * g2 * g3;
                }
            }
        }
    }
    return acc;
}

ChannelState chan(int j1, int j2, int j12, int l, int J) {
    ChannelState c;
    c.mol1 = {HalfInt(j1), 0, 0.0};
    c.mol2 = {HalfInt(j2), 0, 0.0};
    c.j12 = HalfInt(j12);
    c.l = HalfInt(l);
    c.J = HalfInt(J);
    return c;
}

RadialTerm unit_term(int l1, int l2, int l) {
    RadialTerm t;
    t.lambda1 = l1;
    t.lambda2 = l2;
    t.lambda = l;
    t.radial = RadialTable::sample([](double) { return 1.0; }, 0.4, 250.0, 16);
    return t;
}

}  // namespace

TEST_CASE("radial table: spline accuracy and zero extrapolation") {
    auto tab = RadialTable::sample([](double R) { return 24.0 * std::pow(3.5 / R, 6); }, 0.5,
                                   100.0, 2048);
    for (double R : {0.8, 1.7, 3.5, 12.0, 60.0}) {
        CHECK(tab.eval(R) ==
              doctest::Approx(24.0 * std::pow(3.5 / R, 6)).epsilon(1e-8));
    }
    CHECK(tab.eval(0.3) == 0.0);
    CHECK(tab.eval(150.0) == 0.0);
    CHECK_THROWS_AS(RadialTable::from_points({1.0, 0.9, 2.0, 3.0}, {0, 0, 0, 0}), input_error);
}

TEST_CASE("isotropic term couples nothing and carries (4pi)^{-3/2}") {
    const auto t = unit_term(0, 0, 0);
    const double diag = coupling_matrix_element(chan(2, 0, 2, 1, 3), chan(2, 0, 2, 1, 3), t);
    CHECK(diag == doctest::Approx(std::pow(4.0 * M_PI, -1.5)).epsilon(1e-13));
    CHECK(coupling_matrix_element(chan(2, 0, 2, 1, 3), chan(2, 0, 2, 3, 3), t) == 0.0);
    CHECK(coupling_matrix_element(chan(2, 0, 2, 1, 3), chan(0, 0, 0, 3, 3), t) == 0.0);
}

TEST_CASE("J mismatch throws") {
    const auto t = unit_term(0, 0, 0);
    CHECK_THROWS_AS(coupling_matrix_element(chan(0, 0, 0, 2, 2), chan(0, 0, 0, 3, 3), t),
                    input_error);
}

TEST_CASE("parity-violating pair gives zero") {
    // l + lambda + l' odd -> (l lambda l'; 000) = 0
    const auto t = unit_term(2, 0, 2);
    CHECK(coupling_matrix_element(chan(2, 0, 2, 2, 2), chan(2, 0, 2, 3, 2), t) == 0.0);
}

TEST_CASE("recoupling formula vs quadrature: frozen spot values") {
    // (2,0,2) coupling (0 0 0 2) -> (2 0 2 0) at J = 2, value from the
    // quadrature oracle
    const auto t202 = unit_term(2, 0, 2);
    const auto bra = chan(0, 0, 0, 2, 2);
    const auto ket = chan(2, 0, 2, 0, 2);
    const double q = coupling_quadrature(bra, ket, t202);
    const double f = coupling_matrix_element(bra, ket, t202);
    CHECK(f == doctest::Approx(q).epsilon(1e-9));
    CHECK(f == doctest::Approx(0.02244839026).epsilon(1e-8));  // frozen from the oracle
}

TEST_CASE("recoupling formula vs quadrature: all basis pairs with j <= 4 at J = 2") {
    BasisTruncation trunc;
    trunc.j_max = 4;
    trunc.v_max = 0;
    trunc.para_only = true;
    auto basis = build_channel_basis_at_energy(2000.0, trunc, HalfInt(2), 1.00794);
    const RadialTerm terms[] = {unit_term(0, 0, 0), unit_term(2, 0, 2), unit_term(0, 2, 2),
                                unit_term(2, 2, 4)};
    std::mt19937 rng(17);
    int checked = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = i; j < basis.size(); ++j) {
            // full matrix for the lighter terms; sample the dense j = 4 block
            const bool heavy = basis[i].mol1.j.as_int() + basis[i].mol2.j.as_int() +
                                   basis[j].mol1.j.as_int() + basis[j].mol2.j.as_int() >
                               8;
            if (heavy && rng() % 7 != 0) continue;
            for (const auto& t : terms) {
                const double f = coupling_matrix_element(basis[i], basis[j], t);
                const double q = coupling_quadrature(basis[i], basis[j], t);
                CHECK(f == doctest::Approx(q).epsilon(1e-8));
                ++checked;
            }
        }
    }
    CHECK(checked > 2000);
}

TEST_CASE("potential matrix: symmetry, exchange symmetry, decay") {
    auto model = default_model();
    BasisTruncation trunc;
    trunc.j_max = 2;
    auto basis = build_channel_basis_at_energy(500.0, trunc, HalfInt(2), 1.00794);
    auto table = build_coupling_table(basis, model);

    const auto W = potential_matrix(3.2, table, model);
    CHECK((W - W.transpose()).cwiseAbs().maxCoeff() < 1e-12 * W.cwiseAbs().maxCoeff());

    // exchange test: elements between exchanged channel pairs coincide
    std::map<std::uint64_t, int> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index[key_of(basis[i]).packed()] = int(i);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const int ie = index.at(key_of(basis[i]).exchanged().packed());
            const int je = index.at(key_of(basis[j]).exchanged().packed());
            CHECK(W(i, j) == doctest::Approx(W(ie, je)).epsilon(1e-10));
        }
    }

    // large R beyond the tabulated grid -> exactly zero
    const auto Wfar = potential_matrix(300.0, table, model);
    CHECK(Wfar.cwiseAbs().maxCoeff() == 0.0);
    // well region: the isotropic diagonal matches the 12-6 form
    const auto Wmin = potential_matrix(3.5, table, model);
    CHECK(Wmin(0, 0) == doctest::Approx(-24.0).epsilon(1e-6));
}

TEST_CASE("model validation") {
    PotentialModel m;
    m.terms.push_back(unit_term(2, 0, 2));
    m.symmetric_under_exchange = true;
    CHECK_THROWS_AS(m.validate(), input_error);  // missing (0,2,2) mirror
    m.terms.push_back(unit_term(0, 2, 2));
    CHECK_NOTHROW(m.validate());
    m.terms.push_back(unit_term(1, 0, 1));  // odd lambda under para
    CHECK_THROWS_AS(m.validate(), input_error);
    m.terms.pop_back();
    m.terms.push_back(unit_term(2, 0, 5));  // triangle violation
    CHECK_THROWS_AS(m.validate(), input_error);
}

TEST_CASE("potential file round trip") {
    auto model = default_model();
    const std::string path = "test_potential.tmp";
    save_potential(path, model);
    auto loaded = load_potential(path);
    CHECK(loaded.terms.size() == model.terms.size());
    CHECK(loaded.content_hash() == model.content_hash());
    for (double R : {1.0, 2.7, 3.5, 8.0}) {
        CHECK(loaded.terms[0].radial.eval(R) ==
              doctest::Approx(model.terms[0].radial.eval(R)).epsilon(1e-12));
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_potential("no_such_file.pot"), io_error);
}
