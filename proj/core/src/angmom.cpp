#include "escat/angmom.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

namespace escat::angmom {

namespace {

constexpr int kExactTwiceJMax = 40;  // exact rational arithmetic for 2j <= 40

// ---------------------------------------------------------------- factorials

// By value: callers chain these inside gmpxx expression templates, which
// hold references; the growing table must not hand out references into a
// vector that may reallocate mid-expression.
mpz_class mpz_factorial(int n) {
    static std::vector<mpz_class> table = {1_mpz};
    static std::mutex mtx;
    std::scoped_lock lock(mtx);
    while (static_cast<int>(table.size()) <= n) {
        table.push_back(table.back() * static_cast<int>(table.size()));
    }
    return table[n];
}

double log_factorial(int n) {
    static std::vector<double> table = [] {
        std::vector<double> t(512);
        t[0] = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + std::log(double(i));
        return t;
    }();
    if (n < static_cast<int>(table.size())) return table[n];
    return std::lgamma(double(n) + 1.0);
}

// Triangle coefficient Delta(a,b,c) = (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!
// Arguments are twice-values; all factorial arguments are integers when the
// triangle rule holds.
mpq_class mpq_triangle(int ta, int tb, int tc) {
    mpq_class q(mpz_factorial((ta + tb - tc) / 2) * mpz_factorial((ta - tb + tc) / 2) *
                    mpz_factorial((-ta + tb + tc) / 2),
                mpz_factorial((ta + tb + tc) / 2 + 1));
    q.canonicalize();
    return q;
}

double log_triangle(int ta, int tb, int tc) {
    return log_factorial((ta + tb - tc) / 2) + log_factorial((ta - tb + tc) / 2) +
           log_factorial((-ta + tb + tc) / 2) - log_factorial((ta + tb + tc) / 2 + 1);
}

// ------------------------------------------------------------ Racah CG sums

// Exact path: the alternating Racah sum S and squared prefactor P are exact
// rationals; the returned value is sign(S) * sqrt(P * S^2) rounded once.
double cg_exact(int tj1, int tm1, int tj2, int tm2, int tj3, int tm3) {
    const int kmin = std::max({0, (tj2 - tj3 - tm1) / 2, (tj1 - tj3 + tm2) / 2});
    const int kmax = std::min({(tj1 + tj2 - tj3) / 2, (tj1 - tm1) / 2, (tj2 + tm2) / 2});
    if (kmin > kmax) return 0.0;

    mpq_class sum = 0;
    for (int k = kmin; k <= kmax; ++k) {
        mpz_class den = mpz_factorial(k) * mpz_factorial((tj1 + tj2 - tj3) / 2 - k) *
                        mpz_factorial((tj1 - tm1) / 2 - k) * mpz_factorial((tj2 + tm2) / 2 - k) *
                        mpz_factorial((tj3 - tj2 + tm1) / 2 + k) *
                        mpz_factorial((tj3 - tj1 - tm2) / 2 + k);
        mpq_class term(k % 2 == 0 ? 1 : -1, den);
        term.canonicalize();
        sum += term;
    }
    if (sum == 0) return 0.0;

    mpq_class pref = mpq_triangle(tj1, tj2, tj3);
    pref *= tj3 + 1;
    pref *= mpz_factorial((tj1 + tm1) / 2) * mpz_factorial((tj1 - tm1) / 2) *
            mpz_factorial((tj2 + tm2) / 2) * mpz_factorial((tj2 - tm2) / 2) *
            mpz_factorial((tj3 + tm3) / 2) * mpz_factorial((tj3 - tm3) / 2);

    mpq_class csq = pref * sum * sum;  // = C^2, exact; |C| <= 1
    double mag = std::sqrt(csq.get_d());
    return sgn(sum) > 0 ? mag : -mag;
}

double cg_logfact(int tj1, int tm1, int tj2, int tm2, int tj3, int tm3) {
    const int kmin = std::max({0, (tj2 - tj3 - tm1) / 2, (tj1 - tj3 + tm2) / 2});
    const int kmax = std::min({(tj1 + tj2 - tj3) / 2, (tj1 - tm1) / 2, (tj2 + tm2) / 2});
    if (kmin > kmax) return 0.0;

    const double logpref =
        0.5 * (std::log(double(tj3 + 1)) + log_triangle(tj1, tj2, tj3) +
               log_factorial((tj1 + tm1) / 2) + log_factorial((tj1 - tm1) / 2) +
               log_factorial((tj2 + tm2) / 2) + log_factorial((tj2 - tm2) / 2) +
               log_factorial((tj3 + tm3) / 2) + log_factorial((tj3 - tm3) / 2));

    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        double logden = log_factorial(k) + log_factorial((tj1 + tj2 - tj3) / 2 - k) +
                        log_factorial((tj1 - tm1) / 2 - k) + log_factorial((tj2 + tm2) / 2 - k) +
                        log_factorial((tj3 - tj2 + tm1) / 2 + k) +
                        log_factorial((tj3 - tj1 - tm2) / 2 + k);
        double term = std::exp(logpref - logden);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum;
}

// ------------------------------------------------------------- 6j Racah sum

bool triad_ok(int ta, int tb, int tc) {
    return (ta + tb + tc) % 2 == 0 && std::abs(ta - tb) <= tc && tc <= ta + tb;
}

double sixj_exact(int ta, int tb, int tc, int td, int te, int tf) {
    const int s1 = (ta + tb + tc) / 2;
    const int s2 = (ta + te + tf) / 2;
    const int s3 = (td + tb + tf) / 2;
    const int s4 = (td + te + tc) / 2;
    const int r1 = (ta + tb + td + te) / 2;
    const int r2 = (tb + tc + te + tf) / 2;
    const int r3 = (ta + tc + td + tf) / 2;
    const int kmin = std::max({s1, s2, s3, s4});
    const int kmax = std::min({r1, r2, r3});
    if (kmin > kmax) return 0.0;

    mpq_class sum = 0;
    for (int k = kmin; k <= kmax; ++k) {
        mpz_class den = mpz_factorial(k - s1) * mpz_factorial(k - s2) * mpz_factorial(k - s3) *
                        mpz_factorial(k - s4) * mpz_factorial(r1 - k) * mpz_factorial(r2 - k) *
                        mpz_factorial(r3 - k);
        mpq_class term(mpz_factorial(k + 1), den);
        term.canonicalize();
        if (k % 2 != 0) term = -term;
        sum += term;
    }
    if (sum == 0) return 0.0;

    mpq_class pref = mpq_triangle(ta, tb, tc) * mpq_triangle(ta, te, tf) *
                     mpq_triangle(td, tb, tf) * mpq_triangle(td, te, tc);
    mpq_class ssq = pref * sum * sum;
    double mag = std::sqrt(ssq.get_d());
    return sgn(sum) > 0 ? mag : -mag;
}

double sixj_logfact(int ta, int tb, int tc, int td, int te, int tf) {
    const int s1 = (ta + tb + tc) / 2;
    const int s2 = (ta + te + tf) / 2;
    const int s3 = (td + tb + tf) / 2;
    const int s4 = (td + te + tc) / 2;
    const int r1 = (ta + tb + td + te) / 2;
    const int r2 = (tb + tc + te + tf) / 2;
    const int r3 = (ta + tc + td + tf) / 2;
    const int kmin = std::max({s1, s2, s3, s4});
    const int kmax = std::min({r1, r2, r3});
    if (kmin > kmax) return 0.0;

    const double logpref = 0.5 * (log_triangle(ta, tb, tc) + log_triangle(ta, te, tf) +
                                  log_triangle(td, tb, tf) + log_triangle(td, te, tc));
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        double logterm = log_factorial(k + 1) - log_factorial(k - s1) - log_factorial(k - s2) -
                         log_factorial(k - s3) - log_factorial(k - s4) - log_factorial(r1 - k) -
                         log_factorial(r2 - k) - log_factorial(r3 - k);
        double term = std::exp(logpref + logterm);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum;
}

// ---------------------------------------------------------------- 3j cache

// Canonical key: among the 12 classical symmetry variants of a 3-j symbol
// (column permutations and simultaneous m negation) pick the smallest packed
// key; odd permutations and the m flip carry the phase (-1)^{j1+j2+j3}.
struct Canon {
    std::uint64_t key;
    int phase;  // 3j(requested) = phase * 3j(canonical)
};

std::uint64_t pack6(int a, int b, int c, int d, int e, int f) {
    auto u = [](int v) { return static_cast<std::uint64_t>(v + 128) & 0x3ff; };
    return (u(a) << 50) | (u(b) << 40) | (u(c) << 30) | (u(d) << 20) | (u(e) << 10) | u(f);
}

Canon canonical_3j(const std::array<int, 3>& tj, const std::array<int, 3>& tm) {
    static constexpr std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};
    const int tJ = (tj[0] + tj[1] + tj[2]) / 2;
    const int flip_phase = tJ % 2 == 0 ? 1 : -1;
    Canon best{~0ull, 1};
    for (int p = 0; p < 6; ++p) {
        const int perm_phase = p < 3 ? 1 : flip_phase;
        for (int flip = 0; flip < 2; ++flip) {
            const int sgn = flip ? -1 : 1;
            std::uint64_t key =
                pack6(tj[perms[p][0]], tj[perms[p][1]], tj[perms[p][2]], sgn * tm[perms[p][0]],
                      sgn * tm[perms[p][1]], sgn * tm[perms[p][2]]);
            if (key < best.key) best = {key, perm_phase * (flip ? flip_phase : 1)};
        }
    }
    return best;
}

std::shared_mutex g_cache_mutex;
std::unordered_map<std::uint64_t, double> g_cache;

// Raw-key caches for 6j/9j (exact-path arguments only).  6j keys pack six
// 10-bit twice-values; 9j keys pack nine 7-bit twice-values.
std::shared_mutex g_cache6_mutex;
std::unordered_map<std::uint64_t, double> g_cache6;
std::shared_mutex g_cache9_mutex;
std::unordered_map<std::uint64_t, double> g_cache9;

template <typename Compute>
double cached_value(std::shared_mutex& mtx, std::unordered_map<std::uint64_t, double>& map,
                    std::uint64_t key, Compute&& compute) {
    {
        std::shared_lock lock(mtx);
        auto it = map.find(key);
        if (it != map.end()) return it->second;
    }
    const double v = compute();
    {
        std::unique_lock lock(mtx);
        map.emplace(key, v);
    }
    return v;
}

double threej_raw(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
    // 3j from CG: (j1 j2 j3; m1 m2 m3) = (-1)^{j1-j2-m3} C^{j3,-m3}_{j1 m1 j2 m2} / sqrt(2j3+1)
    const int texp = tj1 - tj2 - tm3;  // even (exponent is an integer) for valid symbols
    const int ph = (texp / 2) % 2 == 0 ? 1 : -1;
    const bool exact = std::max({tj1, tj2, tj3}) <= kExactTwiceJMax;
    const double cg = exact ? cg_exact(tj1, tm1, tj2, tm2, tj3, -tm3)
                            : cg_logfact(tj1, tm1, tj2, tm2, tj3, -tm3);
    return ph * cg / std::sqrt(double(tj3 + 1));
}

double threej_cached(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
    if (std::max({tj1, tj2, tj3}) > kExactTwiceJMax) {
        return threej_raw(tj1, tj2, tj3, tm1, tm2, tm3);
    }
    const Canon c = canonical_3j({tj1, tj2, tj3}, {tm1, tm2, tm3});
    {
        std::shared_lock lock(g_cache_mutex);
        auto it = g_cache.find(c.key);
        if (it != g_cache.end()) return c.phase * it->second;
    }
    // Compute the *canonical* variant so every symmetry partner shares one entry.
    const double requested = threej_raw(tj1, tj2, tj3, tm1, tm2, tm3);
    const double canonical = requested * c.phase;  // phase^2 = 1
    {
        std::unique_lock lock(g_cache_mutex);
        g_cache.emplace(c.key, canonical);
    }
    return requested;
}

}  // namespace

// ------------------------------------------------------------------- public

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j3, HalfInt m3) {
    require_valid_jm(j1, m1, "clebsch_gordan(j1,m1)");
    require_valid_jm(j2, m2, "clebsch_gordan(j2,m2)");
    require_valid_jm(j3, m3, "clebsch_gordan(j3,m3)");
    if ((m1 + m2).twice() != m3.twice()) return 0.0;
    if (!triangle_ok(j1, j2, j3)) return 0.0;
    // C = (-1)^{j1-j2+m3} sqrt(2j3+1) (j1 j2 j3; m1 m2 -m3)
    const int texp = j1.twice() - j2.twice() + m3.twice();
    const int ph = (texp / 2) % 2 == 0 ? 1 : -1;
    return ph * std::sqrt(double(j3.twice() + 1)) *
           threej_cached(j1.twice(), j2.twice(), j3.twice(), m1.twice(), m2.twice(), -m3.twice());
}

double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
    require_valid_jm(j1, m1, "wigner_3j(j1,m1)");
    require_valid_jm(j2, m2, "wigner_3j(j2,m2)");
    require_valid_jm(j3, m3, "wigner_3j(j3,m3)");
    if ((m1 + m2 + m3).twice() != 0) return 0.0;
    if (!triangle_ok(j1, j2, j3)) return 0.0;
    return threej_cached(j1.twice(), j2.twice(), j3.twice(), m1.twice(), m2.twice(), m3.twice());
}

double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
    for (HalfInt j : {j1, j2, j3, j4, j5, j6}) {
        if (j.twice() < 0) throw input_error("wigner_6j: negative magnitude " + j.str());
    }
    if (!triad_ok(j1.twice(), j2.twice(), j3.twice()) ||
        !triad_ok(j1.twice(), j5.twice(), j6.twice()) ||
        !triad_ok(j4.twice(), j2.twice(), j6.twice()) ||
        !triad_ok(j4.twice(), j5.twice(), j3.twice())) {
        return 0.0;
    }
    if (std::max({j1.twice(), j2.twice(), j3.twice(), j4.twice(), j5.twice(), j6.twice()}) <=
        kExactTwiceJMax) {
        const std::uint64_t key =
            pack6(j1.twice(), j2.twice(), j3.twice(), j4.twice(), j5.twice(), j6.twice());
        return cached_value(g_cache6_mutex, g_cache6, key, [&] {
            return sixj_exact(j1.twice(), j2.twice(), j3.twice(), j4.twice(), j5.twice(),
                              j6.twice());
        });
    }
    return sixj_logfact(j1.twice(), j2.twice(), j3.twice(), j4.twice(), j5.twice(), j6.twice());
}

double wigner_9j(HalfInt a, HalfInt b, HalfInt c, HalfInt d, HalfInt e, HalfInt f, HalfInt g,
                 HalfInt h, HalfInt i) {
    for (HalfInt j : {a, b, c, d, e, f, g, h, i}) {
        if (j.twice() < 0) throw input_error("wigner_9j: negative magnitude " + j.str());
    }
    if (!triad_ok(a.twice(), b.twice(), c.twice()) || !triad_ok(d.twice(), e.twice(), f.twice()) ||
        !triad_ok(g.twice(), h.twice(), i.twice()) || !triad_ok(a.twice(), d.twice(), g.twice()) ||
        !triad_ok(b.twice(), e.twice(), h.twice()) || !triad_ok(c.twice(), f.twice(), i.twice())) {
        return 0.0;
    }
    auto compute = [&] {
        const int txmin = std::max({std::abs(a.twice() - i.twice()),
                                    std::abs(b.twice() - f.twice()),
                                    std::abs(d.twice() - h.twice())});
        const int txmax =
            std::min({a.twice() + i.twice(), b.twice() + f.twice(), d.twice() + h.twice()});
        double sum = 0.0;
        for (int tx = txmin; tx <= txmax; tx += 2) {
            const HalfInt x = HalfInt::from_twice(tx);
            const double p = (tx % 2 == 0) ? 1.0 : -1.0;  // (-1)^{2x}
            sum += p * (tx + 1) * wigner_6j(a, b, c, f, i, x) * wigner_6j(d, e, f, b, x, h) *
                   wigner_6j(g, h, i, x, a, d);
        }
        return sum;
    };
    const int tmax = std::max({a.twice(), b.twice(), c.twice(), d.twice(), e.twice(), f.twice(),
                               g.twice(), h.twice(), i.twice()});
    if (tmax > 127) return compute();
    auto u = [](HalfInt j) { return static_cast<std::uint64_t>(j.twice()) & 0x7f; };
    const std::uint64_t key = (u(a) << 56) | (u(b) << 49) | (u(c) << 42) | (u(d) << 35) |
                              (u(e) << 28) | (u(f) << 21) | (u(g) << 14) | (u(h) << 7) | u(i);
    return cached_value(g_cache9_mutex, g_cache9, key, compute);
}

// --------------------------------------------------- spherical harmonics

double sph_harmonic_theta(int l, int m, double cos_theta) {
    if (l < 0) throw input_error("sph_harmonic_theta: l < 0");
    const int am = std::abs(m);
    if (am > l) throw input_error("sph_harmonic_theta: |m| > l");
    const double x = std::clamp(cos_theta, -1.0, 1.0);
    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));

    // P^m_m with Condon-Shortley phase, spherical-harmonic normalization.
    double pmm = std::sqrt(1.0 / (4.0 * M_PI));
    for (int k = 1; k <= am; ++k) {
        pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sx;
    }
    double result;
    if (l == am) {
        result = pmm;
    } else {
        double pm1 = std::sqrt(2.0 * am + 3.0) * x * pmm;  // P^m_{m+1}
        if (l == am + 1) {
            result = pm1;
        } else {
            double plm = 0.0;
            for (int ll = am + 2; ll <= l; ++ll) {
                const double a =
                    std::sqrt((4.0 * ll * ll - 1.0) / (double(ll) * ll - double(am) * am));
                const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - double(am) * am) /
                                           (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
                plm = a * (x * pm1 - b * pmm);
                pmm = pm1;
                pm1 = plm;
            }
            result = plm;
        }
    }
    if (m < 0 && am % 2 != 0) result = -result;  // Y_l^{-m} = (-1)^m conj(Y_l^m)
    return result;
}

std::complex<double> spherical_harmonic(int l, int m, double theta, double phi) {
    const double p = sph_harmonic_theta(l, m, std::cos(theta));
    return p * std::exp(std::complex<double>(0.0, m * phi));
}

void sph_harmonic_theta_all(int l_max, int m, double cos_theta, double* out) {
    if (l_max < 0) throw input_error("sph_harmonic_theta_all: l_max < 0");
    const int am = std::abs(m);
    for (int l = 0; l < std::min(am, l_max + 1); ++l) out[l] = 0.0;
    if (am > l_max) return;
    const double x = std::clamp(cos_theta, -1.0, 1.0);
    const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
    const int neg = (m < 0 && am % 2 != 0) ? -1 : 1;

    double pmm = std::sqrt(1.0 / (4.0 * M_PI));
    for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * sx;
    out[am] = neg * pmm;
    if (am == l_max) return;
    double pm1 = std::sqrt(2.0 * am + 3.0) * x * pmm;
    out[am + 1] = neg * pm1;
    for (int ll = am + 2; ll <= l_max; ++ll) {
        const double a = std::sqrt((4.0 * ll * ll - 1.0) / (double(ll) * ll - double(am) * am));
        const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - double(am) * am) /
                                   (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
        const double plm = a * (x * pm1 - b * pmm);
        out[ll] = neg * plm;
        pmm = pm1;
        pm1 = plm;
    }
}

std::size_t coupling_cache_size() {
    std::shared_lock l3(g_cache_mutex);
    std::shared_lock l6(g_cache6_mutex);
    std::shared_lock l9(g_cache9_mutex);
    return g_cache.size() + g_cache6.size() + g_cache9.size();
}

void coupling_cache_clear() {
    std::unique_lock l3(g_cache_mutex);
    std::unique_lock l6(g_cache6_mutex);
    std::unique_lock l9(g_cache9_mutex);
    g_cache.clear();
    g_cache6.clear();
    g_cache9.clear();
}

}  // namespace escat::angmom
