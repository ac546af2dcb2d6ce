// Test-only oracle: Clebsch-Gordan / 3j / 6j via the Racah closed-form sums
// in plain double log-factorial arithmetic.  Deliberately independent of the
// library implementation (no shared code, no exact-rational path, no cache).
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double lnfact(int n) {
    static std::vector<double> tab = {0.0};
    while (static_cast<int>(tab.size()) <= n) {
        tab.push_back(tab.back() + std::log(double(tab.size())));
    }
    return tab[n];
}

// All arguments are plain integers (the para-H2 problem never needs
// half-integers); selection-rule violations return 0.
inline double cg(int j1, int m1, int j2, int m2, int j3, int m3) {
    if (m1 + m2 != m3) return 0.0;
    if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
    if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
    const double lnpref =
        0.5 * (std::log(2.0 * j3 + 1.0) + lnfact(j1 + j2 - j3) + lnfact(j1 - j2 + j3) +
               lnfact(-j1 + j2 + j3) - lnfact(j1 + j2 + j3 + 1) + lnfact(j1 + m1) +
               lnfact(j1 - m1) + lnfact(j2 + m2) + lnfact(j2 - m2) + lnfact(j3 + m3) +
               lnfact(j3 - m3));
    const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
    const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double lnden = lnfact(k) + lnfact(j1 + j2 - j3 - k) + lnfact(j1 - m1 - k) +
                             lnfact(j2 + m2 - k) + lnfact(j3 - j2 + m1 + k) +
                             lnfact(j3 - j1 - m2 + k);
        sum += (k % 2 == 0 ? 1.0 : -1.0) * std::exp(lnpref - lnden);
    }
    return sum;
}

inline double threej(int j1, int j2, int j3, int m1, int m2, int m3) {
    const double c = cg(j1, m1, j2, m2, j3, -m3);
    const int ph = (j1 - j2 - m3) % 2 == 0 ? 1 : -1;
    return ph * c / std::sqrt(2.0 * j3 + 1.0);
}

inline bool triad(int a, int b, int c) { return std::abs(a - b) <= c && c <= a + b; }

inline double sixj(int a, int b, int c, int d, int e, int f) {
    if (!triad(a, b, c) || !triad(a, e, f) || !triad(d, b, f) || !triad(d, e, c)) return 0.0;
    auto lndelta = [](int x, int y, int z) {
        return 0.5 * (lnfact(x + y - z) + lnfact(x - y + z) + lnfact(-x + y + z) -
                      lnfact(x + y + z + 1));
    };
    const double lnpref = lndelta(a, b, c) + lndelta(a, e, f) + lndelta(d, b, f) +
                          lndelta(d, e, c);
    const int kmin = std::max({a + b + c, a + e + f, d + b + f, d + e + c});
    const int kmax = std::min({a + b + d + e, b + c + e + f, a + c + d + f});
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double lnterm = lnfact(k + 1) - lnfact(k - a - b - c) - lnfact(k - a - e - f) -
                              lnfact(k - d - b - f) - lnfact(k - d - e - c) -
                              lnfact(a + b + d + e - k) - lnfact(b + c + e + f - k) -
                              lnfact(a + c + d + f - k);
        sum += (k % 2 == 0 ? 1.0 : -1.0) * std::exp(lnpref + lnterm);
    }
    return sum;
}

}  // namespace oracle
