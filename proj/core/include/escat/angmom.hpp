#pragma once

#include <complex>

#include "escat/halfint.hpp"

namespace escat::angmom {

// Clebsch-Gordan coefficient C^{j3 m3}_{j1 m1 j2 m2} in the standard real
// (Condon-Shortley) convention.  Returns exactly 0 when m1+m2 != m3 or a
// triangle rule fails; throws input_error on malformed (j, m) pairs.
//
// Arguments with all 2j <= 40 are evaluated in exact rational arithmetic
// (the Racah sum and the squared prefactor are carried as exact rationals,
// rounded to double only at the end); larger arguments fall back to a
// log-factorial evaluation.
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt j3, HalfInt m3);

// Wigner 3-j symbol (j1 j2 j3; m1 m2 m3), standard convention.
double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}; 0 on any triad violating the
// triangle rules.
double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

// Wigner 9-j symbol {a b c; d e f; g h i}, evaluated as the single-sum
// contraction of three 6-j symbols.
double wigner_9j(HalfInt a, HalfInt b, HalfInt c, HalfInt d, HalfInt e, HalfInt f,
                 HalfInt g, HalfInt h, HalfInt i);

// Normalized associated Legendre function: the theta part of Y_l^m,
//   Y_l^m(theta, phi) = theta_part(l, m, cos theta) * e^{i m phi},
// Condon-Shortley phase included, valid for negative m.
double sph_harmonic_theta(int l, int m, double cos_theta);

// Spherical harmonic Y_l^m(theta, phi), Condon-Shortley phase, unit
// normalized over the sphere.  Throws input_error when |m| > l or l < 0.
std::complex<double> spherical_harmonic(int l, int m, double theta, double phi);

// Fills out[l] = theta part of Y_l^m for l = 0..l_max at fixed m (entries
// with l < |m| are zero); one recurrence pass per call.
void sph_harmonic_theta_all(int l_max, int m, double cos_theta, double* out);

// Number of entries currently held by the shared coupling-coefficient cache
// (exposed for tests and benchmarks).
std::size_t coupling_cache_size();
void coupling_cache_clear();

}  // namespace escat::angmom
