#pragma once

#include "generacci/sequences.hpp"
#include "generacci/types.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <complex>
#include <optional>
#include <vector>

namespace generacci {

using Real = boost::multiprecision::cpp_bin_float_100;

// Working precision is capped below the 100 digits Real carries.
inline constexpr unsigned kMinPrecision = 10;
inline constexpr unsigned kMaxPrecision = 90;
inline constexpr unsigned kDefaultPrecision = 50;

struct SpectralData {
    Family family = Family::generacci;
    std::optional<GeneracciParams> params;
    unsigned precision = kDefaultPrecision;

    Real lambda1;   // largest real root of the characteristic polynomial
    Real residual;  // |P(lambda1)|

    // a_n / lambda1^n along each residue class n mod b; for b = 1 a single entry.
    // With b > 1 the polynomial is a polynomial in x^b, so b roots share the
    // dominant modulus and the plain ratio oscillates with period b.
    std::vector<Real> c1_by_residue;
    Real c1;         // mean over residues: the coefficient of the real root
    Real c1_change;  // size of the last update, a stabilization diagnostic

    int dominant_count = 1;       // roots with modulus lambda1
    double lambda2_modulus = 0;   // largest modulus strictly below lambda1
};

SpectralData dominant_root(Family family, std::optional<GeneracciParams> params,
                           unsigned precision = kDefaultPrecision);

// Limit bin-gap law b (lambda1^b)^{-g} for g >= s+1, else 0.
Real gap_law(GeneracciParams params, long g, const SpectralData& spectral);

// Dominant root of w^{s+1} - w^s - b y, i.e. 1 / (smallest positive root of 1 - x - b y x^{s+1}).
Real alpha1(GeneracciParams params, const Real& y, unsigned precision = kDefaultPrecision);

struct GrowthConstants {
    Real C;        // mean summands per bin
    Real Cprime;   // variance per bin
    Real C_step_delta;       // |estimate(h) - estimate(h/2)|
    Real Cprime_step_delta;
};

GrowthConstants summand_growth_constants(GeneracciParams params,
                                         unsigned precision = kDefaultPrecision);

struct GrowthEstimate {
    double ratio;        // last values[n+1] / values[n]
    double fluctuation;  // max deviation of the last five ratios from it
};

GrowthEstimate growth_rate_estimate(const std::vector<Rational>& values);

struct RootDiagnostics {
    std::vector<std::complex<double>> roots;
    double smallest_positive = 0;
    double min_separation = 0;
    bool simple = false;
    bool smallest_is_strict = false;
};

// Numeric roots of 1 - x - b y x^{s+1} via the companion matrix.
RootDiagnostics denominator_roots(GeneracciParams params, double y = 1.0);

}  // namespace generacci
