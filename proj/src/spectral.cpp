#include "generacci/spectral.hpp"

#include "generacci/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace generacci {

namespace {

void check_precision(unsigned precision) {
    if (precision < kMinPrecision || precision > kMaxPrecision)
        throw std::invalid_argument("precision must lie in [" + std::to_string(kMinPrecision) + ", " +
                                    std::to_string(kMaxPrecision) + "] digits");
}

Real ten_to(int e) { return boost::multiprecision::pow(Real(10), e); }

// Bisection to a tight bracket, then Newton. f(lo) < 0 < f(hi) is required.
Real solve(const std::function<Real(const Real&)>& f, const std::function<Real(const Real&)>& df,
           Real lo, Real hi, unsigned precision) {
    if (!(f(lo) < 0 && f(hi) > 0)) throw Error(Errc::no_convergence, "bracket has no sign change");
    const Real coarse = ten_to(-static_cast<int>(precision / 2) - 2);
    for (int it = 0; it < 2000 && hi - lo > coarse; ++it) {
        Real mid = (lo + hi) / 2;
        if (f(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    Real x = (lo + hi) / 2;
    // a root sitting on a bisection midpoint leaves a degenerate bracket
    const Real slack = hi - lo;
    const Real tol = ten_to(-static_cast<int>(precision) - 6);
    for (int it = 0; it < 100; ++it) {
        const Real step = f(x) / df(x);
        x -= step;
        if (x < lo - slack || x > hi + slack) throw Error(Errc::no_convergence, "Newton left the bracket");
        if (abs(step) < tol) return x;
    }
    throw Error(Errc::no_convergence, "Newton did not settle");
}

// Coefficients (highest degree first for Eigen companion use) of the growth polynomial.
std::vector<double> monic_coeffs_low_first(Family family, const std::optional<GeneracciParams>& p) {
    // returns c_0..c_{d-1} of x^d + c_{d-1} x^{d-1} + ... + c_0
    if (family == Family::quilt) return {-1, 0, 0, 0, -1};
    const std::size_t hi = static_cast<std::size_t>((p->s + 1) * p->b);
    const std::size_t mid = static_cast<std::size_t>(p->s * p->b);
    std::vector<double> c(hi, 0.0);
    c[0] = -p->b;
    c[mid] = -1;
    return c;
}

std::vector<std::complex<double>> companion_roots(const std::vector<double>& low_first) {
    const auto d = static_cast<Eigen::Index>(low_first.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) m(i, i - 1) = 1;
    for (Eigen::Index i = 0; i < d; ++i) m(i, d - 1) = -low_first[static_cast<std::size_t>(i)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<std::complex<double>> out;
    for (Eigen::Index i = 0; i < d; ++i) out.push_back(es.eigenvalues()[i]);
    return out;
}

}  // namespace

SpectralData dominant_root(Family family, std::optional<GeneracciParams> params, unsigned precision) {
    check_precision(precision);
    if (family == Family::generacci && !params)
        throw std::invalid_argument("generacci roots need (s, b)");
    SpectralData out;
    out.family = family;
    out.params = family == Family::generacci ? params : std::nullopt;
    out.precision = precision;

    long hi_deg, mid_deg, cst;
    Real upper;
    if (family == Family::quilt) {
        hi_deg = 5, mid_deg = 4, cst = 1, upper = 2;
    } else {
        hi_deg = (params->s + 1) * params->b, mid_deg = params->s * params->b, cst = params->b;
        upper = 1 + params->b;
    }
    auto P = [&](const Real& x) { return pow(x, hi_deg) - pow(x, mid_deg) - cst; };
    auto dP = [&](const Real& x) {
        return hi_deg * pow(x, hi_deg - 1) - mid_deg * pow(x, mid_deg - 1);
    };
    out.lambda1 = solve(P, dP, Real(1), upper, precision);
    out.residual = abs(P(out.lambda1));
    if (out.residual > ten_to(-static_cast<int>(precision) + 2))
        throw Error(Errc::no_convergence, "root residual above tolerance");

    const auto roots = companion_roots(monic_coeffs_low_first(family, params));
    const double lam = static_cast<double>(out.lambda1);
    out.dominant_count = 0;
    out.lambda2_modulus = 0;
    for (const auto& z : roots) {
        const double m = std::abs(z);
        if (std::abs(m - lam) < 1e-8 * lam)
            ++out.dominant_count;
        else
            out.lambda2_modulus = std::max(out.lambda2_modulus, m);
    }

    // Binet constants per residue class, read off where the subdominant part
    // has decayed below half the working precision.
    const std::size_t period = family == Family::quilt ? 1 : static_cast<std::size_t>(params->b);
    const double decay = std::log(lam / std::max(out.lambda2_modulus, 1e-300));
    const double want = (precision / 2.0 + 2.0) * std::log(10.0) / decay;
    const std::size_t len = std::min<std::size_t>(20000, static_cast<std::size_t>(want) + 4 * period + 8);
    const TermTable terms = family == Family::quilt
                                ? static_cast<TermTable>(quilt_terms(len))
                                : static_cast<TermTable>(generacci_by_recurrence(*params, len));
    auto ratio = [&](std::size_t n) { return Real(terms[n].get_str()) / pow(out.lambda1, static_cast<long>(n)); };
    out.c1_by_residue.assign(period, Real(0));
    Real sum = 0;
    out.c1_change = 0;
    for (std::size_t k = 0; k < period; ++k) {
        const std::size_t n = len - k;
        const Real v = ratio(n);
        out.c1_by_residue[n % period] = v;
        out.c1_change = std::max(out.c1_change, Real(abs(v - ratio(n - period))));
        sum += v;
    }
    out.c1 = sum / static_cast<long>(period);
    return out;
}

Real gap_law(GeneracciParams params, long g, const SpectralData& spectral) {
    if (spectral.family != Family::generacci || !spectral.params || !(*spectral.params == params))
        throw std::invalid_argument("spectral data does not belong to these parameters");
    if (g < params.s + 1) return 0;
    const Real mu = pow(spectral.lambda1, params.b);
    return params.b * pow(mu, -g);
}

Real alpha1(GeneracciParams params, const Real& y, unsigned precision) {
    check_precision(precision);
    const long s = params.s;
    const Real by = params.b * y;
    auto f = [&](const Real& w) { return pow(w, s + 1) - pow(w, s) - by; };
    auto df = [&](const Real& w) { return (s + 1) * pow(w, s) - s * pow(w, s - 1); };
    return solve(f, df, Real(1), 1 + by, precision);
}

GrowthConstants summand_growth_constants(GeneracciParams params, unsigned precision) {
    check_precision(precision);
    auto estimate = [&](const Real& h) {
        const Real a0 = alpha1(params, Real(1), precision);
        const Real ap = alpha1(params, 1 + h, precision);
        const Real am = alpha1(params, 1 - h, precision);
        const Real d1 = (ap - am) / (2 * h);
        const Real d2 = (ap - 2 * a0 + am) / (h * h);
        const Real C = d1 / a0;
        const Real Cp = (a0 * (d1 + d2) - d1 * d1) / (a0 * a0);
        return std::pair{C, Cp};
    };
    const Real h = ten_to(-5);
    const auto [c_h, cp_h] = estimate(h);
    const auto [c_h2, cp_h2] = estimate(h / 2);
    GrowthConstants g;
    // Richardson: central differences carry an h^2 error term
    g.C = (4 * c_h2 - c_h) / 3;
    g.Cprime = (4 * cp_h2 - cp_h) / 3;
    g.C_step_delta = abs(c_h - c_h2);
    g.Cprime_step_delta = abs(cp_h - cp_h2);
    if (g.C_step_delta > ten_to(-6) || g.Cprime_step_delta > ten_to(-6))
        throw Error(Errc::no_convergence, "finite differences disagree between h and h/2");
    if (!(g.C > 0) || !(g.Cprime > 0))
        throw std::logic_error("growth constants must be positive");
    return g;
}

GrowthEstimate growth_rate_estimate(const std::vector<Rational>& values) {
    if (values.size() < 3) throw Error(Errc::insufficient_data, "need at least three values");
    std::vector<double> ratios;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i - 1] <= 0) throw Error(Errc::insufficient_data, "values must be positive");
        Rational r = values[i] / values[i - 1];
        ratios.push_back(r.get_d());
    }
    GrowthEstimate e{ratios.back(), 0.0};
    const std::size_t from = ratios.size() > 5 ? ratios.size() - 5 : 0;
    for (std::size_t i = from; i < ratios.size(); ++i)
        e.fluctuation = std::max(e.fluctuation, std::abs(ratios[i] - e.ratio));
    return e;
}

RootDiagnostics denominator_roots(GeneracciParams params, double y) {
    const std::size_t d = static_cast<std::size_t>(params.s + 1);
    const double lead = -params.b * y;
    std::vector<double> low(d, 0.0);  // monic: x^{s+1} + x / (b y) - 1 / (b y)
    low[0] = 1.0 / lead;
    if (d > 1) low[1] = -1.0 / lead;
    RootDiagnostics r;
    r.roots = companion_roots(low);
    r.min_separation = INFINITY;
    for (std::size_t i = 0; i < r.roots.size(); ++i)
        for (std::size_t j = i + 1; j < r.roots.size(); ++j)
            r.min_separation = std::min(r.min_separation, std::abs(r.roots[i] - r.roots[j]));
    r.simple = r.min_separation > 1e-7;
    double best = INFINITY;
    for (const auto& z : r.roots)
        if (std::abs(z.imag()) < 1e-10 && z.real() > 0) best = std::min(best, z.real());
    r.smallest_positive = best;
    r.smallest_is_strict = std::isfinite(best);
    for (const auto& z : r.roots)
        if (std::abs(z - std::complex<double>(best, 0)) > 1e-9 && std::abs(z) <= best + 1e-9)
            r.smallest_is_strict = false;
    return r;
}

}  // namespace generacci
