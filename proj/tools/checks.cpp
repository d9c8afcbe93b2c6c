#include "checks.hpp"

#include "cli.hpp"

#include "generacci/blocks.hpp"
#include "generacci/counting.hpp"
#include "generacci/decompose.hpp"
#include "generacci/sequences.hpp"
#include "generacci/spectral.hpp"
#include "generacci/stats.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

namespace generacci::checks {
namespace {

const std::vector<GeneracciParams>& grid() {
    static const std::vector<GeneracciParams> g = {{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}, {2, 3}, {4, 1}};
    return g;
}

std::string pstr(GeneracciParams p) { return "(" + std::to_string(p.s) + "," + std::to_string(p.b) + ")"; }

std::string fmt(double x, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

GeneracciTable covering(GeneracciParams p, long m) {
    for (std::size_t count = 32;; count *= 2) {
        auto t = generacci_by_recurrence(p, count);
        if (t.last() > m) return t;
    }
}

GeneracciTable bins(GeneracciParams p, std::size_t n) {
    return generacci_by_recurrence(p, (n + 2) * static_cast<std::size_t>(p.b) + 2);
}

CheckResult sequence_fidelity(unsigned) {
    const std::vector<long> want = {1, 2, 3, 4, 5, 7, 9, 12, 16, 21, 28, 37, 49, 65, 86, 114, 151, 200, 265, 351, 465};
    std::ostringstream out, err;
    const int rc = cli::run({"quilt", "--count", "21"}, out, err);
    if (rc != 0) return {false, "quilt --count 21 exited " + std::to_string(rc) + ": " + err.str()};
    auto j = nlohmann::json::parse(out.str());
    std::vector<long> got;
    for (const auto& t : j.at("terms")) got.push_back(std::stol(t.get<std::string>()));
    if (got != want) return {false, "terms differ from 1,2,3,4,5,7,...,465"};
    return {true, "21 terms match"};
}

CheckResult construction_equivalence(unsigned) {
    for (auto p : grid()) {
        const std::size_t count = 30 * static_cast<std::size_t>(p.b);
        auto a = generacci_by_definition(p, count);
        auto b = generacci_by_recurrence(p, count);
        for (std::size_t n = 1; n <= count; ++n)
            if (a[n] != b[n]) return {false, pstr(p) + " differs at n=" + std::to_string(n)};
    }
    return {true, "7 parameter pairs, 30b terms each"};
}

CheckResult uniqueness_and_greedy(unsigned) {
    for (auto p : grid()) {
        auto t = covering(p, 10000);
        for (long m = 1; m <= 10000; ++m) {
            auto all = enumerate_generacci(t, m);
            if (all.size() != 1) return {false, pstr(p) + " m=" + std::to_string(m) + " has " + std::to_string(all.size()) + " decompositions"};
            if (!is_generacci_legal(p, all[0].indices)) return {false, pstr(p) + " m=" + std::to_string(m) + " illegal"};
            if (generacci_decompose(t, m).indices != all[0].indices)
                return {false, pstr(p) + " greedy differs at m=" + std::to_string(m)};
        }
    }
    return {true, "m <= 10^4 on 7 parameter pairs"};
}

CheckResult greedy6_check(unsigned) {
    auto t = quilt_terms(60);
    std::size_t wide = 0, tail = 0;
    for (long m = 1; m <= 10000; ++m) {
        auto d = greedy6(t, m);
        const std::string at = " at m=" + std::to_string(m);
        if (value_of(t, d.indices) != m) return {false, "wrong value" + at};
        if (!is_fq_legal(d.indices)) return {false, "not FQ-legal" + at};
        auto shape = greedy6_shape(d.indices);
        if (shape == Greedy6Shape::neither) return {false, "neither shape" + at};
        (shape == Greedy6Shape::wide ? wide : tail)++;
        if (d.summands() != kmin_kmax(t, m).kmin) return {false, "summands differ from kmin" + at};
    }
    return {true, std::to_string(wide) + " wide, " + std::to_string(tail) + " ending 4,2; all at kmin"};
}

CheckResult greedy_rate(unsigned jobs) {
    auto t = quilt_terms(40);
    const double r35 = greedy_success_rate(t, 35, jobs).get_d();
    const double r34 = greedy_success_rate(t, 34, jobs).get_d();
    const double step = std::abs(r35 - r34);
    const bool ok = std::abs(r35 - 0.92627) < 0.01 && step < 0.002;
    return {ok, "rate(35)=" + fmt(r35) + " step=" + fmt(step, 3)};
}

CheckResult average_growth(unsigned) {
    auto d = dfq_total(100);
    auto q = quilt_terms(102);
    Rational a100(d[100], q[101]), a99(d[99], q[100]);
    a100.canonicalize();
    a99.canonicalize();
    const double lam = Rational(a100 / a99).get_d();
    return {std::abs(lam - 1.05459) < 0.001, "ratio at n=100 is " + fmt(lam, 7)};
}

CheckResult closed_form_counting(unsigned) {
    for (auto p : grid()) {
        auto t = generacci_count_tables(p, 60);
        for (long n = 0; n <= 60; ++n)
            for (long k = 0; k <= n + 1; ++k)
                if (t.q(static_cast<std::size_t>(n), static_cast<std::size_t>(k)) != pnk_closed_form(p, n, k))
                    return {false, pstr(p) + " q(" + std::to_string(n) + "," + std::to_string(k) + ") differs"};
        auto small = generacci_count_tables(p, 30);
        const std::size_t kmax = 32;
        auto F = series_coefficients(GenFun::generacci_F, p, 30, kmax);
        for (std::size_t n = 0; n <= 30; ++n)
            for (std::size_t k = 0; k <= kmax; ++k)
                if (F[n][k] != small.p(n, k)) return {false, pstr(p) + " series differs at n=" + std::to_string(n)};
    }
    auto fq = fq_count_tables(30);
    auto F = series_coefficients(GenFun::fq_F, std::nullopt, 30, 12);
    for (std::size_t n = 0; n <= 30; ++n)
        for (std::size_t k = 0; k <= 12; ++k)
            if (F[n][k] != fq.p(n, k)) return {false, "quilt series differs at n=" + std::to_string(n)};
    return {true, "closed form n <= 60, series n <= 30"};
}

CheckResult gap_law_check(unsigned) {
    std::string detail;
    bool ok = true;
    auto h = bin_gap_histogram(bins({1, 2}, 25), 25);
    double worst = 0;
    std::size_t worst_g = 0;
    for (std::size_t g = 2; g <= 8; ++g) {
        const double e = std::abs(h.fraction(g).get_d() - std::pow(2.0, 1.0 - static_cast<double>(g)));
        if (e > worst) worst = e, worst_g = g;
    }
    if (worst >= 0.01) ok = false;
    detail = "P_25(" + std::to_string(worst_g) + ")=" + fmt(h.fraction(worst_g).get_d()) + " off by " + fmt(worst, 3);
    double sum_err = 0;
    for (auto p : grid()) {
        auto sd = dominant_root(Family::generacci, p);
        Real sum = 0;
        for (long g = p.s + 1;; ++g) {
            const Real v = gap_law(p, g, sd);
            sum += v;
            if (v < Real("1e-40")) break;
        }
        sum_err = std::max(sum_err, static_cast<double>(abs(sum - 1)));
    }
    if (sum_err >= 1e-12) ok = false;
    return {ok, detail + "; limit law sums to 1 within " + fmt(sum_err, 2)};
}

CheckResult dominant_roots(unsigned) {
    const Real phi = (1 + sqrt(Real(5))) / 2;
    const double e11 = static_cast<double>(abs(dominant_root(Family::generacci, GeneracciParams{1, 1}).lambda1 - phi));
    const double e12 = static_cast<double>(abs(dominant_root(Family::generacci, GeneracciParams{1, 2}).lambda1 - sqrt(Real(2))));
    const double fq = static_cast<double>(dominant_root(Family::quilt, std::nullopt).lambda1);
    const bool ok = e11 < 1e-12 && e12 < 1e-12 && std::abs(fq - 1.32472) < 5e-6;
    return {ok, "errors " + fmt(e11, 2) + ", " + fmt(e12, 2) + "; quilt lambda1=" + fmt(fq, 9)};
}

CheckResult mean_slope(unsigned) {
    std::string detail;
    bool ok = true;
    for (GeneracciParams p : {GeneracciParams{1, 1}, {1, 2}, {2, 1}}) {
        auto t = generacci_count_tables(p, 60);
        double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = 0;
        for (std::size_t n = 30; n <= 60; ++n) {
            const double x = static_cast<double>(n), y = moments_from_table(t, n, Scope::interval).mean.get_d();
            sx += x, sy += y, sxx += x * x, sxy += x * y, cnt += 1;
        }
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        auto gc = summand_growth_constants(p);
        const double C = static_cast<double>(gc.C), Cp = static_cast<double>(gc.Cprime);
        if (std::abs(slope - C) >= 1e-3 || !(C > 0) || !(Cp > 0)) ok = false;
        detail += (detail.empty() ? "" : "; ") + pstr(p) + " C=" + fmt(C) + " fit=" + fmt(slope);
    }
    return {ok, detail};
}

CheckResult normality(unsigned) {
    const NormalityThresholds th;
    auto gt = generacci_count_tables({1, 2}, 60);
    auto a = normality_metrics(summand_histogram(generacci_interval(bins({1, 2}, 60), 60), gt));
    auto ft = fq_count_tables(60);
    auto b = normality_metrics(summand_histogram(quilt_interval(quilt_terms(62), 60), ft));
    auto show = [](const char* name, const NormalityMetrics& m) {
        return std::string(name) + " skew=" + fmt(m.skewness, 4) + " exkurt=" + fmt(m.excess_kurtosis, 3) +
               " ks=" + fmt(m.ks, 3);
    };
    return {within(a, th) && within(b, th), show("(1,2)", a) + "; " + show("quilt", b)};
}

std::vector<unsigned> zeckendorf_coeffs(const GeneracciTable& fib, long m) {
    auto d = generacci_decompose(fib, BigInt(m));
    std::vector<unsigned> c(d.indices.front(), 0);
    for (auto i : d.indices) c[c.size() - i] = 1;
    return c;
}

CheckResult block_framework(unsigned jobs) {
    auto z = zeckendorf_system();
    auto fib = generacci_by_recurrence({1, 1}, 40);
    for (long m = 1; m <= 10000; ++m) {
        auto c = zeckendorf_coeffs(fib, m);
        auto d = encode_blocks(z, c);
        if (d.coefficients() != c || *d.value(z) != m) return {false, "encode fails at m=" + std::to_string(m)};
        if (d.blocks.size() < 2) continue;
        auto r = remove_last_s_block(z, d);
        if (insert_s_block(r.result, r.removed, r.position).str() != d.str())
            return {false, "remove/insert fails at m=" + std::to_string(m)};
    }
    std::size_t blocks_checked = 0;
    for (const auto& sys : {zeckendorf_system(), plrs_system()}) {
        for (std::size_t n = sys.L_S() + sys.L_T() + 1; n <= 25; ++n) {
            for (const auto& b : sys.S) {
                const std::size_t m = n - b.length();
                if (upsilon_count(sys, n, b) != sys.H[m] - sys.H[m - 1])
                    return {false, sys.name + " Upsilon identity fails at n=" + std::to_string(n) + " " + b.str()};
                ++blocks_checked;
            }
            if (omega_size(sys, n) == 0) continue;
            auto dist = zn_distribution(sys, n, std::nullopt, kOmegaEnumerationCap, jobs);
            const auto& pz = dist.enumerated_available ? dist.enumerated : dist.formula;
            if (pz.at(0) < Rational(1, static_cast<unsigned long>(sys.S.size())))
                return {false, sys.name + " P(Z=0) < 1/|S| at n=" + std::to_string(n)};
        }
    }
    std::string detail = "round trips m <= 10^4, " + std::to_string(blocks_checked) + " Upsilon identities";
    for (const auto& sys : {zeckendorf_system(), plrs_system()}) {
        auto rep = kappa_bound_check(sys, 1, 60);
        detail += "; " + sys.name + " kappa=" + fmt(rep.kappa, 4);
        if (!rep.passes) return {false, detail + " bound fails"};
    }
    return {true, detail};
}

CheckResult gap_counts(unsigned) {
    const GeneracciParams p{1, 2};
    auto t = bins(p, 40);
    for (std::size_t n = 1; n <= 12; ++n) {
        auto iv = generacci_interval(t, n);
        std::map<std::pair<std::size_t, std::size_t>, BigInt> single;
        std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, BigInt> pair;
        for (BigInt m = iv.lo; m < iv.hi; ++m) {
            auto occ = gap_occurrences(p, generacci_decompose(t, m).indices);
            for (const auto& a : occ) {
                single[{a.i, a.g}] += 1;
                for (const auto& b : occ)
                    if (a.i < b.i) pair[{a.i, a.g, b.i, b.g}] += 1;
            }
        }
        auto get = [](const auto& map, const auto& key) {
            auto it = map.find(key);
            return it == map.end() ? BigInt(0) : it->second;
        };
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t g = 1; g <= n; ++g)
                if (xig_count(t, n, i, g) != get(single, std::make_pair(i, g)))
                    return {false, "xig differs at n=" + std::to_string(n)};
        for (std::size_t j1 = 1; j1 <= n; ++j1)
            for (std::size_t j2 = j1 + 1; j2 <= n; ++j2)
                for (std::size_t g1 = 1; g1 <= n; ++g1)
                    for (std::size_t g2 = 1; g2 <= n; ++g2)
                        if (pair_gap_count(t, n, j1, g1, j2, g2) != get(pair, std::make_tuple(j1, g1, j2, g2)))
                            return {false, "pair count differs at n=" + std::to_string(n)};
    }
    // interior: every free stretch of bins spans at least n/5 bins
    const std::size_t n = 30, w = n / 5;
    double worst = 0;
    for (std::size_t g = 2; g <= 8; ++g)
        for (std::size_t i = 2 + w; i + g + 3 + w <= n; ++i)
            worst = std::max(worst, std::abs(Rational(Rational(xig_count(t, n, i, g)) / Rational(xig_formula(t, n, i, g))).get_d() - 1));
    double worst_pair = 0;
    for (std::size_t g1 = 2; g1 <= 3; ++g1)
        for (std::size_t g2 = 2; g2 <= 3; ++g2)
            for (std::size_t j1 = 2 + w; j1 <= n; ++j1)
                for (std::size_t j2 = j1 + g1 + 3 + w; j2 + g2 + 3 + w <= n; ++j2) {
                    const Rational r(Rational(pair_gap_count(t, n, j1, g1, j2, g2)) / Rational(pair_gap_formula(t, n, j1, g1, j2, g2)));
                    worst_pair = std::max(worst_pair, std::abs(r.get_d() - 1));
                }
    return {worst < 0.05 && worst_pair < 0.05,
            "exact for n <= 12; interior ratio off by " + fmt(worst, 3) + " (single), " + fmt(worst_pair, 3) + " (pair)"};
}

CheckResult case_split(unsigned) {
    auto t = quilt_terms(40);
    std::string got, want;
    bool ok = true;
    for (std::size_t n = 16; n <= 22; ++n) {
        const BigInt a = quilt_case_split(t, n).alpha, f = case_alpha_formula(n);
        got += (got.empty() ? "" : ",") + a.get_str();
        want += (want.empty() ? "" : ",") + f.get_str();
        if (a != f) ok = false;
    }
    return {ok, "alpha counts " + got + " vs a_{n-14}-1 = " + want};
}

// Random FQ-legal index set containing top, top-5, top-10, top-20 with top-20 >= 10.
Decomposition pattern_bearing(const QuiltTable& t, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> low_d(10, 40), gap_d(2, 9), count_d(0, 4);
    for (;;) {
        const std::size_t low = low_d(rng), top = low + 20;
        IndexList idx;
        std::size_t x = top;
        std::vector<std::size_t> above;
        for (std::size_t k = count_d(rng); k > 0; --k) above.push_back(x += gap_d(rng));
        idx.assign(above.rbegin(), above.rend());
        idx.insert(idx.end(), {top, top - 5, top - 10, low});
        x = low;
        for (std::size_t k = count_d(rng); k > 0; --k) {
            const std::size_t g = gap_d(rng);
            if (g >= x) break;
            idx.push_back(x -= g);
        }
        if (!is_fq_legal(idx) || idx.front() > t.size()) continue;
        Decomposition d;
        d.family = Family::quilt;
        d.indices = idx;
        d.value = value_of(t, idx);
        return d;
    }
}

CheckResult krange_growth(unsigned jobs) {
    auto t = quilt_terms(120);
    const Rational f20 = krange_survey(t, 20, jobs).fraction_positive;
    const Rational f30 = krange_survey(t, 30, jobs).fraction_positive;
    std::mt19937_64 rng(20240531);
    for (int i = 0; i < 100; ++i) {
        auto d = pattern_bearing(t, rng);
        auto e = expand_gap_substring(t, d);
        if (value_of(t, e.indices) != d.value || !is_fq_legal(e.indices) || e.indices == d.indices)
            return {false, "rewrite broke decomposition #" + std::to_string(i)};
    }
    return {f30 > f20, "fraction with kmax > kmin: n=20 " + fmt(f20.get_d(), 4) + ", n=30 " + fmt(f30.get_d(), 4) +
                           "; 100 rewrites value-preserving"};
}

}  // namespace

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "sequence fidelity", 1, true, sequence_fidelity},
        {2, "construction equivalence", 60, true, construction_equivalence},
        {3, "uniqueness and greedy correctness", 300, false, uniqueness_and_greedy},
        {4, "greedy-6 legality, shape and kmin", 300, false, greedy6_check},
        {5, "greedy success rate", 120, false, greedy_rate},
        {6, "average decomposition growth", 10, true, average_growth},
        {7, "closed-form counting", 60, true, closed_form_counting},
        {8, "gap law", 120, true, gap_law_check},
        {9, "dominant roots", 1, true, dominant_roots},
        {10, "mean slope consistency", 60, true, mean_slope},
        {11, "normality at n=60", 10, true, normality},
        {12, "block framework", 300, false, block_framework},
        {13, "single and pair gap counts", 300, false, gap_counts},
        {14, "case split alpha count", 60, true, case_split},
        {15, "k-range growth", 600, false, krange_growth},
    };
    return list;
}

Outcome run_criterion(const Criterion& c, unsigned jobs) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = c.run(jobs);
    } catch (const std::exception& e) {
        r = {false, std::string("threw ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {c.id, c.title, r.pass && sec <= c.budget_seconds, sec, c.budget_seconds, r.detail};
}

std::string format_line(const Outcome& o) {
    std::ostringstream os;
    os << (o.pass ? "PASS " : "FAIL ") << o.id << ' ' << o.title << " (" << std::fixed << std::setprecision(2)
       << o.seconds << " s / " << std::setprecision(0) << o.budget_seconds << " s): " << o.detail;
    if (o.seconds > o.budget_seconds) os << "; over the time budget";
    return os.str();
}

}  // namespace generacci::checks
