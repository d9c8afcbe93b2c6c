#include "generacci/stats.hpp"

#include "generacci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <stdexcept>

namespace generacci {

namespace {

std::size_t to_size(const BigInt& v) { return static_cast<std::size_t>(v.get_ui()); }

void require_bins(const GeneracciTable& table, std::size_t n) {
    const std::size_t need = n * static_cast<std::size_t>(table.params().b) + 1;
    if (table.size() < need)
        throw Error(Errc::out_of_range, "interval " + std::to_string(n) + " needs " + std::to_string(need) + " terms");
}

void require_scan(const IntervalSpec& iv) {
    if (iv.size() > kScanLimit)
        throw Error(Errc::out_of_range, "interval of " + iv.size().get_str() + " integers exceeds the scan limit");
}

Rational ratio(const BigInt& a, const BigInt& b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

const BigInt& W(const GeneracciTable& t, long r) { return t.bin_start(r); }

long sl(std::size_t v) { return static_cast<long>(v); }

}  // namespace

IntervalSpec generacci_interval(const GeneracciTable& table, std::size_t n) {
    require_bins(table, n);
    IntervalSpec s;
    s.family = CountFamily::generacci;
    s.params = table.params();
    s.n = n;
    s.lo = n == 0 ? BigInt(0) : table.bin_start(sl(n) - 1);
    s.hi = table.bin_start(sl(n));
    return s;
}

IntervalSpec quilt_interval(const QuiltTable& table, std::size_t n) {
    if (table.size() < n + 1) throw Error(Errc::out_of_range, "quilt interval " + std::to_string(n) + " past the table");
    IntervalSpec s;
    s.family = CountFamily::quilt;
    s.n = n;
    s.lo = n == 0 ? BigInt(0) : table[n];
    s.hi = table[n + 1];
    if (n == 0) s.hi = 1;
    return s;
}

Histogram parallel_histogram(const BigInt& lo, const BigInt& hi, unsigned jobs,
                             const std::function<void(const BigInt&, Histogram&)>& visit) {
    Histogram out;
    if (hi <= lo) return out;
    const BigInt len = hi - lo;
    BigInt w = std::max(1u, jobs);
    if (w > len) w = len;
    const std::size_t workers = to_size(w);
    auto run = [&](BigInt a, BigInt b) {
        Histogram h;
        for (BigInt m = a; m < b; ++m) visit(m, h);
        return h;
    };
    std::vector<std::future<Histogram>> parts;
    for (std::size_t k = 1; k < workers; ++k) {
        BigInt a = lo + len * k / w, b = lo + len * (k + 1) / w;
        parts.push_back(std::async(std::launch::async, run, a, b));
    }
    out = run(lo, lo + len / w);
    for (auto& f : parts)
        for (auto& [key, v] : f.get()) out[key] += v;
    return out;
}

std::vector<BigInt> to_vector(const Histogram& h) {
    std::vector<BigInt> v;
    for (const auto& [k, c] : h) {
        if (k < 0) throw std::logic_error("negative histogram key");
        if (v.size() <= static_cast<std::size_t>(k)) v.resize(k + 1, 0);
        v[k] = c;
    }
    return v;
}

std::vector<BigInt> summand_histogram(const IntervalSpec& iv, const CountTable& table) {
    if (iv.family != table.family()) throw std::invalid_argument("interval and table families differ");
    if (iv.n > table.n_max())
        throw Error(Errc::out_of_range, "n = " + std::to_string(iv.n) + " past the count table");
    return interval_counts(table, iv.n);
}

std::vector<BigInt> scan_summand_histogram(const GeneracciTable& table, std::size_t n, unsigned jobs) {
    auto iv = generacci_interval(table, n);
    require_scan(iv);
    return to_vector(parallel_histogram(iv.lo, iv.hi, jobs, [&](const BigInt& m, Histogram& h) {
        h[sl(generacci_decompose(table, m).summands())] += 1;
    }));
}

std::vector<BigInt> scan_summand_histogram(const QuiltTable& table, std::size_t n, unsigned jobs) {
    auto iv = quilt_interval(table, n);
    require_scan(iv);
    return to_vector(parallel_histogram(iv.lo, iv.hi, jobs, [&](const BigInt& m, Histogram& h) {
        h[sl(m == 0 ? 0 : greedy6(table, m).summands())] += 1;
    }));
}

NormalityMetrics normality_metrics(const std::vector<BigInt>& hist) {
    BigInt w = 0;
    std::size_t support = 0;
    for (const auto& v : hist) {
        if (v < 0) throw std::invalid_argument("negative weight");
        w += v;
        if (v > 0) ++support;
    }
    if (support < 2) throw Error(Errc::degenerate_distribution, "fewer than two values carry mass");

    Rational mean = 0;
    for (std::size_t k = 0; k < hist.size(); ++k) mean += Rational(hist[k] * static_cast<unsigned long>(k));
    mean /= Rational(w);
    Rational m2 = 0, m3 = 0, m4 = 0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        if (hist[k] == 0) continue;
        Rational d = Rational(static_cast<unsigned long>(k)) - mean;
        Rational d2 = d * d;
        m2 += hist[k] * d2;
        m3 += hist[k] * d2 * d;
        m4 += hist[k] * d2 * d2;
    }
    m2 /= Rational(w);
    m3 /= Rational(w);
    m4 /= Rational(w);

    NormalityMetrics r;
    r.mean = mean.get_d();
    r.variance = m2.get_d();
    const double sd = std::sqrt(r.variance);
    r.skewness = m3.get_d() / (r.variance * sd);
    r.excess_kurtosis = Rational(m4 / (m2 * m2)).get_d() - 3.0;

    BigInt cum = 0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        cum += hist[k];
        const double F = ratio(cum, w).get_d();
        const double z = (static_cast<double>(k) + 0.5 - r.mean) / sd;
        const double Phi = 0.5 * std::erfc(-z / std::sqrt(2.0));
        r.ks = std::max(r.ks, std::abs(F - Phi));
    }
    return r;
}

bool within(const NormalityMetrics& m, const NormalityThresholds& t) {
    return std::abs(m.skewness) < t.skewness && std::abs(m.excess_kurtosis) < t.excess_kurtosis && m.ks < t.ks;
}

std::vector<std::size_t> bin_gaps(GeneracciParams p, const IndexList& indices) {
    std::vector<std::size_t> g;
    for (std::size_t i = 1; i < indices.size(); ++i) g.push_back(bin_of(p, indices[i - 1]) - bin_of(p, indices[i]));
    return g;
}

std::vector<GapOccurrence> gap_occurrences(GeneracciParams p, const IndexList& indices) {
    std::vector<GapOccurrence> out;
    for (std::size_t i = 1; i < indices.size(); ++i) {
        const std::size_t hi = bin_of(p, indices[i - 1]), lo = bin_of(p, indices[i]);
        out.push_back({lo, hi - lo});
    }
    return out;
}

BigInt constrained_bin_count(GeneracciParams p, std::size_t n, const std::vector<std::size_t>& occupied,
                             const std::vector<std::size_t>& empty) {
    if (n == 0) return 0;
    std::vector<int> force(n + 1, 0);  // 1 occupied, -1 empty
    force[n] = 1;
    for (auto j : occupied) {
        if (j < 1 || j > n) return 0;
        force[j] = 1;
    }
    for (auto j : empty) {
        if (j < 1 || j > n) continue;
        if (force[j] == 1) return 0;
        force[j] = -1;
    }
    const auto s = static_cast<std::size_t>(p.s);
    // state e: empty bins since the last occupied one, capped at s
    std::vector<BigInt> dp(s + 1, 0), next(s + 1);
    dp[s] = 1;
    for (std::size_t j = 1; j <= n; ++j) {
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t e = 0; e <= s; ++e) {
            if (dp[e] == 0) continue;
            if (force[j] != 1) next[std::min(e + 1, s)] += dp[e];
            if (force[j] != -1 && e == s) next[0] += dp[e] * p.b;
        }
        std::swap(dp, next);
    }
    return dp[0];
}

BigInt xig_count(const GeneracciTable& table, std::size_t n, std::size_t i, std::size_t g) {
    require_bins(table, n);
    const auto& p = table.params();
    const long s = p.s;
    if (i < 1 || sl(g) <= s || i + g > n) return 0;
    const BigInt b = p.b;
    if (i + g == n) return b * b * W(table, sl(i) - s - 1);
    if (n < i + g + static_cast<std::size_t>(s) + 1) return 0;
    return b * b * b * W(table, sl(i) - s - 1) * W(table, sl(n) - sl(i) - sl(g) - 2 * s - 1);
}

BigInt xig_formula(const GeneracciTable& table, std::size_t n, std::size_t i, std::size_t g) {
    require_bins(table, n);
    const auto& p = table.params();
    const long s = p.s;
    const BigInt b = p.b;
    return b * b * b * (W(table, sl(i) - s - 1) - 1) * (W(table, sl(n) - 2 * s - sl(g) - sl(i) - 1) - 1);
}

BigInt pair_gap_count(const GeneracciTable& table, std::size_t n, std::size_t j1, std::size_t g1, std::size_t j2,
                      std::size_t g2) {
    require_bins(table, n);
    if (j1 >= j2) throw std::invalid_argument("pair_gap_count needs j1 < j2");
    if (j1 < 1 || g1 < 1 || g2 < 1 || j2 < j1 + g1 || j2 + g2 > n) return 0;
    std::vector<std::size_t> occ = {j1, j1 + g1, j2, j2 + g2}, emp;
    for (std::size_t k = j1 + 1; k < j1 + g1; ++k) emp.push_back(k);
    for (std::size_t k = j2 + 1; k < j2 + g2; ++k) emp.push_back(k);
    return constrained_bin_count(table.params(), n, occ, emp);
}

BigInt pair_gap_formula(const GeneracciTable& table, std::size_t n, std::size_t j1, std::size_t g1, std::size_t j2,
                        std::size_t g2) {
    require_bins(table, n);
    const auto& p = table.params();
    const long s = p.s;
    BigInt b5 = 1;
    for (int k = 0; k < 5; ++k) b5 *= p.b;
    return b5 * (W(table, sl(j1) - s - 1) - 1) * (W(table, sl(j2) - sl(j1) - sl(g1) - 2 * s - 1) - 1) *
           (W(table, sl(n) - sl(j2) - sl(g2) - 2 * s - 1) - 1);
}

double pair_sum_normalized(const GeneracciTable& table, std::size_t n, std::size_t g1, std::size_t g2) {
    auto iv = generacci_interval(table, n);
    const auto counts = generacci_count_tables(table.params(), n);
    const double mu = moments_from_table(counts, n, Scope::interval).mean.get_d();
    BigInt sum = 0;
    for (std::size_t j1 = 1; j1 <= n; ++j1)
        for (std::size_t j2 = j1 + 1; j2 <= n; ++j2) sum += pair_gap_count(table, n, j1, g1, j2, g2);
    return 2.0 * ratio(sum, iv.size()).get_d() / (mu * mu);
}

Rational GapHistogram::fraction(std::size_t g) const {
    if (total == 0) throw Error(Errc::empty_distribution, "no gaps");
    auto it = counts.find(g);
    return ratio(it == counts.end() ? BigInt(0) : it->second, total);
}

GapHistogram bin_gap_histogram(const GeneracciTable& table, std::size_t n) {
    require_bins(table, n);
    GapHistogram h;
    for (std::size_t g = 1; g < n; ++g) {
        BigInt c = 0;
        for (std::size_t i = 1; i + g <= n; ++i) c += xig_count(table, n, i, g);
        if (c != 0) h.counts[g] = c;
        h.total += c;
    }
    return h;
}

GapHistogram scan_bin_gaps(const GeneracciTable& table, std::size_t n, unsigned jobs) {
    auto iv = generacci_interval(table, n);
    require_scan(iv);
    const auto p = table.params();
    auto hist = parallel_histogram(iv.lo, iv.hi, jobs, [&](const BigInt& m, Histogram& h) {
        for (auto g : bin_gaps(p, generacci_decompose(table, m).indices)) h[sl(g)] += 1;
    });
    GapHistogram out;
    for (auto& [g, c] : hist) {
        out.counts[static_cast<std::size_t>(g)] = c;
        out.total += c;
    }
    return out;
}

std::map<std::size_t, Rational> spacing_measure(const std::vector<std::size_t>& gaps) {
    std::map<std::size_t, Rational> nu;
    if (gaps.empty()) return nu;
    for (auto g : gaps) nu[g] += 1;
    for (auto& [g, v] : nu) v /= static_cast<unsigned long>(gaps.size());
    return nu;
}

namespace {

template <class Gaps>
SpacingSummary spacing_over(const IntervalSpec& iv, Gaps&& gaps_of) {
    require_scan(iv);
    SpacingSummary out;
    out.n = iv.n;
    out.integers = iv.size();
    std::map<std::size_t, Rational> unweighted;
    BigInt summands = 0;
    for (BigInt m = iv.lo; m < iv.hi; ++m) {
        auto [k, gaps] = gaps_of(m);
        summands += static_cast<unsigned long>(k);
        if (gaps.empty()) continue;
        out.with_gaps += 1;
        auto nu = spacing_measure(gaps);
        for (const auto& [g, v] : nu) {
            // (k(z) - 1) nu_z(g) is the raw count
            out.weighted_mean[g] += v * static_cast<unsigned long>(gaps.size());
            unweighted[g] += v;
        }
        for (auto g : gaps) out.aggregate.counts[g] += 1;
        out.aggregate.total += static_cast<unsigned long>(gaps.size());
    }
    if (out.aggregate.total > 0) {
        for (auto& [g, v] : out.weighted_mean) v /= Rational(out.aggregate.total);
        out.fraction_of_two = out.aggregate.fraction(2);
    }
    if (out.with_gaps > 0)
        for (auto& [g, v] : unweighted) out.unweighted_mean[g] = v / Rational(out.with_gaps);
    out.mean_summands = ratio(summands, out.integers);
    return out;
}

}  // namespace

SpacingSummary spacing_gap_measures(const GeneracciTable& table, std::size_t n) {
    const auto p = table.params();
    return spacing_over(generacci_interval(table, n), [&](const BigInt& m) {
        auto d = generacci_decompose(table, m);
        return std::make_pair(d.summands(), bin_gaps(p, d.indices));
    });
}

SpacingSummary spacing_gap_measures(const QuiltTable& table, std::size_t n) {
    return spacing_over(quilt_interval(table, n), [&](const BigInt& m) {
        if (m == 0) return std::make_pair(std::size_t{0}, std::vector<std::size_t>{});
        auto d = greedy6(table, m);
        return std::make_pair(d.summands(), std::vector<std::size_t>(gap_string(d)));
    });
}

Rational greedy_success_rate(const QuiltTable& table, std::size_t n, unsigned jobs) {
    if (n < 2) throw Error(Errc::n_too_small, "greedy_success_rate needs n >= 2");
    if (table.size() < n) throw Error(Errc::out_of_range, "quilt table shorter than n");
    const BigInt hi = table[n];
    if (hi - 1 > kScanLimit) throw Error(Errc::out_of_range, "q_n exceeds the scan limit");
    auto h = parallel_histogram(1, hi, jobs, [&](const BigInt& m, Histogram& acc) {
        acc[fq_greedy(table, m).success ? 1 : 0] += 1;
    });
    return ratio(h[1], hi - 1);
}

KRangeSurvey krange_survey(const QuiltTable& table, std::size_t n, unsigned jobs) {
    auto iv = quilt_interval(table, n);
    require_scan(iv);
    if (n == 0) throw Error(Errc::n_too_small, "krange_survey needs n >= 1");
    auto h = parallel_histogram(iv.lo, iv.hi, jobs, [&](const BigInt& m, Histogram& acc) {
        auto r = kmin_kmax(table, m);
        acc[sl(r.kmax - r.kmin)] += 1;
    });
    KRangeSurvey out;
    out.integers = iv.size();
    BigInt positive = 0;
    for (auto& [d, c] : h) {
        out.by_difference[static_cast<std::size_t>(d)] = c;
        if (d > 0) positive += c;
    }
    out.fraction_positive = ratio(positive, out.integers);
    return out;
}

CaseSplit quilt_case_split(const QuiltTable& table, std::size_t n) {
    if (n < 15) throw Error(Errc::n_too_small, "case split needs n >= 15");
    auto iv = quilt_interval(table, n);
    require_scan(iv);
    CaseSplit out{0, 0};
    for (BigInt m = iv.lo; m < iv.hi; ++m) {
        switch (greedy6_shape(greedy6(table, m).indices)) {
            case Greedy6Shape::tail42: out.alpha += 1; break;
            case Greedy6Shape::wide: out.beta += 1; break;
            case Greedy6Shape::neither: throw std::logic_error("Greedy-6 output of " + m.get_str() + " has neither shape");
        }
    }
    return out;
}

BigInt case_alpha_formula(std::size_t n) {
    if (n < 15) throw Error(Errc::n_too_small, "a_{n-14} needs n >= 15");
    auto a = generacci_by_recurrence({4, 1}, n - 14);
    return a[n - 14] - 1;
}

}  // namespace generacci
