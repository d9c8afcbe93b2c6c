#pragma once

#include "generacci/counting.hpp"
#include "generacci/decompose.hpp"
#include "generacci/sequences.hpp"
#include "generacci/spectral.hpp"
#include "generacci/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace generacci {

// Per-integer scans refuse intervals larger than this.
inline constexpr std::uint64_t kScanLimit = 1'000'000;

struct IntervalSpec {
    CountFamily family = CountFamily::generacci;
    std::optional<GeneracciParams> params;
    std::size_t n = 0;
    BigInt lo, hi;  // [lo, hi)

    BigInt size() const { return hi - lo; }
};

// [a_{(n-1)b+1}, a_{nb+1}); n = 0 gives {0}.
IntervalSpec generacci_interval(const GeneracciTable& table, std::size_t n);
// [q_n, q_{n+1}); n = 0 gives {0}.
IntervalSpec quilt_interval(const QuiltTable& table, std::size_t n);

using Histogram = std::map<long, BigInt>;

// Splits [lo, hi) into `jobs` contiguous ranges, runs visit(m, partial) on each in
// its own thread and adds the partial histograms. The result does not depend on jobs.
Histogram parallel_histogram(const BigInt& lo, const BigInt& hi, unsigned jobs,
                             const std::function<void(const BigInt&, Histogram&)>& visit);

std::vector<BigInt> to_vector(const Histogram& h);

// k-histogram of the interval from the count tables.
std::vector<BigInt> summand_histogram(const IntervalSpec& iv, const CountTable& table);

// Same by decomposing every integer (greedy for Generacci, Greedy-6 for the quilt).
std::vector<BigInt> scan_summand_histogram(const GeneracciTable& table, std::size_t n, unsigned jobs = 1);
std::vector<BigInt> scan_summand_histogram(const QuiltTable& table, std::size_t n, unsigned jobs = 1);

struct NormalityMetrics {
    double mean = 0;
    double variance = 0;
    double skewness = 0;
    double excess_kurtosis = 0;
    double ks = 0;  // sup_k |F(k) - Phi((k + 1/2 - mean) / sd)|
};

struct NormalityThresholds {
    double skewness = 0.15;
    double excess_kurtosis = 0.3;
    double ks = 0.05;
};

// hist[k] = weight of k. Needs mass on two distinct k.
NormalityMetrics normality_metrics(const std::vector<BigInt>& hist);
bool within(const NormalityMetrics& m, const NormalityThresholds& t = {});

// Bin numbers of consecutive summands, top down; gaps[i] = bin_i - bin_{i+1}.
std::vector<std::size_t> bin_gaps(GeneracciParams p, const IndexList& indices);

struct GapOccurrence {
    std::size_t i;  // lower bin
    std::size_t g;
};
std::vector<GapOccurrence> gap_occurrences(GeneracciParams p, const IndexList& indices);

// Legal bin configurations on bins 1..n with bin n occupied, the listed bins
// forced occupied or empty; each occupied bin counts b ways.
BigInt constrained_bin_count(GeneracciParams p, std::size_t n, const std::vector<std::size_t>& occupied,
                             const std::vector<std::size_t>& empty);

// m in I_n whose decomposition uses bins i and i+g and none between.
BigInt xig_count(const GeneracciTable& table, std::size_t n, std::size_t i, std::size_t g);
// b^3 [a_{(i-s-1)b+1} - 1][a_{(n-2s-g-i-1)b+1} - 1]
BigInt xig_formula(const GeneracciTable& table, std::size_t n, std::size_t i, std::size_t g);

BigInt pair_gap_count(const GeneracciTable& table, std::size_t n, std::size_t j1, std::size_t g1,
                      std::size_t j2, std::size_t g2);
// b^5 [a_{(j1-s-1)b+1} - 1][a_{(j2-j1-g1-2s-1)b+1} - 1][a_{(n-j2-g2-2s-1)b+1} - 1]
BigInt pair_gap_formula(const GeneracciTable& table, std::size_t n, std::size_t j1, std::size_t g1,
                        std::size_t j2, std::size_t g2);

// 2 / (|I_n| mu_n^2) * sum over j1 < j2 of pair_gap_count.
double pair_sum_normalized(const GeneracciTable& table, std::size_t n, std::size_t g1, std::size_t g2);

struct GapHistogram {
    std::map<std::size_t, BigInt> counts;
    BigInt total = 0;

    Rational fraction(std::size_t g) const;
};

// Bin gaps over all m in I_n, from xig_count.
GapHistogram bin_gap_histogram(const GeneracciTable& table, std::size_t n);
// Same by decomposing every integer.
GapHistogram scan_bin_gaps(const GeneracciTable& table, std::size_t n, unsigned jobs = 1);

struct SpacingSummary {
    std::size_t n = 0;
    BigInt integers = 0;           // |I_n|
    BigInt with_gaps = 0;          // z with k(z) >= 2
    GapHistogram aggregate;        // all gaps pooled, so nu_n(g) = aggregate.fraction(g)
    std::map<std::size_t, Rational> weighted_mean;  // sum_z (k(z)-1) nu_z / N_gaps
    std::map<std::size_t, Rational> unweighted_mean;  // average of nu_z over z with k(z) >= 2
    Rational fraction_of_two = 0;  // share of gaps of length 2
    Rational mean_summands = 0;
};

// nu_{z,n} for one decomposition, keyed by gap.
std::map<std::size_t, Rational> spacing_measure(const std::vector<std::size_t>& gaps);

// Bin gaps of Generacci decompositions.
SpacingSummary spacing_gap_measures(const GeneracciTable& table, std::size_t n);
// Index gaps of Greedy-6 decompositions.
SpacingSummary spacing_gap_measures(const QuiltTable& table, std::size_t n);

// Share of m in [1, q_n) on which the plain greedy algorithm ends legally.
Rational greedy_success_rate(const QuiltTable& table, std::size_t n, unsigned jobs = 1);

struct KRangeSurvey {
    std::map<std::size_t, BigInt> by_difference;  // kmax - kmin -> integers
    BigInt integers = 0;
    Rational fraction_positive = 0;
};

KRangeSurvey krange_survey(const QuiltTable& table, std::size_t n, unsigned jobs = 1);

struct CaseSplit {
    BigInt alpha;  // Greedy-6 ends q_4 + q_2
    BigInt beta;   // every gap >= 5
};

CaseSplit quilt_case_split(const QuiltTable& table, std::size_t n);
// a_{n-14} - 1 with the (4,1)-Generacci terms.
BigInt case_alpha_formula(std::size_t n);

}  // namespace generacci
