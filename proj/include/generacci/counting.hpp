#pragma once

#include "generacci/sequences.hpp"
#include "generacci/types.hpp"

#include <map>
#include <optional>
#include <vector>

namespace generacci {

enum class CountFamily { generacci, quilt };

// p(n,k): integers of the n-th interval with k summands.
// q(n,k): integers of [0, a_{nb+1}) (or [0, q_{n+1})) with k summands.
class CountTable {
public:
    CountTable(CountFamily family, std::optional<GeneracciParams> params,
               std::vector<std::vector<BigInt>> p, std::vector<std::vector<BigInt>> q);

    CountFamily family() const { return family_; }
    const std::optional<GeneracciParams>& params() const { return params_; }
    std::size_t n_max() const { return p_.size() - 1; }

    // Zero outside the stored range.
    const BigInt& p(std::size_t n, std::size_t k) const;
    const BigInt& q(std::size_t n, std::size_t k) const;
    const std::vector<BigInt>& p_row(std::size_t n) const;
    const std::vector<BigInt>& q_row(std::size_t n) const;

private:
    CountFamily family_;
    std::optional<GeneracciParams> params_;
    std::vector<std::vector<BigInt>> p_, q_;
};

CountTable generacci_count_tables(GeneracciParams params, std::size_t n_max);

// b^k * C(n - s(k-1), k); 1 for k = 0; 0 when (n, k) is out of range.
BigInt pnk_closed_form(GeneracciParams params, long n, long k);

// Greedy-6 count tables of the quilt.
CountTable fq_count_tables(std::size_t n_max);

// Exact k-histogram of the n-th interval. Equals the p row except for the quilt
// at n = 5, where m = 6 = q_4 + q_2 sits in [q_5, q_6) but is not counted by p.
std::vector<BigInt> interval_counts(const CountTable& table, std::size_t n);

enum class GenFun { generacci_F, generacci_H, fq_H, fq_F };

// Coefficients [n][k] of the named rational function, n <= n_max, k <= k_max,
// by exact power-series division.
std::vector<std::vector<BigInt>> series_coefficients(GenFun g, std::optional<GeneracciParams> params,
                                                     std::size_t n_max, std::size_t k_max);

// Entry n: sum of d_FQ(m) over m in [0, q_{n+1}), i.e. legal index sets of
// {1..n} whose value stays below q_{n+1}. Entry 0 is 1.
std::vector<BigInt> dfq_total(std::size_t n_max);

// Entry n: all legal index subsets of {1..n}, ignoring their values.
std::vector<BigInt> fq_legal_subset_counts(std::size_t n_max);

enum class Scope { interval, cumulative };

struct MomentSummary {
    std::size_t n;
    Rational mean;
    Rational variance;
};

MomentSummary moments_of(const std::vector<BigInt>& weights, std::size_t n);
MomentSummary moments_from_table(const CountTable& table, std::size_t n, Scope scope);

}  // namespace generacci
