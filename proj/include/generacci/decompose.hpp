#pragma once

#include "generacci/sequences.hpp"
#include "generacci/types.hpp"

#include <optional>
#include <vector>

namespace generacci {

struct Decomposition {
    Family family = Family::quilt;
    std::optional<GeneracciParams> params;
    IndexList indices;  // strictly decreasing
    BigInt value;

    std::size_t summands() const { return indices.size(); }
};

using GapString = std::vector<std::size_t>;

BigInt value_of(const TermTable& table, const IndexList& indices);

bool is_generacci_legal(GeneracciParams p, const IndexList& indices);

// Greedy with the bin-spacing constraint. Requires 0 <= m < table.last().
Decomposition generacci_decompose(const GeneracciTable& table, const BigInt& m);

// Every legal index set summing to m, by exhaustive descending search.
std::vector<Decomposition> enumerate_generacci(const GeneracciTable& table, const BigInt& m);

bool is_fq_legal(const IndexList& indices);

struct GreedyResult {
    Decomposition decomposition;
    bool success;
};

// Plain greedy over the quilt; success reports whether the result is legal.
GreedyResult fq_greedy(const QuiltTable& table, const BigInt& m);

Decomposition greedy6(const QuiltTable& table, const BigInt& m);

enum class Greedy6Shape { wide, tail42, neither };

// wide: every gap >= 5; tail42: wide down to l_{t-2} >= 10, then 4, 2 (6 = q_4 + q_2 included).
Greedy6Shape greedy6_shape(const IndexList& indices);

std::vector<Decomposition> enumerate_fq(const QuiltTable& table, const BigInt& m);

// d_FQ(m), same search without materializing the sets.
BigInt count_fq(const QuiltTable& table, const BigInt& m);

struct KRange {
    std::size_t kmin;
    std::size_t kmax;
};

KRange kmin_kmax(const QuiltTable& table, const BigInt& m);

GapString gap_string(const Decomposition& d);

// Rewrites the first (5,5,10) run whose lowest index is >= 10 into (6,2,7,5).
Decomposition expand_gap_substring(const QuiltTable& table, const Decomposition& d);

}  // namespace generacci
