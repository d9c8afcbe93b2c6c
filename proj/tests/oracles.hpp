#pragma once

// Brute-force reference implementations used only by the tests. They
// deliberately avoid the library's algorithms: plain subset enumeration.

#include "generacci/sequences.hpp"
#include "generacci/types.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace oracle {

using generacci::BigInt;
using generacci::GeneracciParams;
using generacci::IndexList;

inline bool generacci_legal(GeneracciParams p, const std::vector<std::size_t>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (i == j) continue;
            const long bi = static_cast<long>((idx[i] + p.b - 1) / p.b);
            const long bj = static_cast<long>((idx[j] + p.b - 1) / p.b);
            if (idx[i] == idx[j] || std::labs(bi - bj) < p.s + 1) return false;
        }
    return true;
}

inline bool quilt_legal(const std::vector<std::size_t>& idx) {
    bool has1 = false, has3 = false;
    for (auto i : idx) {
        has1 |= i == 1;
        has3 |= i == 3;
    }
    if (has1 && has3) return false;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            const long d = std::labs(static_cast<long>(idx[i]) - static_cast<long>(idx[j]));
            if (d == 0 || d == 1 || d == 3 || d == 4) return false;
        }
    return true;
}

// Calls f(indices) for every subset of {1..n} accepted by legal; indices descending.
inline void for_each_subset(std::size_t n,
                            const std::function<bool(const std::vector<std::size_t>&)>& legal,
                            const std::function<void(const std::vector<std::size_t>&)>& f) {
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<std::size_t> idx;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        idx.clear();
        for (std::size_t k = n; k >= 1; --k)
            if (mask >> (k - 1) & 1u) idx.push_back(k);
        if (legal(idx)) f(idx);
    }
}

// Smallest-missing-integer construction by plain subset enumeration.
inline std::vector<long> naive_sequence(
    std::size_t count, const std::function<bool(const std::vector<std::size_t>&)>& legal) {
    std::vector<long> a;
    for (std::size_t i = 1; i <= count; ++i) {
        std::set<long> sums;
        for_each_subset(i - 1, legal, [&](const std::vector<std::size_t>& idx) {
            long s = 0;
            for (auto k : idx) s += a[k - 1];
            sums.insert(s);
        });
        long m = 1;
        while (sums.count(m)) ++m;
        a.push_back(m);
    }
    return a;
}

// All legal index subsets of {1..n} with their sums, for small n.
inline std::vector<std::pair<long, std::vector<std::size_t>>> all_sums(
    const std::vector<long>& terms, std::size_t n,
    const std::function<bool(const std::vector<std::size_t>&)>& legal) {
    std::vector<std::pair<long, std::vector<std::size_t>>> out;
    for_each_subset(n, legal, [&](const std::vector<std::size_t>& idx) {
        long s = 0;
        for (auto k : idx) s += terms[k - 1];
        out.emplace_back(s, idx);
    });
    return out;
}

inline std::vector<long> to_long(const generacci::TermTable& t) {
    std::vector<long> v;
    for (const auto& x : t.terms()) v.push_back(x.get_si());
    return v;
}

}  // namespace oracle
