#include "generacci/sequences.hpp"

#include "generacci/errors.hpp"
#include "interval_set.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace generacci {

GeneracciParams::GeneracciParams(int s_, int b_) : s(s_), b(b_) {
    if (s < 1 || b < 1)
        throw std::invalid_argument("GeneracciParams requires s >= 1 and b >= 1");
}

const BigInt& TermTable::term(std::size_t n) const {
    if (n < 1 || n > size())
        throw Error(Errc::table_too_short, "index " + std::to_string(n) + " beyond table of " +
                                               std::to_string(size()) + " terms");
    return (*terms_)[n - 1];
}

std::size_t TermTable::largest_at_most(const BigInt& m) const {
    auto it = std::upper_bound(terms_->begin(), terms_->end(), m);
    return static_cast<std::size_t>(it - terms_->begin());
}

const BigInt& GeneracciTable::bin_start(long r) const {
    static const BigInt one = 1;
    if (r <= 0) return one;
    return term(static_cast<std::size_t>(r) * static_cast<std::size_t>(params_.b) + 1);
}

std::size_t bin_of(GeneracciParams p, std::size_t index) {
    const auto b = static_cast<std::size_t>(p.b);
    return (index + b - 1) / b;
}

GeneracciTable generacci_by_definition(GeneracciParams p, std::size_t count) {
    using detail::IntervalSet;
    const std::size_t b = static_cast<std::size_t>(p.b);
    const long s = p.s;

    // reach[j]: every sum of a legal subset drawn from bins 1..j.
    std::vector<IntervalSet> reach{IntervalSet::point(0)};
    auto reach_at = [&](long j) -> const IntervalSet& {
        return j <= 0 ? reach[0] : reach[static_cast<std::size_t>(j)];
    };

    std::vector<BigInt> a;
    a.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        const long full = static_cast<long>((i - 1) / b);
        IntervalSet r = reach_at(full);
        const IntervalSet& below = reach_at(full - s);
        for (std::size_t k = static_cast<std::size_t>(full) * b + 1; k < i; ++k)
            r.unite(below.shifted(a[k - 1]));
        a.push_back(r.mex_positive());

        if (i % b == 0) {
            const long j = static_cast<long>(i / b);
            IntervalSet next = reach_at(j - 1);
            const IntervalSet& base = reach_at(j - s - 1);
            for (std::size_t k = (static_cast<std::size_t>(j) - 1) * b + 1; k <= i; ++k)
                next.unite(base.shifted(a[k - 1]));
            reach.push_back(std::move(next));
        }
    }
    return GeneracciTable(p, std::move(a));
}

GeneracciTable generacci_by_recurrence(GeneracciParams p, std::size_t count) {
    const std::size_t seed = std::min(count, p.seed_length());
    std::vector<BigInt> a = generacci_by_definition(p, seed).terms();
    const std::size_t b = static_cast<std::size_t>(p.b);
    const std::size_t lag = static_cast<std::size_t>(p.s + 1) * b;
    a.reserve(count);
    for (std::size_t n = a.size() + 1; n <= count; ++n)
        a.push_back(a[n - b - 1] + p.b * a[n - lag - 1]);
    return GeneracciTable(p, std::move(a));
}

QuiltTable quilt_by_definition(std::size_t count) {
    using detail::IntervalSet;
    // State: bits 0..3 flag indices j, j-1, j-2, j-3 as used; bit 4 flags index 1.
    std::map<unsigned, IntervalSet> states;
    states[0] = IntervalSet::point(0);

    std::vector<BigInt> q;
    q.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        IntervalSet all;
        for (const auto& [key, set] : states) all.unite(set);
        const BigInt qi = all.mex_positive();
        q.push_back(qi);

        std::map<unsigned, IntervalSet> next;
        for (const auto& [key, set] : states) {
            const unsigned window = key & 0xFu;
            const unsigned one_used = key & 0x10u;
            next[((window << 1) & 0xFu) | one_used].unite(set);
            // index i sits at distance 1, 3, 4 from window bits 0, 2, 3
            const bool blocked = (window & 0x1u) || (window & 0x4u) || (window & 0x8u) ||
                                 (i == 3 && one_used);
            if (!blocked) {
                const unsigned flag = (i == 1) ? 0x10u : one_used;
                next[((window << 1) & 0xFu) | 0x1u | flag].unite(set.shifted(qi));
            }
        }
        states = std::move(next);
    }
    return QuiltTable(std::move(q));
}

QuiltTable quilt_terms(std::size_t count) {
    constexpr std::size_t seed_len = 7;
    std::vector<BigInt> q = quilt_by_definition(std::min(count, seed_len)).terms();
    q.reserve(count);
    // q_{n+1} = q_n + q_{n-4}, valid once n >= 6
    for (std::size_t n = q.size(); n < count; ++n) q.push_back(q[n - 1] + q[n - 5]);
    return QuiltTable(std::move(q));
}

}  // namespace generacci
