#include "generacci/decompose.hpp"

#include "generacci/errors.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace generacci {

namespace {

void require_below_last(const TermTable& table, const BigInt& m) {
    if (m < 0) throw Error(Errc::out_of_range, "negative value " + m.get_str());
    if (table.size() == 0 || m >= table.last())
        throw Error(Errc::table_too_short,
                    m.get_str() + " is not below the last table term; extend the table");
}

// Prefix sums s[j] = t_1 + ... + t_j, an upper bound on what indices <= j can reach.
std::vector<BigInt> prefix_sums(const TermTable& table, std::size_t upto) {
    std::vector<BigInt> s(upto + 1);
    s[0] = 0;
    for (std::size_t j = 1; j <= upto; ++j) s[j] = s[j - 1] + table[j];
    return s;
}

bool fq_pair_ok(std::size_t hi, std::size_t lo) {
    const std::size_t d = hi - lo;
    return d != 0 && d != 1 && d != 3 && d != 4;
}

// Descending search over quilt indices; calls emit on each legal set found.
void fq_search(const QuiltTable& table, const BigInt& m,
               const std::function<void(const IndexList&)>& emit) {
    const std::size_t top = table.largest_at_most(m);
    const auto sums = prefix_sums(table, top);
    IndexList chosen;
    std::function<void(std::size_t, const BigInt&)> go = [&](std::size_t j, const BigInt& rest) {
        if (rest == 0) {
            emit(chosen);
            return;
        }
        for (; j >= 1; --j) {
            if (sums[j] < rest) return;
            if (table[j] > rest) continue;
            bool ok = true;
            for (auto it = chosen.rbegin(); it != chosen.rend() && *it - j <= 4; ++it)
                if (!fq_pair_ok(*it, j)) { ok = false; break; }
            if (ok && j == 1 && std::find(chosen.begin(), chosen.end(), 3) != chosen.end())
                ok = false;
            if (!ok) continue;
            chosen.push_back(j);
            go(j - 1, rest - table[j]);
            chosen.pop_back();
        }
    };
    go(top, m);
}

Decomposition make(Family f, std::optional<GeneracciParams> p, IndexList idx, BigInt v) {
    Decomposition d;
    d.family = f;
    d.params = p;
    d.indices = std::move(idx);
    d.value = std::move(v);
    return d;
}

}  // namespace

BigInt value_of(const TermTable& table, const IndexList& indices) {
    BigInt v = 0;
    for (auto i : indices) v += table.term(i);
    return v;
}

bool is_generacci_legal(GeneracciParams p, const IndexList& indices) {
    IndexList idx = indices;
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 1; i < idx.size(); ++i) {
        if (idx[i] == idx[i - 1]) return false;
        const std::size_t lo = bin_of(p, idx[i - 1]);
        const std::size_t hi = bin_of(p, idx[i]);
        if (hi - lo < static_cast<std::size_t>(p.s + 1)) return false;
    }
    return true;
}

Decomposition generacci_decompose(const GeneracciTable& table, const BigInt& m) {
    require_below_last(table, m);
    const GeneracciParams p = table.params();
    const std::size_t b = static_cast<std::size_t>(p.b);
    IndexList out;
    BigInt rest = m;
    std::size_t limit = table.size();
    while (rest > 0) {
        const std::size_t l = std::min(table.largest_at_most(rest), limit);
        if (l == 0) throw std::logic_error("greedy stalled at remainder " + rest.get_str());
        out.push_back(l);
        rest -= table[l];
        const std::size_t bin = bin_of(p, l);
        if (bin <= static_cast<std::size_t>(p.s + 1)) {
            limit = 0;
        } else {
            limit = (bin - static_cast<std::size_t>(p.s) - 1) * b;
        }
        if (rest > 0 && limit == 0)
            throw std::logic_error("greedy ran out of bins for " + m.get_str());
    }
    return make(Family::generacci, p, std::move(out), m);
}

std::vector<Decomposition> enumerate_generacci(const GeneracciTable& table, const BigInt& m) {
    require_below_last(table, m);
    const GeneracciParams p = table.params();
    const std::size_t b = static_cast<std::size_t>(p.b);
    const std::size_t top = table.largest_at_most(m);
    const auto sums = prefix_sums(table, top);
    std::vector<Decomposition> found;
    IndexList chosen;
    std::function<void(std::size_t, const BigInt&)> go = [&](std::size_t j, const BigInt& rest) {
        if (rest == 0) {
            found.push_back(make(Family::generacci, p, chosen, m));
            return;
        }
        for (; j >= 1; --j) {
            if (sums[j] < rest) return;
            if (table[j] > rest) continue;
            chosen.push_back(j);
            const std::size_t bin = bin_of(p, j);
            const std::size_t gap = static_cast<std::size_t>(p.s + 1);
            if (bin > gap) {
                go((bin - gap) * b, rest - table[j]);
            } else if (rest == table[j]) {
                found.push_back(make(Family::generacci, p, chosen, m));
            }
            chosen.pop_back();
        }
    };
    go(top, m);
    return found;
}

bool is_fq_legal(const IndexList& indices) {
    const bool has1 = std::find(indices.begin(), indices.end(), 1) != indices.end();
    const bool has3 = std::find(indices.begin(), indices.end(), 3) != indices.end();
    if (has1 && has3) return false;
    for (std::size_t i = 0; i < indices.size(); ++i)
        for (std::size_t j = i + 1; j < indices.size(); ++j) {
            const std::size_t hi = std::max(indices[i], indices[j]);
            const std::size_t lo = std::min(indices[i], indices[j]);
            if (!fq_pair_ok(hi, lo)) return false;
        }
    return true;
}

GreedyResult fq_greedy(const QuiltTable& table, const BigInt& m) {
    require_below_last(table, m);
    IndexList out;
    BigInt rest = m;
    while (rest > 0) {
        const std::size_t l = table.largest_at_most(rest);
        out.push_back(l);
        rest -= table[l];
    }
    const bool ok = is_fq_legal(out);
    return {make(Family::quilt, std::nullopt, std::move(out), m), ok};
}

Decomposition greedy6(const QuiltTable& table, const BigInt& m) {
    require_below_last(table, m);
    IndexList out;
    BigInt rest = m;
    while (rest > 0) {
        const std::size_t l = table.largest_at_most(rest);
        if (table[l] == rest) {
            out.push_back(l);
            break;
        }
        if (rest == 6) {
            out.push_back(4);
            out.push_back(2);
            break;
        }
        // 1..5 are all terms, so any non-term remainder here exceeds 6
        if (rest < 6) throw std::logic_error("non-term remainder below 6");
        out.push_back(l);
        rest -= table[l];
    }
    return make(Family::quilt, std::nullopt, std::move(out), m);
}

Greedy6Shape greedy6_shape(const IndexList& idx) {
    auto wide_upto = [&](std::size_t count) {
        for (std::size_t i = 0; i + 1 < count; ++i)
            if (idx[i] < idx[i + 1] + 5) return false;
        return true;
    };
    if (wide_upto(idx.size())) return Greedy6Shape::wide;
    const std::size_t t = idx.size();
    // for m = 6 alone there is no l_{t-2} to bound
    if (t >= 2 && idx[t - 1] == 2 && idx[t - 2] == 4 && (t == 2 || idx[t - 3] >= 10) && wide_upto(t - 2))
        return Greedy6Shape::tail42;
    return Greedy6Shape::neither;
}

std::vector<Decomposition> enumerate_fq(const QuiltTable& table, const BigInt& m) {
    require_below_last(table, m);
    std::vector<Decomposition> found;
    fq_search(table, m, [&](const IndexList& idx) {
        found.push_back(make(Family::quilt, std::nullopt, idx, m));
    });
    return found;
}

BigInt count_fq(const QuiltTable& table, const BigInt& m) {
    require_below_last(table, m);
    BigInt n = 0;
    fq_search(table, m, [&](const IndexList&) { ++n; });
    return n;
}

KRange kmin_kmax(const QuiltTable& table, const BigInt& m) {
    require_below_last(table, m);
    KRange r{static_cast<std::size_t>(-1), 0};
    fq_search(table, m, [&](const IndexList& idx) {
        r.kmin = std::min(r.kmin, idx.size());
        r.kmax = std::max(r.kmax, idx.size());
    });
    return r;
}

GapString gap_string(const Decomposition& d) {
    GapString g;
    for (std::size_t i = 0; i + 1 < d.indices.size(); ++i)
        g.push_back(d.indices[i] - d.indices[i + 1]);
    return g;
}

Decomposition expand_gap_substring(const QuiltTable& table, const Decomposition& d) {
    const IndexList& idx = d.indices;
    for (std::size_t p = 0; p + 3 < idx.size(); ++p) {
        const std::size_t top = idx[p];
        if (idx[p + 1] + 5 != top || idx[p + 2] + 10 != top || idx[p + 3] + 20 != top) continue;
        const std::size_t low = idx[p + 3];
        if (low < 10) continue;
        IndexList out(idx.begin(), idx.begin() + static_cast<long>(p) + 1);
        out.insert(out.end(), {top - 6, top - 8, top - 15, top - 20});
        out.insert(out.end(), idx.begin() + static_cast<long>(p) + 4, idx.end());
        const BigInt v = value_of(table, out);
        if (v != d.value || !is_fq_legal(out))
            throw std::logic_error("gap substring rewrite broke the decomposition");
        return make(Family::quilt, std::nullopt, std::move(out), v);
    }
    throw Error(Errc::pattern_not_found, "no (5,5,10) run with lowest index >= 10");
}

}  // namespace generacci
