#include "generacci/counting.hpp"

#include "generacci/errors.hpp"

#include <array>
#include <functional>
#include <string>
#include <unordered_map>

namespace generacci {

namespace {

const BigInt& zero() {
    static const BigInt z = 0;
    return z;
}

const std::vector<BigInt>& empty_row() {
    static const std::vector<BigInt> r;
    return r;
}

void trim(std::vector<BigInt>& row) {
    while (row.size() > 1 && row.back() == 0) row.pop_back();
}

// y-polynomial truncated at degree kmax.
using YPoly = std::vector<BigInt>;

struct Term {
    std::size_t xe;
    std::size_t ye;
    long c;
};

}  // namespace

CountTable::CountTable(CountFamily family, std::optional<GeneracciParams> params,
                       std::vector<std::vector<BigInt>> p, std::vector<std::vector<BigInt>> q)
    : family_(family), params_(params), p_(std::move(p)), q_(std::move(q)) {}

const BigInt& CountTable::p(std::size_t n, std::size_t k) const {
    if (n >= p_.size() || k >= p_[n].size()) return zero();
    return p_[n][k];
}

const BigInt& CountTable::q(std::size_t n, std::size_t k) const {
    if (n >= q_.size() || k >= q_[n].size()) return zero();
    return q_[n][k];
}

const std::vector<BigInt>& CountTable::p_row(std::size_t n) const {
    return n < p_.size() ? p_[n] : empty_row();
}

const std::vector<BigInt>& CountTable::q_row(std::size_t n) const {
    return n < q_.size() ? q_[n] : empty_row();
}

CountTable generacci_count_tables(GeneracciParams params, std::size_t n_max) {
    const std::size_t s = static_cast<std::size_t>(params.s);
    const long b = params.b;
    std::vector<std::vector<BigInt>> q(n_max + 1), p(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        const std::size_t kcap = n / (s + 1) + 2;
        q[n].assign(kcap + 1, 0);
        q[n][0] = 1;
        q[n][1] = static_cast<long>(n) * b;
        if (n >= s + 1)
            for (std::size_t k = 2; k <= kcap; ++k) {
                BigInt v = b * (k - 1 < q[n - s - 1].size() ? q[n - s - 1][k - 1] : BigInt(0));
                if (k < q[n - 1].size()) v += q[n - 1][k];
                q[n][k] = v;
            }
        trim(q[n]);
    }
    for (std::size_t n = 0; n <= n_max; ++n) {
        const std::size_t kcap = n / (s + 1) + 2;
        p[n].assign(kcap + 1, 0);
        if (n == 0) {
            p[n][0] = 1;
        } else if (n <= s) {
            p[n][1] = b;
        } else {
            // nonzero only for 1 <= k <= (n+s)/(s+1)
            for (std::size_t k = 1; k * (s + 1) <= n + s && k <= kcap; ++k)
                if (k - 1 < q[n - s - 1].size()) p[n][k] = b * q[n - s - 1][k - 1];
        }
        trim(p[n]);
    }
    return CountTable(CountFamily::generacci, params, std::move(p), std::move(q));
}

BigInt pnk_closed_form(GeneracciParams params, long n, long k) {
    if (k < 0 || n < 0) return 0;
    if (k == 0) return 1;
    if (n < 1 + (k - 1) * (params.s + 1)) return 0;
    BigInt c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n - params.s * (k - 1)),
                 static_cast<unsigned long>(k));
    BigInt bk;
    mpz_ui_pow_ui(bk.get_mpz_t(), static_cast<unsigned long>(params.b),
                  static_cast<unsigned long>(k));
    return bk * c;
}

CountTable fq_count_tables(std::size_t n_max) {
    std::vector<std::vector<BigInt>> q(n_max + 1), p(n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) {
        const std::size_t kcap = n / 5 + 2;
        q[n].assign(kcap + 1, 0);
        q[n][0] = 1;
        q[n][1] = static_cast<unsigned long>(n);
        if (n == 5) q[n][2] = 1;
        if (n >= 6) q[n][2] = 1 + (static_cast<long>(n) - 5) * (static_cast<long>(n) - 4) / 2;
        for (std::size_t k = 3; k <= kcap; ++k) {
            if (n < 5 * (k - 1)) continue;
            BigInt v = k - 1 < q[n - 5].size() ? q[n - 5][k - 1] : BigInt(0);
            if (k < q[n - 1].size()) v += q[n - 1][k];
            q[n][k] = v;
        }
        trim(q[n]);
    }
    for (std::size_t n = 0; n <= n_max; ++n) {
        const std::size_t kcap = n / 5 + 2;
        p[n].assign(kcap + 1, 0);
        if (n == 0) {
            p[n][0] = 1;
        } else if (n <= 4) {
            p[n][1] = 1;
        } else {
            for (std::size_t k = 1; k <= kcap; ++k)
                if (k - 1 < q[n - 5].size()) p[n][k] = q[n - 5][k - 1];
        }
        trim(p[n]);
    }
    return CountTable(CountFamily::quilt, std::nullopt, std::move(p), std::move(q));
}

std::vector<BigInt> interval_counts(const CountTable& table, std::size_t n) {
    std::vector<BigInt> row = table.p_row(n);
    if (table.family() == CountFamily::quilt && n == 5) {
        if (row.size() < 3) row.resize(3, 0);
        row[2] += 1;
    }
    return row;
}

std::vector<std::vector<BigInt>> series_coefficients(GenFun g, std::optional<GeneracciParams> params,
                                                     std::size_t n_max, std::size_t k_max) {
    std::vector<Term> num, den;  // den lists D - 1, so D = 1 + sum(den)
    const bool gen = g == GenFun::generacci_F || g == GenFun::generacci_H;
    if (gen && !params) throw std::invalid_argument("generacci series need (s, b)");
    if (gen) {
        const std::size_t s = static_cast<std::size_t>(params->s);
        const long b = params->b;
        den = {{1, 0, -1}, {s + 1, 1, -b}};
        if (g == GenFun::generacci_F) {
            num = {{0, 0, 1}, {1, 1, b}, {1, 0, -1}, {s + 1, 1, -b}};
        } else {
            num = {{0, 0, 1}};
            for (std::size_t i = 1; i <= s; ++i) num.push_back({i, 1, b});
        }
    } else {
        den = {{1, 0, -1}, {5, 1, -1}};
        if (g == GenFun::fq_H) {
            num = {{0, 0, 1}, {1, 1, 1}, {2, 1, 1}, {3, 1, 1}, {4, 1, 1}, {5, 2, 1}};
        } else {
            num = {{0, 0, 1}, {1, 0, -1}, {1, 1, 1}, {5, 1, -1}, {10, 3, 1}};
        }
    }

    std::vector<YPoly> c(n_max + 1, YPoly(k_max + 1, 0));
    for (std::size_t n = 0; n <= n_max; ++n) {
        YPoly& cn = c[n];
        for (const auto& t : num)
            if (t.xe == n && t.ye <= k_max) cn[t.ye] += t.c;
        // N = D * C, D_0 = 1:  C_n = N_n - sum_{i >= 1} D_i C_{n-i}
        for (const auto& t : den) {
            if (t.xe > n) continue;
            const YPoly& prev = c[n - t.xe];
            for (std::size_t k = 0; k + t.ye <= k_max; ++k)
                if (prev[k] != 0) cn[k + t.ye] -= t.c * prev[k];
        }
    }
    return c;
}

std::vector<BigInt> dfq_total(std::size_t n_max) {
    const QuiltTable q = quilt_terms(n_max + 2);
    // window bits: 1 -> j+1, 2 -> j+2, 4 -> j+3, 8 -> j+4 chosen; has3: index 3 chosen
    auto choosable = [](std::size_t j, unsigned w, bool has3) {
        return !(w & 1u) && !(w & 4u) && !(w & 8u) && !(j == 1 && has3);
    };
    auto shift = [](unsigned w, bool take) { return ((w << 1) | (take ? 1u : 0u)) & 0xFu; };

    // free[j][w][h]: completions of indices <= j without a value bound; top[..]: their largest value
    std::vector<std::array<std::array<BigInt, 2>, 16>> free(n_max + 1), top(n_max + 1);
    for (std::size_t j = 0; j <= n_max; ++j)
        for (unsigned w = 0; w < 16; ++w)
            for (int h = 0; h < 2; ++h) {
                if (j == 0) {
                    free[j][w][h] = 1;
                    top[j][w][h] = 0;
                    continue;
                }
                const unsigned w0 = shift(w, false);
                free[j][w][h] = free[j - 1][w0][h];
                top[j][w][h] = top[j - 1][w0][h];
                if (choosable(j, w, h)) {
                    const unsigned w1 = shift(w, true);
                    const int h1 = (h || j == 3) ? 1 : 0;
                    free[j][w][h] += free[j - 1][w1][h1];
                    const BigInt alt = q[j] + top[j - 1][w1][h1];
                    if (alt > top[j][w][h]) top[j][w][h] = alt;
                }
            }

    std::vector<BigInt> out(n_max + 1);
    out[0] = 1;
    for (std::size_t n = 1; n <= n_max; ++n) {
        std::unordered_map<std::string, BigInt> memo;
        std::function<BigInt(std::size_t, unsigned, int, const BigInt&)> count =
            [&](std::size_t j, unsigned w, int h, const BigInt& budget) -> BigInt {
            if (budget < 0) return 0;
            if (budget >= top[j][w][h]) return free[j][w][h];
            // j >= 1 here since top[0] = 0 <= budget
            std::string key = std::to_string(j) + ':' + std::to_string(w) + ':' +
                              std::to_string(h) + ':' + budget.get_str(16);
            if (auto it = memo.find(key); it != memo.end()) return it->second;
            BigInt r = count(j - 1, shift(w, false), h, budget);
            if (choosable(j, w, h))
                r += count(j - 1, shift(w, true), (h || j == 3) ? 1 : 0, budget - q[j]);
            memo.emplace(std::move(key), r);
            return r;
        };
        out[n] = count(n, 0, 0, q[n + 1] - 1);
    }
    return out;
}

std::vector<BigInt> fq_legal_subset_counts(std::size_t n_max) {
    // state: bits 0..3 mark indices j, j-1, j-2, j-3 chosen; bit 4 marks index 1 chosen
    std::array<BigInt, 32> ways{};
    ways[0] = 1;
    std::vector<BigInt> out{1};
    for (std::size_t i = 1; i <= n_max; ++i) {
        std::array<BigInt, 32> next{};
        for (unsigned st = 0; st < 32; ++st) {
            if (ways[st] == 0) continue;
            const unsigned w = st & 0xFu, one = st & 0x10u;
            next[((w << 1) & 0xFu) | one] += ways[st];
            const bool blocked = (w & 1u) || (w & 4u) || (w & 8u) || (i == 3 && one);
            if (!blocked) next[((w << 1) & 0xFu) | 1u | (i == 1 ? 0x10u : one)] += ways[st];
        }
        ways = std::move(next);
        BigInt total = 0;
        for (const auto& v : ways) total += v;
        out.push_back(total);
    }
    return out;
}

MomentSummary moments_of(const std::vector<BigInt>& weights, std::size_t n) {
    BigInt w0 = 0, w1 = 0, w2 = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        w0 += weights[k];
        w1 += weights[k] * static_cast<unsigned long>(k);
        w2 += weights[k] * static_cast<unsigned long>(k * k);
    }
    if (w0 == 0) throw Error(Errc::empty_distribution, "all weights are zero at n=" + std::to_string(n));
    Rational mean(w1, w0);
    mean.canonicalize();
    Rational second(w2, w0);
    second.canonicalize();
    Rational var = second - mean * mean;
    return {n, mean, var};
}

MomentSummary moments_from_table(const CountTable& table, std::size_t n, Scope scope) {
    if (n > table.n_max())
        throw Error(Errc::out_of_range, "n=" + std::to_string(n) + " beyond table");
    return moments_of(scope == Scope::interval ? interval_counts(table, n) : table.q_row(n), n);
}

}  // namespace generacci
