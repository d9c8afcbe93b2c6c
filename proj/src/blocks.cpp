#include "generacci/blocks.hpp"

#include "generacci/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace generacci {

unsigned Block::size() const { return std::accumulate(c.begin(), c.end(), 0u); }

std::string Block::str() const {
    std::string out = "[";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(c[i]);
    }
    return out + "]";
}

std::size_t BlockSystem::L_S() const {
    std::size_t m = 0;
    for (const auto& b : S) m = std::max(m, b.length());
    return m;
}

std::size_t BlockSystem::L_T() const {
    std::size_t m = 0;
    for (const auto& b : T) m = std::max(m, b.length());
    return m;
}

unsigned BlockSystem::Z_S() const {
    unsigned m = 0;
    for (const auto& b : S) m = std::max(m, b.size());
    return m;
}

std::size_t BlockSystem::length_of(unsigned size) const {
    std::optional<std::size_t> len;
    for (const auto& b : S) {
        if (b.size() != size) continue;
        if (len && *len != b.length())
            throw Error(Errc::invalid_system, "blocks of size " + std::to_string(size) + " differ in length");
        len = b.length();
    }
    if (!len) throw Error(Errc::out_of_range, "no S block of size " + std::to_string(size));
    return *len;
}

std::vector<const Block*> BlockSystem::blocks_of_size(unsigned size) const {
    std::vector<const Block*> out;
    for (const auto& b : S)
        if (b.size() == size) out.push_back(&b);
    return out;
}

SystemDiagnostics validate_block_system(const BlockSystem& sys) {
    SystemDiagnostics d;
    d.nonempty_blocks = !sys.S.empty();
    for (const auto* set : {&sys.S, &sys.T})
        for (const auto& b : *set)
            if (b.c.empty()) d.nonempty_blocks = false;
    if (!d.nonempty_blocks) d.problems.push_back("S is empty or some block has length 0");

    d.same_size_same_length = true;
    std::map<unsigned, std::size_t> len;
    for (const auto& b : sys.S) {
        auto [it, fresh] = len.emplace(b.size(), b.length());
        if (!fresh && it->second != b.length()) d.same_size_same_length = false;
    }
    if (!d.same_size_same_length) d.problems.push_back("(i) two S blocks of equal size have different lengths");

    d.zero_block_is_shortest = false;
    if (auto it = len.find(0); it != len.end()) {
        d.zero_block_is_shortest = true;
        for (const auto& b : sys.S)
            if (b.length() < it->second) d.zero_block_is_shortest = false;
    }
    if (!d.zero_block_is_shortest) d.problems.push_back("(ii) no size-0 S block of minimal length");

    d.has_size_one = len.count(1) > 0;
    if (!d.has_size_one) d.problems.push_back("(iii) no S block of size 1");

    std::set<Block> s_seen(sys.S.begin(), sys.S.end());
    if (s_seen.size() != sys.S.size()) d.problems.push_back("duplicate S block");
    std::set<Block> t_seen(sys.T.begin(), sys.T.end());
    if (t_seen.size() != sys.T.size()) d.problems.push_back("duplicate T block");
    return d;
}

void require_valid(const BlockSystem& sys) {
    auto d = validate_block_system(sys);
    if (d.ok()) return;
    std::string msg = sys.name.empty() ? "block system" : sys.name;
    for (const auto& p : d.problems) msg += "; " + p;
    throw Error(Errc::invalid_system, msg);
}

namespace {

Block blk(std::initializer_list<unsigned> c) { return Block{std::vector<unsigned>(c)}; }

std::vector<BigInt> extend_linear(std::vector<BigInt> h, const std::vector<long>& coeff, std::size_t count) {
    while (h.size() < count) {
        BigInt next = 0;
        for (std::size_t i = 0; i < coeff.size(); ++i)
            if (coeff[i]) next += coeff[i] * h[h.size() - 1 - i];
        h.push_back(next);
    }
    return h;
}

constexpr std::size_t kBuiltinTerms = 160;

}  // namespace

BlockSystem zeckendorf_system() {
    BlockSystem sys;
    sys.name = "zeckendorf";
    sys.S = {blk({0}), blk({1, 0})};
    sys.T = {blk({1})};
    sys.H = extend_linear({1, 2}, {1, 1}, kBuiltinTerms);
    return sys;
}

BlockSystem plrs_system() {
    BlockSystem sys;
    sys.name = "plrs";
    sys.S = {blk({0}), blk({1}), blk({2, 0}), blk({2, 1}), blk({2, 2, 0, 0}), blk({2, 2, 0, 1})};
    sys.T = {blk({2}), blk({2, 2}), blk({2, 2, 0})};
    sys.H = extend_linear({1, 3, 9, 25}, {2, 2, 0, 2}, kBuiltinTerms);
    return sys;
}

BlockSystem generacci_block_system(GeneracciParams p) {
    const auto b = static_cast<std::size_t>(p.b);
    const auto s = static_cast<std::size_t>(p.s);
    BlockSystem sys;
    sys.name = "generacci(" + std::to_string(p.s) + "," + std::to_string(p.b) + ")";
    sys.S.push_back(Block{std::vector<unsigned>(b, 0)});
    for (std::size_t i = 0; i < b; ++i) {
        Block e{std::vector<unsigned>(b + s * b, 0)};
        e.c[i] = 1;
        sys.S.push_back(e);
    }
    for (std::size_t r = 0; r < s; ++r)
        for (std::size_t i = 0; i < b; ++i) {
            Block e{std::vector<unsigned>(b + r * b, 0)};
            e.c[i] = 1;
            sys.T.push_back(e);
        }
    sys.H = generacci_by_recurrence(p, kBuiltinTerms).terms();
    return sys;
}

namespace {

std::string trim(std::string s) {
    auto sp = [](unsigned char ch) { return std::isspace(ch) != 0; };
    while (!s.empty() && sp(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && sp(s[i])) ++i;
    return s.substr(i);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::string cleaned;
    for (char ch : line)
        cleaned += (ch == '[' || ch == ']') ? ' ' : ch;
    std::vector<std::string> out;
    std::stringstream ss(cleaned);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

}  // namespace

BlockSystem parse_block_system(std::istream& in) {
    BlockSystem sys;
    enum class Sec { none, S, T, H } sec = Sec::none;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& why) {
        throw Error(Errc::invalid_system, "line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("name:", 0) == 0) {
            sys.name = trim(line.substr(5));
            continue;
        }
        std::string rest;
        if (line.rfind("S:", 0) == 0) { sec = Sec::S; rest = trim(line.substr(2)); }
        else if (line.rfind("T:", 0) == 0) { sec = Sec::T; rest = trim(line.substr(2)); }
        else if (line.rfind("H:", 0) == 0) { sec = Sec::H; rest = trim(line.substr(2)); }
        else rest = line;
        if (rest.empty()) continue;
        if (sec == Sec::none) fail("entry outside a section");
        auto toks = split_commas(rest);
        if (sec == Sec::H) {
            for (const auto& t : toks) {
                BigInt v;
                if (v.set_str(t, 10) != 0 || v <= 0) fail("bad H term '" + t + "'");
                sys.H.push_back(v);
            }
            continue;
        }
        Block b;
        for (const auto& t : toks) {
            std::size_t used = 0;
            long v = -1;
            try { v = std::stol(t, &used); } catch (const std::exception&) {}
            if (v < 0 || used != t.size()) fail("bad coefficient '" + t + "'");
            b.c.push_back(static_cast<unsigned>(v));
        }
        if (b.c.empty()) fail("empty block");
        (sec == Sec::S ? sys.S : sys.T).push_back(std::move(b));
    }
    for (std::size_t i = 1; i < sys.H.size(); ++i)
        if (sys.H[i] <= sys.H[i - 1]) throw Error(Errc::invalid_system, "H is not strictly increasing");
    return sys;
}

BlockSystem load_block_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::invalid_system, "cannot open " + path);
    auto sys = parse_block_system(in);
    if (sys.name.empty()) sys.name = path;
    return sys;
}

std::vector<unsigned> BlockDecomposition::coefficients() const {
    std::vector<unsigned> out;
    for (const auto& b : blocks) out.insert(out.end(), b.c.begin(), b.c.end());
    return out;
}

std::size_t BlockDecomposition::length() const {
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.length();
    return n;
}

unsigned BlockDecomposition::summands() const {
    unsigned k = 0;
    for (const auto& b : blocks) k += b.size();
    return k;
}

std::optional<BigInt> BlockDecomposition::value(const BlockSystem& sys) const {
    auto c = coefficients();
    if (sys.H.size() < c.size()) return std::nullopt;
    BigInt v = 0;
    const std::size_t m = c.size();
    for (std::size_t i = 0; i < m; ++i)
        if (c[i]) v += c[i] * sys.H[m - 1 - i];  // H_{m+1-i}, i 1-based
    return v;
}

std::string BlockDecomposition::str() const {
    std::string out;
    for (const auto& b : blocks) out += b.str();
    return out;
}

namespace {

bool matches(const std::vector<unsigned>& c, std::size_t pos, const Block& b) {
    return pos + b.length() <= c.size() && std::equal(b.c.begin(), b.c.end(), c.begin() + pos);
}

struct Candidate {
    const Block* block;
    bool terminal;
};

// Longest first, S before T on equal length.
std::vector<Candidate> candidates(const BlockSystem& sys, const std::vector<unsigned>& c, std::size_t pos) {
    std::vector<Candidate> out;
    for (const auto& b : sys.S)
        if (matches(c, pos, b)) out.push_back({&b, false});
    for (const auto& b : sys.T)
        if (pos + b.length() == c.size() && matches(c, pos, b)) out.push_back({&b, true});
    std::stable_sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
        if (x.block->length() != y.block->length()) return x.block->length() > y.block->length();
        return !x.terminal && y.terminal;
    });
    return out;
}

bool parse_from(const BlockSystem& sys, const std::vector<unsigned>& c, std::size_t pos,
                BlockDecomposition& cur, std::vector<BlockDecomposition>* all) {
    if (pos == c.size()) {
        if (!all) return true;
        all->push_back(cur);
        return false;
    }
    for (const auto& cand : candidates(sys, c, pos)) {
        if (pos == 0 && cand.block->size() == 0) continue;
        cur.blocks.push_back(*cand.block);
        cur.ends_with_T = cand.terminal;
        if (parse_from(sys, c, pos + cand.block->length(), cur, all)) return true;
        cur.blocks.pop_back();
        cur.ends_with_T = false;
    }
    return false;
}

void require_leading(const std::vector<unsigned>& c) {
    if (std::all_of(c.begin(), c.end(), [](unsigned v) { return v == 0; }))
        throw Error(Errc::not_legal, "no positive coefficient");
}

}  // namespace

BlockDecomposition encode_blocks(const BlockSystem& sys, const std::vector<unsigned>& coefficients) {
    require_leading(coefficients);
    BlockDecomposition cur;
    if (!parse_from(sys, coefficients, 0, cur, nullptr)) {
        std::string s;
        for (auto v : coefficients) s += std::to_string(v) + " ";
        throw Error(Errc::not_legal, "no block parse of " + trim(s) + " with a positive first block");
    }
    return cur;
}

std::vector<BlockDecomposition> all_parses(const BlockSystem& sys, const std::vector<unsigned>& coefficients) {
    std::vector<BlockDecomposition> out;
    if (std::all_of(coefficients.begin(), coefficients.end(), [](unsigned v) { return v == 0; })) return out;
    BlockDecomposition cur;
    parse_from(sys, coefficients, 0, cur, &out);
    return out;
}

std::size_t last_s_position(const BlockDecomposition& d) {
    if (d.blocks.size() < 2) throw Error(Errc::no_s_block, "decomposition " + d.str() + " has a single block");
    return d.blocks.size() - 2;
}

Removal remove_last_s_block(const BlockSystem& sys, const BlockDecomposition& d) {
    const std::size_t pos = last_s_position(d);
    const Block& b = d.blocks[pos];
    if (std::find(sys.S.begin(), sys.S.end(), b) == sys.S.end())
        throw Error(Errc::not_legal, b.str() + " is not an S block");
    Removal r{d, b, pos};
    r.result.blocks.erase(r.result.blocks.begin() + static_cast<std::ptrdiff_t>(pos));
    return r;
}

BlockDecomposition insert_s_block(const BlockDecomposition& d, const Block& b, std::size_t position) {
    if (position > d.blocks.size()) throw Error(Errc::out_of_range, "insert position past the end");
    BlockDecomposition out = d;
    out.blocks.insert(out.blocks.begin() + static_cast<std::ptrdiff_t>(position), b);
    return out;
}

namespace {

void walk(const BlockSystem& sys, std::size_t remaining, BlockDecomposition& cur,
          const std::function<void(const BlockDecomposition&)>& visit) {
    if (remaining == 0) {
        visit(cur);
        return;
    }
    for (const auto& b : sys.T)
        if (b.length() == remaining) {
            cur.blocks.push_back(b);
            cur.ends_with_T = true;
            visit(cur);
            cur.ends_with_T = false;
            cur.blocks.pop_back();
        }
    for (const auto& b : sys.S)
        if (b.length() <= remaining) {
            cur.blocks.push_back(b);
            walk(sys, remaining - b.length(), cur, visit);
            cur.blocks.pop_back();
        }
}

// Omega_n members that begin with `first`.
void walk_from(const BlockSystem& sys, std::size_t n, const Block& first, bool first_terminal,
               const std::function<void(const BlockDecomposition&)>& visit) {
    BlockDecomposition cur;
    cur.blocks.push_back(first);
    if (first_terminal) {
        if (first.length() == n) {
            cur.ends_with_T = true;
            visit(cur);
        }
        return;
    }
    if (first.length() <= n) walk(sys, n - first.length(), cur, visit);
}

using Poly = std::vector<BigInt>;

void add_shifted(Poly& acc, const Poly& p, unsigned shift) {
    if (acc.size() < p.size() + shift) acc.resize(p.size() + shift, 0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i + shift] += p[i];
}

// Counting tables over block sequences, grown on demand.
class Counter {
public:
    explicit Counter(const BlockSystem& sys) : sys_(sys) {
        s0_.push_back(1);
        pre_.push_back(1);
        tail_.push_back(Poly{1});
        omega_.push_back(Poly{});
    }

    void grow(std::size_t n) {
        for (std::size_t r = s0_.size(); r <= n; ++r) {
            BigInt s0 = 0, pre = 0;
            Poly tail, omega;
            for (const auto& b : sys_.T)
                if (b.length() == r) {
                    add_shifted(tail, Poly{1}, b.size());
                    if (b.size() > 0) add_shifted(omega, Poly{1}, b.size());
                }
            for (const auto& b : sys_.S) {
                if (b.length() > r) continue;
                const std::size_t rest = r - b.length();
                s0 += s0_[rest];
                add_shifted(tail, tail_[rest], b.size());
                if (b.size() > 0) {
                    pre += s0_[rest];
                    add_shifted(omega, tail_[rest], b.size());
                }
            }
            s0_.push_back(s0);
            pre_.push_back(pre);
            tail_.push_back(std::move(tail));
            omega_.push_back(std::move(omega));
        }
    }

    const Poly& omega(std::size_t n) {
        grow(n);
        return omega_[n];
    }

    BigInt omega_size(std::size_t n) {
        BigInt t = 0;
        for (const auto& v : omega(n)) t += v;
        return t;
    }

    BigInt upsilon(std::size_t n, const Block& b) {
        grow(n);
        BigInt total = 0;
        if (b.length() > n) return total;
        const std::size_t m = n - b.length();
        auto add_final = [&](const Block& f) {
            if (f.length() > m) return;
            const std::size_t r = m - f.length();
            total += pre_[r];
            if (r == 0 && b.size() == 0) total -= 1;
        };
        for (const auto& f : sys_.S) add_final(f);
        for (const auto& f : sys_.T) add_final(f);
        return total;
    }

    std::optional<std::pair<Rational, Rational>> moments(std::size_t n) {
        const Poly& p = omega(n);
        BigInt w = 0, s1 = 0, s2 = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            w += p[k];
            s1 += p[k] * static_cast<unsigned long>(k);
            s2 += p[k] * static_cast<unsigned long>(k * k);
        }
        if (w == 0) return std::nullopt;
        Rational mean(s1, w), ex2(s2, w);
        mean.canonicalize();
        ex2.canonicalize();
        return std::make_pair(mean, Rational(ex2 - mean * mean));
    }

private:
    const BlockSystem& sys_;
    std::vector<BigInt> s0_;   // S-block sequences of length r, empty included
    std::vector<BigInt> pre_;  // same, first block of positive size or empty
    std::vector<Poly> tail_;   // S blocks then at most one T block, by size
    std::vector<Poly> omega_;
};

Rational ratio(const BigInt& a, const BigInt& b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

}  // namespace

void for_each_omega(const BlockSystem& sys, std::size_t n,
                    const std::function<void(const BlockDecomposition&)>& visit) {
    if (n == 0) return;
    for (const auto& b : sys.T)
        if (b.size() > 0) walk_from(sys, n, b, true, visit);
    for (const auto& b : sys.S)
        if (b.size() > 0) walk_from(sys, n, b, false, visit);
}

std::vector<BigInt> omega_summand_counts(const BlockSystem& sys, std::size_t n) {
    Counter c(sys);
    return c.omega(n);
}

BigInt omega_size(const BlockSystem& sys, std::size_t n) {
    Counter c(sys);
    return c.omega_size(n);
}

std::optional<std::pair<Rational, Rational>> omega_moments(const BlockSystem& sys, std::size_t n) {
    Counter c(sys);
    return c.moments(n);
}

BigInt upsilon_count(const BlockSystem& sys, std::size_t n, const Block& b) {
    Counter c(sys);
    return c.upsilon(n, b);
}

std::optional<BigInt> h_step(const BlockSystem& sys, std::size_t m) {
    if (m < 1 || sys.H.size() < m + 1) return std::nullopt;
    return BigInt(sys.H[m] - sys.H[m - 1]);
}

LinearFit fit_mean_line(const BlockSystem& sys, std::size_t lo, std::size_t hi) {
    Counter c(sys);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n = lo; n <= hi; ++n)
        if (auto m = c.moments(n)) pts.emplace_back(static_cast<double>(n), m->first.get_d());
    if (pts.size() < 2) throw Error(Errc::insufficient_data, "need two nonempty Omega_n to fit a line");
    double sx = 0, sy = 0;
    for (auto [x, y] : pts) { sx += x; sy += y; }
    const double mx = sx / pts.size(), my = sy / pts.size();
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) { sxx += (x - mx) * (x - mx); sxy += (x - mx) * (y - my); }
    LinearFit f;
    f.C = sxy / sxx;
    f.d = my - f.C * mx;
    for (auto [x, y] : pts) f.max_residual = std::max(f.max_residual, std::abs(y - f.C * x - f.d));
    return f;
}

namespace {

struct KStats {
    double mean;
    double var;
};

// E[K_n], Var(K_n) given P(Z_n = t).
KStats k_stats(const BlockSystem& sys, Counter& c, std::size_t n, const std::map<unsigned, Rational>& p,
               const LinearFit& fit) {
    double e1 = 0, e2 = 0;
    for (const auto& [t, pt] : p) {
        if (pt == 0) continue;
        const std::size_t l = sys.length_of(t);
        auto m = c.moments(n - l);
        if (!m) continue;
        const double f = m->first.get_d() - fit.C * static_cast<double>(n - l) - fit.d;
        const double k = t + f - fit.C * static_cast<double>(l);
        e1 += pt.get_d() * k;
        e2 += pt.get_d() * k * k;
    }
    return {e1, e2 - e1 * e1};
}

std::map<unsigned, Rational> counted_distribution(const BlockSystem& sys, Counter& c, std::size_t n,
                                                  std::map<Block, BigInt>* per_block) {
    std::map<unsigned, Rational> out;
    const BigInt total = c.omega_size(n);
    if (total == 0) return out;
    std::map<unsigned, BigInt> by_size;
    for (const auto& b : sys.S) {
        BigInt u = c.upsilon(n, b);
        if (per_block) (*per_block)[b] = u;
        by_size[b.size()] += u;
    }
    for (const auto& [t, v] : by_size) out[t] = ratio(v, total);
    return out;
}

}  // namespace

ZnDistribution zn_distribution(const BlockSystem& sys, std::size_t n, const std::optional<LinearFit>& fit,
                               std::size_t cap, unsigned jobs) {
    require_valid(sys);
    if (n <= sys.L_S() + sys.L_T())
        throw Error(Errc::n_too_small, "n must exceed L_S + L_T = " + std::to_string(sys.L_S() + sys.L_T()));
    Counter c(sys);
    ZnDistribution z;
    z.n = n;
    const BigInt total = c.omega_size(n);
    if (total == 0) throw Error(Errc::empty_distribution, "Omega_" + std::to_string(n) + " is empty");

    z.counted = counted_distribution(sys, c, n, &z.upsilon);

    for (unsigned t = 0; t <= sys.Z_S(); ++t) {
        auto bs = sys.blocks_of_size(t);
        if (bs.empty()) continue;
        const std::size_t l = sys.length_of(t);
        const BigInt w = bs.size() * c.omega_size(n - l);
        z.formula[t] = ratio(w, total);
    }

    // H form, only where the H steps are the Omega sizes
    std::map<unsigned, Rational> fh;
    bool h_ok = true;
    if (auto denom = h_step(sys, n); denom && *denom == total) {
        for (const auto& [t, _] : z.formula) {
            const std::size_t m = n - sys.length_of(t);
            auto step = h_step(sys, m);
            if (!step || *step != c.omega_size(m)) {
                h_ok = false;
                break;
            }
            fh[t] = ratio(sys.blocks_of_size(t).size() * *step, *denom);
        }
    } else {
        h_ok = false;
    }
    if (h_ok) z.formula_h = fh;

    if (n <= cap && total <= kOmegaEnumerationLimit) {
        std::vector<std::pair<const Block*, bool>> firsts;
        for (const auto& b : sys.T)
            if (b.size() > 0) firsts.emplace_back(&b, true);
        for (const auto& b : sys.S)
            if (b.size() > 0) firsts.emplace_back(&b, false);
        auto count_from = [&](std::size_t lo, std::size_t step) {
            std::map<Block, BigInt> acc;
            for (std::size_t i = lo; i < firsts.size(); i += step)
                walk_from(sys, n, *firsts[i].first, firsts[i].second, [&](const BlockDecomposition& d) {
                    acc[d.blocks[last_s_position(d)]] += 1;
                });
            return acc;
        };
        const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(jobs, firsts.size()));
        std::vector<std::future<std::map<Block, BigInt>>> parts;
        for (std::size_t i = 1; i < w; ++i) parts.push_back(std::async(std::launch::async, count_from, i, w));
        auto merged = count_from(0, w);
        for (auto& f : parts)
            for (auto& [b, v] : f.get()) merged[b] += v;
        BigInt seen = 0;
        std::map<unsigned, BigInt> by_size;
        for (const auto& [b, v] : merged) {
            seen += v;
            by_size[b.size()] += v;
        }
        for (const auto& b : sys.S) z.upsilon_enumerated.emplace(b, 0);
        for (auto& [b, v] : merged) z.upsilon_enumerated[b] = v;
        for (unsigned t = 0; t <= sys.Z_S(); ++t)
            if (!sys.blocks_of_size(t).empty()) z.enumerated[t] = ratio(by_size[t], seen);
        z.enumerated_available = true;
    }

    const auto& dist = z.enumerated_available ? z.enumerated : z.counted;
    z.expected_length = 0;
    for (const auto& [t, p] : dist) z.expected_length += p * static_cast<unsigned long>(sys.length_of(t));

    if (fit) {
        auto ks = k_stats(sys, c, n, dist, *fit);
        z.expected_K = ks.mean;
        z.var_K = ks.var;
        z.f_n = c.moments(n)->first.get_d() - fit->C * static_cast<double>(n) - fit->d;
    }
    return z;
}

KappaReport kappa_bound_check(const BlockSystem& sys, std::size_t n_lo, std::size_t n_hi, const KappaOptions& opt) {
    require_valid(sys);
    KappaReport rep;
    Counter c(sys);

    rep.fit = fit_mean_line(sys, opt.fit_lo, opt.fit_hi);
    if (opt.C) {
        rep.fit.C = *opt.C;
        double sum = 0;
        std::size_t cnt = 0;
        for (std::size_t n = opt.fit_lo; n <= opt.fit_hi; ++n)
            if (auto m = c.moments(n)) {
                sum += m->first.get_d() - rep.fit.C * static_cast<double>(n);
                ++cnt;
            }
        rep.fit.d = sum / static_cast<double>(cnt);
        rep.fit.max_residual = 0;
        for (std::size_t n = opt.fit_lo; n <= opt.fit_hi; ++n)
            if (auto m = c.moments(n))
                rep.fit.max_residual = std::max(
                    rep.fit.max_residual, std::abs(m->first.get_d() - rep.fit.C * static_cast<double>(n) - rep.fit.d));
    }

    const double C = rep.fit.C;
    const double l0 = static_cast<double>(sys.length_of(0));
    const double nS = static_cast<double>(sys.S.size());
    rep.threshold = C * C * l0 * l0 / (2 * nS);

    const std::size_t first_k = sys.L_S() + sys.L_T() + 1;
    const std::size_t search_hi = std::max(n_hi, first_k) + opt.search_extra;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::map<std::size_t, double> var_k, gap_k;
    for (std::size_t n = first_k; n <= search_hi; ++n) {
        if (c.omega_size(n) == 0) continue;
        auto dist = counted_distribution(sys, c, n, nullptr);
        auto ks = k_stats(sys, c, n, dist, rep.fit);
        var_k[n] = ks.var;
        gap_k[n] = ks.mean - (c.moments(n)->first.get_d() - C * static_cast<double>(n) - rep.fit.d);
    }

    // start of the first run of `opt.run` consecutive defined n with Var(K_n) above threshold
    std::size_t run = 0, start = 0;
    for (const auto& [n, v] : var_k) {
        if (v > rep.threshold) {
            if (run == 0) start = n;
            if (++run == opt.run) {
                rep.N = start;
                rep.N_found = true;
                break;
            }
        } else {
            run = 0;
        }
    }
    if (!rep.N_found) rep.N = search_hi;
    rep.N_hat = std::max(sys.L_S() + sys.L_T() + 2, rep.N);

    rep.j_lo = sys.L_T() + 2;
    rep.kappa = C * C * l0 * l0 / (2 * nS * static_cast<double>(sys.L_S()));
    for (std::size_t j = rep.j_lo; j <= rep.N_hat; ++j)
        if (auto m = c.moments(j)) rep.kappa = std::min(rep.kappa, m->second.get_d() / static_cast<double>(j));

    rep.sequence_hypotheses = sys.H.size() >= 3;
    for (std::size_t k = 0; k + 1 < sys.H.size(); ++k) {
        const BigInt step = sys.H[k + 1] - sys.H[k];  // H_{k+2} - H_{k+1}
        if (k > 0 && step < sys.H[k] - sys.H[k - 1]) rep.sequence_hypotheses = false;
        if (k > sys.L_T() && step <= 1) rep.sequence_hypotheses = false;
    }

    rep.passes = rep.kappa > 0;
    for (std::size_t n = std::max<std::size_t>(n_lo, 1); n <= n_hi; ++n) {
        auto m = c.moments(n);
        if (!m) continue;
        KappaRow row{n, m->second, nan, nan, true};
        if (auto it = var_k.find(n); it != var_k.end()) {
            row.var_K = it->second;
            row.mean_K_gap = gap_k[n];
        }
        if (n >= rep.j_lo) row.bound_holds = m->second.get_d() >= rep.kappa * static_cast<double>(n);
        rep.passes = rep.passes && row.bound_holds;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace generacci
