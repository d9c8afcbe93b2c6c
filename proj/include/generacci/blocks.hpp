#pragma once

#include "generacci/sequences.hpp"
#include "generacci/types.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace generacci {

struct Block {
    std::vector<unsigned> c;

    unsigned size() const;
    std::size_t length() const { return c.size(); }
    std::string str() const;  // "[2,0]"

    friend bool operator==(const Block&, const Block&) = default;
    friend auto operator<=>(const Block&, const Block&) = default;
};

struct BlockSystem {
    std::string name;
    std::vector<Block> S;
    std::vector<Block> T;
    // Underlying sequence H_1, H_2, ...; may be shorter than needed or empty.
    std::vector<BigInt> H;

    std::size_t L_S() const;
    std::size_t L_T() const;  // 0 when T is empty
    unsigned Z_S() const;
    // l(t); throws when no S block has size t or sizes disagree on length
    std::size_t length_of(unsigned size) const;
    std::vector<const Block*> blocks_of_size(unsigned size) const;
};

struct SystemDiagnostics {
    bool same_size_same_length = false;
    bool zero_block_is_shortest = false;
    bool has_size_one = false;
    bool nonempty_blocks = false;
    std::vector<std::string> problems;

    bool ok() const { return problems.empty(); }
};

SystemDiagnostics validate_block_system(const BlockSystem& sys);
void require_valid(const BlockSystem& sys);  // throws invalid-system

BlockSystem zeckendorf_system();
// H_n = 2H_{n-1} + 2H_{n-2} + 2H_{n-4}
BlockSystem plrs_system();
// S = {0^b} u {e_i 0^{sb}}, T = {e_i 0^{rb} : 0 <= r < s}, e_i the unit vectors of length b.
BlockSystem generacci_block_system(GeneracciParams p);

// Sections "S:" and "T:" with one comma-separated block per line, optional
// "H:" with comma-separated initial terms and "name:". '#' starts a comment.
BlockSystem parse_block_system(std::istream& in);
BlockSystem load_block_system(const std::string& path);

struct BlockDecomposition {
    std::vector<Block> blocks;
    bool ends_with_T = false;

    std::vector<unsigned> coefficients() const;
    std::size_t length() const;
    unsigned summands() const;
    // c_i multiplies H_{m+1-i}; empty when H is too short
    std::optional<BigInt> value(const BlockSystem& sys) const;
    std::string str() const;
};

// Longest-match-first parse with backtracking. The first block must have
// positive size (for b = 1 systems this is c_1 > 0).
BlockDecomposition encode_blocks(const BlockSystem& sys, const std::vector<unsigned>& coefficients);

// Every parse, for uniqueness checks.
std::vector<BlockDecomposition> all_parses(const BlockSystem& sys,
                                           const std::vector<unsigned>& coefficients);

// Position of the block removed by remove_last_s_block: the last S block that is
// not the closing block, i.e. the S block right before the final block.
std::size_t last_s_position(const BlockDecomposition& d);

struct Removal {
    BlockDecomposition result;
    Block removed;
    std::size_t position;
};

Removal remove_last_s_block(const BlockSystem& sys, const BlockDecomposition& d);
BlockDecomposition insert_s_block(const BlockDecomposition& d, const Block& b, std::size_t position);

// Omega_n: legal block sequences of total length n whose first block has positive size.
void for_each_omega(const BlockSystem& sys, std::size_t n,
                    const std::function<void(const BlockDecomposition&)>& visit);

// [k] = members of Omega_n with k summands, by counting over block sequences.
std::vector<BigInt> omega_summand_counts(const BlockSystem& sys, std::size_t n);
BigInt omega_size(const BlockSystem& sys, std::size_t n);

// H_{m+1} - H_m when H covers it, else nullopt.
std::optional<BigInt> h_step(const BlockSystem& sys, std::size_t m);

inline constexpr std::size_t kOmegaEnumerationCap = 25;
// Walking Omega_n is skipped past this many members even below the cap.
inline constexpr std::size_t kOmegaEnumerationLimit = 2'000'000;

// |Upsilon_{n,b}|: members of Omega_n whose block before the final block is b.
BigInt upsilon_count(const BlockSystem& sys, std::size_t n, const Block& b);

struct ZnDistribution {
    std::size_t n = 0;
    bool enumerated_available = false;
    std::map<unsigned, Rational> enumerated;  // P(Z_n = t) by walking Omega_n
    std::map<Block, BigInt> upsilon_enumerated;
    std::map<unsigned, Rational> counted;     // from upsilon_count
    std::map<Block, BigInt> upsilon;
    std::map<unsigned, Rational> formula;     // |B_t| |Omega_{n-l(t)}| / |Omega_n|
    std::optional<std::map<unsigned, Rational>> formula_h;  // same with H_{m+1} - H_m
    Rational expected_length;                 // E[L_n]
    std::optional<double> expected_K;         // E[K_n] when a fit is supplied
    std::optional<double> f_n;                // f(n) = E[Y_n] - Cn - d
    std::optional<double> var_K;
};

struct LinearFit {
    double C = 0;
    double d = 0;
    double max_residual = 0;
};

// Least-squares fit of E[Y_n] = C n + d over n in [lo, hi] with Omega_n nonempty.
LinearFit fit_mean_line(const BlockSystem& sys, std::size_t lo, std::size_t hi);

// Mean and variance of the summand count over Omega_n; nullopt when Omega_n is empty.
std::optional<std::pair<Rational, Rational>> omega_moments(const BlockSystem& sys, std::size_t n);

ZnDistribution zn_distribution(const BlockSystem& sys, std::size_t n,
                               const std::optional<LinearFit>& fit = std::nullopt,
                               std::size_t cap = kOmegaEnumerationCap, unsigned jobs = 1);

struct KappaRow {
    std::size_t n;
    Rational var_Y;
    double var_K;       // NaN when undefined
    double mean_K_gap;  // E[K_n] - f(n); NaN when undefined
    bool bound_holds;
};

struct KappaReport {
    LinearFit fit;
    double threshold = 0;   // C^2 l(0)^2 / (2|S|)
    std::size_t N = 0;      // start of the first 10-run with Var(K_n) > threshold
    bool N_found = false;
    std::size_t N_hat = 0;
    std::size_t j_lo = 0;  // kappa minimises Var(Y_j)/j over [j_lo, N_hat]
    // H differences nondecreasing and > 1 past index L_T + 1, over the stored terms
    bool sequence_hypotheses = false;
    double kappa = 0;
    std::vector<KappaRow> rows;
    bool passes = false;
};

struct KappaOptions {
    std::optional<double> C;      // replaces the fitted slope; d is refitted
    std::size_t fit_lo = 100;
    std::size_t fit_hi = 200;
    std::size_t search_extra = 60;  // how far past n_hi Var(K_n) is tracked
    std::size_t run = 10;
};

KappaReport kappa_bound_check(const BlockSystem& sys, std::size_t n_lo, std::size_t n_hi,
                              const KappaOptions& opt = {});

}  // namespace generacci
