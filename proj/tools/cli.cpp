#include "cli.hpp"

#include "checks.hpp"

#include "generacci/blocks.hpp"
#include "generacci/counting.hpp"
#include "generacci/decompose.hpp"
#include "generacci/errors.hpp"
#include "generacci/sequences.hpp"
#include "generacci/spectral.hpp"
#include "generacci/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace generacci::cli {
namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Global {
    std::string format = "json";
    unsigned jobs = 1;
    bool selftest = false;

    bool csv() const { return format == "csv"; }
    unsigned workers() const { return jobs ? jobs : std::max(1u, std::thread::hardware_concurrency()); }
};

Json strings(const std::vector<BigInt>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x.get_str());
    return a;
}

Json indices_json(const IndexList& idx) {
    Json a = Json::array();
    for (auto i : idx) a.push_back(i);
    return a;
}

// Shortest round-trip text, empty for NaN.
std::string num(double x) {
    if (std::isnan(x)) return "";
    return Json(x).dump();
}

std::string real_str(const Real& r, unsigned digits) {
    std::ostringstream os;
    os << std::setprecision(static_cast<int>(digits)) << r;
    return os.str();
}

void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        const auto& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            os << f;
            continue;
        }
        os << '"';
        for (char c : f) {
            if (c == '"') os << '"';
            os << c;
        }
        os << '"';
    }
    os << '\n';
}

unsigned precision_from_env() {
    const char* e = std::getenv("GENERACCI_PRECISION");
    if (!e || !*e) return kDefaultPrecision;
    char* end = nullptr;
    const long v = std::strtol(e, &end, 10);
    if (*end || v < static_cast<long>(kMinPrecision) || v > static_cast<long>(kMaxPrecision))
        throw UsageError("GENERACCI_PRECISION must be an integer in [" + std::to_string(kMinPrecision) + ", " +
                         std::to_string(kMaxPrecision) + "]");
    return static_cast<unsigned>(v);
}

BigInt parse_bigint(const std::string& s) {
    BigInt v;
    if (s.empty() || v.set_str(s, 10) != 0) throw UsageError("not an integer: " + s);
    if (v < 0) throw UsageError("m must be nonnegative");
    return v;
}

struct FamilyArgs {
    std::string family = "quilt";
    int s = 0;
    int b = 0;

    void add(CLI::App* c, const std::string& def) {
        family = def;
        c->add_option("--family", family, "generacci or quilt")->check(CLI::IsMember({"generacci", "quilt"}));
        c->add_option("--s", s, "spacing s >= 1");
        c->add_option("--b", b, "bin size b >= 1");
    }
    bool generacci() const { return family == "generacci"; }
    GeneracciParams params() const {
        if (s < 1 || b < 1) throw UsageError("generacci needs --s >= 1 and --b >= 1");
        return {s, b};
    }
    void describe(Json& j) const {
        j["family"] = family;
        if (generacci()) {
            j["s"] = s;
            j["b"] = b;
        }
    }
};

GeneracciTable generacci_covering(GeneracciParams p, const BigInt& m) {
    for (std::size_t count = 32;; count *= 2) {
        auto t = generacci_by_recurrence(p, count);
        if (t.last() > m) return t;
    }
}

QuiltTable quilt_covering(const BigInt& m) {
    for (std::size_t count = 32;; count *= 2) {
        auto t = quilt_terms(count);
        if (t.last() > m) return t;
    }
}

GeneracciTable generacci_bins(GeneracciParams p, std::size_t n) {
    return generacci_by_recurrence(p, (n + 2) * static_cast<std::size_t>(p.b) + 2);
}

const char* shape_name(Greedy6Shape s) {
    switch (s) {
        case Greedy6Shape::wide: return "wide";
        case Greedy6Shape::tail42: return "tail42";
        case Greedy6Shape::neither: return "neither";
    }
    return "?";
}

void verify_round_trip(const TermTable& t, const IndexList& idx, const BigInt& m) {
    if (value_of(t, idx) != m) throw std::logic_error("decomposition does not sum to " + m.get_str());
}

// ---- subcommands ----

struct TermsCmd {
    FamilyArgs fam;
    std::size_t count = 20;
    std::string method = "recurrence";
};

void do_terms(const TermsCmd& a, const Global& g, std::ostream& out) {
    TermTable t;
    if (a.fam.generacci()) {
        auto p = a.fam.params();
        t = a.method == "definition" ? generacci_by_definition(p, a.count) : generacci_by_recurrence(p, a.count);
    } else {
        t = a.method == "definition" ? quilt_by_definition(a.count) : quilt_terms(a.count);
    }
    if (g.csv()) {
        csv_row(out, {"n", "term"});
        for (std::size_t n = 1; n <= t.size(); ++n) csv_row(out, {std::to_string(n), t[n].get_str()});
        return;
    }
    Json j;
    a.fam.describe(j);
    j["method"] = a.method;
    j["count"] = t.size();
    j["terms"] = strings(t.terms());
    out << j.dump(2) << '\n';
}

struct DecomposeCmd {
    FamilyArgs fam;
    std::string algo;
    std::string m;
};

void do_decompose(const DecomposeCmd& a, const Global& g, std::ostream& out) {
    const BigInt m = parse_bigint(a.m);
    std::string algo = a.algo.empty() ? (a.fam.generacci() ? "greedy" : "greedy6") : a.algo;
    Json j;
    a.fam.describe(j);
    j["algo"] = algo;
    j["m"] = m.get_str();
    Decomposition d;
    std::vector<BigInt> terms;
    if (a.fam.generacci()) {
        if (algo != "greedy") throw UsageError("generacci decompositions use --algo greedy");
        const auto p = a.fam.params();
        auto t = generacci_covering(p, m);
        d = generacci_decompose(t, m);
        verify_round_trip(t, d.indices, m);
        for (auto i : d.indices) terms.push_back(t[i]);
        j["legal"] = is_generacci_legal(p, d.indices);
    } else {
        auto t = quilt_covering(m);
        if (algo == "greedy6") {
            d = greedy6(t, m);
            j["shape"] = shape_name(greedy6_shape(d.indices));
        } else {
            auto r = fq_greedy(t, m);
            d = r.decomposition;
            j["success"] = r.success;
        }
        verify_round_trip(t, d.indices, m);
        for (auto i : d.indices) terms.push_back(t[i]);
        j["legal"] = is_fq_legal(d.indices);
    }
    if (g.csv()) {
        csv_row(out, {"index", "term"});
        for (std::size_t i = 0; i < terms.size(); ++i) csv_row(out, {std::to_string(d.indices[i]), terms[i].get_str()});
        return;
    }
    j["indices"] = indices_json(d.indices);
    j["terms"] = strings(terms);
    j["summands"] = d.summands();
    out << j.dump(2) << '\n';
}

struct EnumerateCmd {
    FamilyArgs fam;
    std::string m;
};

void do_enumerate(const EnumerateCmd& a, const Global& g, std::ostream& out) {
    const BigInt m = parse_bigint(a.m);
    std::vector<Decomposition> all;
    if (a.fam.generacci()) {
        auto t = generacci_covering(a.fam.params(), m);
        all = enumerate_generacci(t, m);
        for (const auto& d : all) verify_round_trip(t, d.indices, m);
    } else {
        auto t = quilt_covering(m);
        all = enumerate_fq(t, m);
        for (const auto& d : all) verify_round_trip(t, d.indices, m);
    }
    std::size_t kmin = 0, kmax = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        kmin = i ? std::min(kmin, all[i].summands()) : all[i].summands();
        kmax = std::max(kmax, all[i].summands());
    }
    if (g.csv()) {
        csv_row(out, {"indices", "summands"});
        for (const auto& d : all) {
            std::string s;
            for (auto i : d.indices) s += (s.empty() ? "" : " ") + std::to_string(i);
            csv_row(out, {s, std::to_string(d.summands())});
        }
        return;
    }
    Json j;
    a.fam.describe(j);
    j["m"] = m.get_str();
    j["count"] = all.size();
    j["kmin"] = kmin;
    j["kmax"] = kmax;
    Json list = Json::array();
    for (const auto& d : all) list.push_back(indices_json(d.indices));
    j["decompositions"] = list;
    out << j.dump(2) << '\n';
}

struct CountCmd {
    FamilyArgs fam;
    std::size_t n = 20;
    bool closed_form = false;
    bool series = false;
};

void do_count(const CountCmd& a, const Global& g, std::ostream& out) {
    std::optional<GeneracciParams> p;
    if (a.fam.generacci()) p = a.fam.params();
    if (a.closed_form && !p) throw UsageError("--closed-form applies to the generacci family");
    auto t = p ? generacci_count_tables(*p, a.n) : fq_count_tables(a.n);

    std::size_t kmax = 1;
    for (std::size_t n = 0; n <= a.n; ++n) kmax = std::max({kmax, t.p_row(n).size(), t.q_row(n).size()});

    std::vector<std::vector<BigInt>> F, H;
    if (a.series) {
        F = series_coefficients(p ? GenFun::generacci_F : GenFun::fq_F, p, a.n, kmax);
        H = series_coefficients(p ? GenFun::generacci_H : GenFun::fq_H, p, a.n, kmax);
    }
    std::size_t closed_bad = 0, series_bad = 0;
    for (std::size_t n = 0; n <= a.n; ++n)
        for (std::size_t k = 0; k <= kmax; ++k) {
            if (a.closed_form && t.q(n, k) != pnk_closed_form(*p, static_cast<long>(n), static_cast<long>(k)))
                ++closed_bad;
            if (a.series && (F[n][k] != t.p(n, k) || H[n][k] != t.q(n, k))) ++series_bad;
        }

    if (g.csv()) {
        std::vector<std::string> head = {"n", "k", "p", "q"};
        if (a.closed_form) head.push_back("closed_form");
        if (a.series) head.insert(head.end(), {"series_p", "series_q"});
        csv_row(out, head);
        for (std::size_t n = 0; n <= a.n; ++n)
            for (std::size_t k = 0; k <= kmax; ++k) {
                std::vector<std::string> r = {std::to_string(n), std::to_string(k), t.p(n, k).get_str(),
                                              t.q(n, k).get_str()};
                if (a.closed_form) r.push_back(pnk_closed_form(*p, static_cast<long>(n), static_cast<long>(k)).get_str());
                if (a.series) r.insert(r.end(), {F[n][k].get_str(), H[n][k].get_str()});
                csv_row(out, r);
            }
        return;
    }
    Json j;
    a.fam.describe(j);
    j["n_max"] = a.n;
    Json pj = Json::array(), qj = Json::array();
    for (std::size_t n = 0; n <= a.n; ++n) {
        pj.push_back(strings(t.p_row(n)));
        qj.push_back(strings(t.q_row(n)));
    }
    j["p"] = pj;
    j["q"] = qj;
    if (a.closed_form) j["closed_form"] = {{"agrees", closed_bad == 0}, {"mismatches", closed_bad}};
    if (a.series) j["series"] = {{"agrees", series_bad == 0}, {"mismatches", series_bad}};
    out << j.dump(2) << '\n';
}

struct DaveCmd {
    std::size_t n = 100;
};

void do_dave(const DaveCmd& a, const Global& g, std::ostream& out) {
    if (a.n < 3) throw UsageError("--n must be at least 3");
    auto d = dfq_total(a.n);
    auto q = quilt_terms(a.n + 2);
    std::vector<Rational> ave;
    for (std::size_t n = 1; n <= a.n; ++n) {
        Rational r(d[n], q[n + 1]);
        r.canonicalize();
        ave.push_back(r);
    }
    if (g.csv()) {
        csv_row(out, {"n", "total", "q_next", "ave"});
        for (std::size_t n = 1; n <= a.n; ++n)
            csv_row(out, {std::to_string(n), d[n].get_str(), q[n + 1].get_str(), num(ave[n - 1].get_d())});
        return;
    }
    auto est = growth_rate_estimate(ave);
    Json rows = Json::array();
    for (std::size_t n = 1; n <= a.n; ++n)
        rows.push_back({{"n", n}, {"total", d[n].get_str()}, {"q_next", q[n + 1].get_str()}, {"ave", ave[n - 1].get_d()}});
    Json j;
    j["n"] = a.n;
    j["growth_ratio"] = est.ratio;
    j["fluctuation"] = est.fluctuation;
    j["rows"] = rows;
    out << j.dump(2) << '\n';
}

struct GreedyRateCmd {
    std::size_t n = 35;
    std::size_t from = 0;
};

void do_greedy_rate(const GreedyRateCmd& a, const Global& g, std::ostream& out) {
    const std::size_t lo = a.from ? a.from : a.n;
    if (lo > a.n) throw UsageError("--from exceeds --n");
    auto t = quilt_terms(a.n + 1);
    std::vector<std::pair<std::size_t, Rational>> rows;
    for (std::size_t n = lo; n <= a.n; ++n) rows.emplace_back(n, greedy_success_rate(t, n, g.workers()));
    if (g.csv()) {
        csv_row(out, {"n", "rate", "value"});
        for (const auto& [n, r] : rows) csv_row(out, {std::to_string(n), r.get_str(), num(r.get_d())});
        return;
    }
    Json rj = Json::array();
    for (const auto& [n, r] : rows) rj.push_back({{"n", n}, {"rate", r.get_str()}, {"value", r.get_d()}});
    Json j;
    j["rows"] = rj;
    if (rows.size() >= 2) j["last_step"] = std::abs(Rational(rows.back().second - rows[rows.size() - 2].second).get_d());
    out << j.dump(2) << '\n';
}

struct GapsCmd {
    int s = 0, b = 0;
    std::size_t n = 0;
    std::size_t g = 0;
    std::size_t gmax = 10;
};

void do_gaps(const GapsCmd& a, const Global& gl, std::ostream& out) {
    FamilyArgs fam{"generacci", a.s, a.b};
    const auto p = fam.params();
    const unsigned prec = precision_from_env();
    auto sd = dominant_root(Family::generacci, p, prec);
    std::vector<std::size_t> gs;
    if (a.g) gs.push_back(a.g);
    else
        for (std::size_t g = 1; g <= a.gmax; ++g) gs.push_back(g);

    std::optional<GapHistogram> h;
    if (a.n) h = bin_gap_histogram(generacci_bins(p, a.n), a.n);

    Real sum = 0;
    const Real tiny = pow(Real(10), -static_cast<int>(prec) - 5);
    for (long g = p.s + 1;; ++g) {
        const Real v = gap_law(p, g, sd);
        sum += v;
        if (v < tiny || g > 1'000'000) break;
    }

    if (gl.csv()) {
        csv_row(out, {"g", "pn", "p_limit"});
        for (auto g : gs)
            csv_row(out, {std::to_string(g), h ? num(h->fraction(g).get_d()) : "",
                          num(static_cast<double>(gap_law(p, static_cast<long>(g), sd)))});
        return;
    }
    Json rows = Json::array();
    for (auto g : gs) {
        Json r;
        r["g"] = g;
        if (h) {
            r["pn"] = h->fraction(g).get_d();
            r["pn_exact"] = h->fraction(g).get_str();
        } else {
            r["pn"] = nullptr;
        }
        r["p_limit"] = static_cast<double>(gap_law(p, static_cast<long>(g), sd));
        rows.push_back(r);
    }
    Json j;
    fam.describe(j);
    j["n"] = a.n ? Json(a.n) : Json(nullptr);
    j["lambda1"] = real_str(sd.lambda1, prec);
    j["rows"] = rows;
    j["limit_sum"] = real_str(sum, prec);
    out << j.dump(2) << '\n';
}

struct MomentsCmd {
    FamilyArgs fam;
    std::size_t n = 0;
    std::string scope = "interval";
};

void do_moments(const MomentsCmd& a, const Global& g, std::ostream& out) {
    std::vector<BigInt> hist;
    if (a.fam.generacci()) {
        const auto p = a.fam.params();
        auto t = generacci_count_tables(p, a.n);
        hist = a.scope == "interval" ? summand_histogram(generacci_interval(generacci_bins(p, a.n), a.n), t)
                                     : t.q_row(a.n);
    } else {
        auto t = fq_count_tables(a.n);
        hist = a.scope == "interval" ? summand_histogram(quilt_interval(quilt_terms(a.n + 2), a.n), t)
                                     : t.q_row(a.n);
    }
    if (g.csv()) {
        csv_row(out, {"k", "count"});
        for (std::size_t k = 0; k < hist.size(); ++k) csv_row(out, {std::to_string(k), hist[k].get_str()});
        return;
    }
    auto ms = moments_of(hist, a.n);
    BigInt total = 0;
    for (auto& v : hist) total += v;
    Json j;
    a.fam.describe(j);
    j["n"] = a.n;
    j["scope"] = a.scope;
    j["integers"] = total.get_str();
    j["mean"] = ms.mean.get_str();
    j["mean_value"] = ms.mean.get_d();
    j["variance"] = ms.variance.get_str();
    j["variance_value"] = ms.variance.get_d();
    try {
        auto nm = normality_metrics(hist);
        j["normality"] = {{"skewness", nm.skewness},
                          {"excess_kurtosis", nm.excess_kurtosis},
                          {"ks", nm.ks},
                          {"within_thresholds", within(nm)}};
    } catch (const Error& e) {
        if (e.code() != Errc::degenerate_distribution) throw;
        j["normality"] = nullptr;
    }
    j["histogram"] = strings(hist);
    out << j.dump(2) << '\n';
}

struct BlocksCmd {
    std::string system = "zeckendorf";
    std::string file;
    int s = 0, b = 0;
    std::size_t n = 0;
    std::size_t kappa_lo = 1, kappa_hi = 0;
    std::optional<double> kappa_C;
};

Json block_list(const std::vector<Block>& v) {
    Json a = Json::array();
    for (const auto& b : v) a.push_back(b.str());
    return a;
}

void do_blocks(const BlocksCmd& a, const Global& g, std::ostream& out) {
    BlockSystem sys;
    if (!a.file.empty()) sys = load_block_system(a.file);
    else if (a.system == "zeckendorf") sys = zeckendorf_system();
    else if (a.system == "plrs") sys = plrs_system();
    else sys = generacci_block_system(FamilyArgs{"generacci", a.s, a.b}.params());

    const auto diag = validate_block_system(sys);
    std::optional<ZnDistribution> z;
    if (a.n) z = zn_distribution(sys, a.n, std::nullopt, kOmegaEnumerationCap, g.workers());
    std::optional<KappaReport> rep;
    if (a.kappa_hi) {
        if (a.kappa_lo > a.kappa_hi) throw UsageError("--kappa-lo exceeds --kappa-hi");
        KappaOptions opt;
        opt.C = a.kappa_C;
        rep = kappa_bound_check(sys, a.kappa_lo, a.kappa_hi, opt);
    }

    if (g.csv()) {
        if (z) {
            csv_row(out, {"t", "p", "value"});
            for (const auto& [t, pr] : z->formula) csv_row(out, {std::to_string(t), pr.get_str(), num(pr.get_d())});
        } else if (rep) {
            csv_row(out, {"n", "var_Y", "var_K", "bound_holds"});
            for (const auto& r : rep->rows)
                csv_row(out, {std::to_string(r.n), r.var_Y.get_str(), num(r.var_K), r.bound_holds ? "true" : "false"});
        } else {
            csv_row(out, {"kind", "block", "size", "length"});
            for (const auto& b : sys.S) csv_row(out, {"S", b.str(), std::to_string(b.size()), std::to_string(b.length())});
            for (const auto& b : sys.T) csv_row(out, {"T", b.str(), std::to_string(b.size()), std::to_string(b.length())});
        }
        return;
    }
    Json j;
    j["system"] = sys.name;
    j["S"] = block_list(sys.S);
    j["T"] = block_list(sys.T);
    j["valid"] = diag.ok();
    j["diagnostics"] = {{"same_size_same_length", diag.same_size_same_length},
                        {"zero_block_is_shortest", diag.zero_block_is_shortest},
                        {"has_size_one", diag.has_size_one},
                        {"nonempty_blocks", diag.nonempty_blocks},
                        {"problems", diag.problems}};
    if (diag.ok()) {
        j["L_S"] = sys.L_S();
        j["L_T"] = sys.L_T();
    }
    if (z) {
        Json dist = Json::array();
        for (const auto& [t, pr] : z->formula) {
            Json r{{"t", t}, {"p", pr.get_str()}, {"value", pr.get_d()}};
            r["enumerated"] = z->enumerated_available ? Json(z->enumerated.at(t).get_str()) : Json(nullptr);
            r["h_form"] = z->formula_h ? Json(z->formula_h->at(t).get_str()) : Json(nullptr);
            dist.push_back(r);
        }
        const Rational p0 = z->formula.count(0) ? z->formula.at(0) : Rational(0);
        j["zn"] = {{"n", a.n},
                   {"omega_size", omega_size(sys, a.n).get_str()},
                   {"enumerated_available", z->enumerated_available},
                   {"counts_agree", z->counted == z->formula},
                   {"p0_at_least_one_over_S", p0 >= Rational(1, static_cast<unsigned long>(sys.S.size()))},
                   {"expected_length", z->expected_length.get_str()},
                   {"distribution", dist}};
    }
    if (rep) {
        Json rows = Json::array();
        for (const auto& r : rep->rows)
            rows.push_back({{"n", r.n}, {"var_Y", r.var_Y.get_str()}, {"var_K", r.var_K}, {"bound_holds", r.bound_holds}});
        j["kappa"] = {{"C", rep->fit.C},
                      {"d", rep->fit.d},
                      {"threshold", rep->threshold},
                      {"N", rep->N_found ? Json(rep->N) : Json(nullptr)},
                      {"N_hat", rep->N_hat},
                      {"j_lo", rep->j_lo},
                      {"sequence_hypotheses", rep->sequence_hypotheses},
                      {"kappa", rep->kappa},
                      {"passes", rep->passes},
                      {"rows", rows}};
    }
    out << j.dump(2) << '\n';
}

struct RootsCmd {
    FamilyArgs fam;
};

void do_roots(const RootsCmd& a, const Global& g, std::ostream& out) {
    const unsigned prec = precision_from_env();
    std::optional<GeneracciParams> p;
    if (a.fam.generacci()) p = a.fam.params();
    auto sd = dominant_root(p ? Family::generacci : Family::quilt, p, prec);
    std::vector<std::pair<std::string, std::string>> kv = {
        {"lambda1", real_str(sd.lambda1, prec)},
        {"residual", real_str(sd.residual, 6)},
        {"c1", real_str(sd.c1, prec)},
        {"dominant_count", std::to_string(sd.dominant_count)},
        {"lambda2_modulus", num(sd.lambda2_modulus)},
    };
    if (p) {
        auto gc = summand_growth_constants(*p, prec);
        kv.emplace_back("C", real_str(gc.C, prec));
        kv.emplace_back("Cprime", real_str(gc.Cprime, prec));
    }
    if (g.csv()) {
        csv_row(out, {"key", "value"});
        for (const auto& [k, v] : kv) csv_row(out, {k, v});
        return;
    }
    Json j;
    a.fam.describe(j);
    j["precision"] = prec;
    for (const auto& [k, v] : kv) {
        if (k == "dominant_count") j[k] = sd.dominant_count;
        else if (k == "lambda2_modulus") j[k] = sd.lambda2_modulus;
        else j[k] = v;
    }
    out << j.dump(2) << '\n';
}

struct KRangeCmd {
    std::size_t n = 20;
};

void do_krange(const KRangeCmd& a, const Global& g, std::ostream& out) {
    auto sv = krange_survey(quilt_terms(a.n + 2), a.n, g.workers());
    if (g.csv()) {
        csv_row(out, {"difference", "count"});
        for (const auto& [d, c] : sv.by_difference) csv_row(out, {std::to_string(d), c.get_str()});
        return;
    }
    Json by = Json::array();
    for (const auto& [d, c] : sv.by_difference) by.push_back({{"difference", d}, {"count", c.get_str()}});
    Json j;
    j["n"] = a.n;
    j["integers"] = sv.integers.get_str();
    j["fraction_positive"] = sv.fraction_positive.get_str();
    j["fraction_positive_value"] = sv.fraction_positive.get_d();
    j["by_difference"] = by;
    out << j.dump(2) << '\n';
}

int do_selftest(const Global& g, std::ostream& out) {
    bool all = true;
    Json list = Json::array();
    if (g.csv()) csv_row(out, {"id", "title", "pass", "detail"});
    for (const auto& c : checks::criteria()) {
        if (!c.fast) continue;
        auto o = checks::run_criterion(c, g.workers());
        all = all && o.pass;
        // timings stay out of the output so runs compare byte for byte
        std::string detail = o.detail;
        if (o.seconds > o.budget_seconds) detail += "; over the time budget";
        if (g.csv()) csv_row(out, {std::to_string(o.id), o.title, o.pass ? "PASS" : "FAIL", detail});
        else list.push_back({{"id", o.id}, {"title", o.title}, {"pass", o.pass}, {"detail", detail}});
    }
    if (!g.csv()) out << Json{{"selftest", list}, {"all_pass", all}}.dump(2) << '\n';
    return all ? kOk : kComputeError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generacci and Fibonacci Quilt toolkit", "generacci"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    Global g;
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--jobs", g.jobs, "worker threads for interval scans, 0 for all cores");
    app.add_flag("--selftest", g.selftest, "run the fast acceptance checks");

    std::function<void(std::ostream&)> action;
    const auto positive = CLI::PositiveNumber;

    TermsCmd gen_a;
    gen_a.fam.family = "generacci";
    auto* gen = app.add_subcommand("gen", "Generacci sequence terms");
    gen->add_option("--s", gen_a.fam.s)->required();
    gen->add_option("--b", gen_a.fam.b)->required();
    gen->add_option("--count", gen_a.count)->check(positive);
    gen->add_option("--method", gen_a.method)->check(CLI::IsMember({"recurrence", "definition"}));
    gen->callback([&] { action = [&](std::ostream& o) { do_terms(gen_a, g, o); }; });

    TermsCmd quilt_a;
    quilt_a.count = 21;
    auto* quilt = app.add_subcommand("quilt", "Fibonacci Quilt terms");
    quilt->add_option("--count", quilt_a.count)->check(positive);
    quilt->add_option("--method", quilt_a.method)->check(CLI::IsMember({"recurrence", "definition"}));
    quilt->callback([&] { action = [&](std::ostream& o) { do_terms(quilt_a, g, o); }; });

    DecomposeCmd dec_a;
    auto* dec = app.add_subcommand("decompose", "decompose one integer");
    dec_a.fam.add(dec, "quilt");
    dec->add_option("--algo", dec_a.algo)->check(CLI::IsMember({"greedy", "greedy6"}));
    dec->add_option("m", dec_a.m)->required();
    dec->callback([&] { action = [&](std::ostream& o) { do_decompose(dec_a, g, o); }; });

    EnumerateCmd en_a;
    auto* en = app.add_subcommand("enumerate", "every legal decomposition of m");
    en_a.fam.add(en, "quilt");
    en->add_option("m", en_a.m)->required();
    en->callback([&] { action = [&](std::ostream& o) { do_enumerate(en_a, g, o); }; });

    CountCmd cnt_a;
    auto* cnt = app.add_subcommand("count", "p(n,k) and q(n,k) tables");
    cnt_a.fam.add(cnt, "quilt");
    cnt->add_option("--n", cnt_a.n, "largest n");
    cnt->add_flag("--closed-form", cnt_a.closed_form, "compare q with b^k C(n-s(k-1),k)");
    cnt->add_flag("--series", cnt_a.series, "compare with generating-function coefficients");
    cnt->callback([&] { action = [&](std::ostream& o) { do_count(cnt_a, g, o); }; });

    DaveCmd dave_a;
    auto* dave = app.add_subcommand("dave", "average number of quilt decompositions");
    dave->add_option("--n", dave_a.n);
    dave->callback([&] { action = [&](std::ostream& o) { do_dave(dave_a, g, o); }; });

    GreedyRateCmd gr_a;
    auto* gr = app.add_subcommand("greedy-rate", "share of m < q_n where plain greedy is legal");
    gr->add_option("--n", gr_a.n)->check(CLI::Range(2, 60));
    gr->add_option("--from", gr_a.from)->check(CLI::Range(2, 60));
    gr->callback([&] { action = [&](std::ostream& o) { do_greedy_rate(gr_a, g, o); }; });

    GapsCmd gaps_a;
    auto* gaps = app.add_subcommand("gaps", "bin-gap law, exact and limiting");
    gaps->add_option("--s", gaps_a.s)->required();
    gaps->add_option("--b", gaps_a.b)->required();
    gaps->add_option("--n", gaps_a.n, "exact P_n(g) on the n-th interval");
    gaps->add_option("--g", gaps_a.g, "single gap")->check(positive);
    gaps->add_option("--gmax", gaps_a.gmax)->check(positive);
    gaps->callback([&] { action = [&](std::ostream& o) { do_gaps(gaps_a, g, o); }; });

    MomentsCmd mom_a;
    auto* mom = app.add_subcommand("moments", "summand-count mean, variance and normality");
    mom_a.fam.add(mom, "quilt");
    mom->add_option("--n", mom_a.n)->required();
    mom->add_option("--scope", mom_a.scope)->check(CLI::IsMember({"interval", "cumulative"}));
    mom->callback([&] { action = [&](std::ostream& o) { do_moments(mom_a, g, o); }; });

    BlocksCmd blk_a;
    auto* blk = app.add_subcommand("blocks", "block systems: validation, Z_n, kappa");
    blk->add_option("--system", blk_a.system)->check(CLI::IsMember({"zeckendorf", "plrs", "generacci"}));
    blk->add_option("--file", blk_a.file, "block system file")->check(CLI::ExistingFile);
    blk->add_option("--s", blk_a.s);
    blk->add_option("--b", blk_a.b);
    blk->add_option("--n", blk_a.n, "Z_n distribution");
    blk->add_option("--kappa-lo", blk_a.kappa_lo)->check(positive);
    blk->add_option("--kappa-hi", blk_a.kappa_hi, "run the Var(Y_n) >= kappa n check up to here");
    blk->add_option("--kappa-C", blk_a.kappa_C, "use this slope instead of the fitted one");
    blk->callback([&] { action = [&](std::ostream& o) { do_blocks(blk_a, g, o); }; });

    RootsCmd roots_a;
    auto* roots = app.add_subcommand("roots", "dominant root and growth constants");
    roots_a.fam.add(roots, "generacci");
    roots->callback([&] { action = [&](std::ostream& o) { do_roots(roots_a, g, o); }; });

    KRangeCmd kr_a;
    auto* kr = app.add_subcommand("krange", "kmax - kmin over [q_n, q_{n+1})");
    kr->add_option("--n", kr_a.n)->check(positive);
    kr->callback([&] { action = [&](std::ostream& o) { do_krange(kr_a, g, o); }; });

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }

    std::ostringstream buf;
    try {
        if (g.selftest) {
            if (action) throw UsageError("--selftest takes no subcommand");
            const int rc = do_selftest(g, buf);
            out << buf.str();
            return rc;
        }
        if (!action) throw UsageError("a subcommand is required; see --help");
        action(buf);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kComputeError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kComputeError;
    }
    out << buf.str();
    return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace generacci::cli
