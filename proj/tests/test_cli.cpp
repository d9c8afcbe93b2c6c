#include "checks.hpp"
#include "cli.hpp"

#include "generacci/decompose.hpp"
#include "generacci/sequences.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <random>
#include <sstream>

using namespace generacci;
using Json = nlohmann::json;

namespace {

struct Result {
    int rc;
    std::string out, err;
};

Result call(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int rc = cli::run(args, out, err);
    return {rc, out.str(), err.str()};
}

Json call_json(const std::vector<std::string>& args) {
    auto r = call(args);
    EXPECT_EQ(r.rc, 0) << r.err;
    return Json::parse(r.out);
}

}  // namespace

TEST(Cli, QuiltFigure) {
    auto j = call_json({"quilt", "--count", "21"});
    const std::vector<std::string> want = {"1",  "2",  "3",  "4",   "5",   "7",   "9",   "12",  "16",  "21", "28",
                                           "37", "49", "65", "86", "114", "151", "200", "265", "351", "465"};
    EXPECT_EQ(j.at("terms").get<std::vector<std::string>>(), want);
    auto d = call_json({"quilt", "--count", "12", "--method", "definition"});
    EXPECT_EQ(d.at("terms").get<std::vector<std::string>>(),
              std::vector<std::string>(want.begin(), want.begin() + 12));
}

TEST(Cli, GreedySixOfSix) {
    auto j = call_json({"decompose", "--family", "quilt", "--algo", "greedy6", "6"});
    EXPECT_EQ(j.at("indices"), Json::array({4, 2}));
    EXPECT_EQ(j.at("terms"), Json::array({"4", "2"}));
    EXPECT_EQ(j.at("shape"), "tail42");
    EXPECT_TRUE(j.at("legal").get<bool>());
    auto g = call_json({"decompose", "--algo", "greedy", "6"});
    EXPECT_EQ(g.at("indices"), Json::array({5, 1}));
    EXPECT_FALSE(g.at("success").get<bool>());
}

TEST(Cli, GapLimitValue) {
    auto j = call_json({"gaps", "--s", "1", "--b", "2", "--g", "2"});
    ASSERT_EQ(j.at("rows").size(), 1u);
    EXPECT_EQ(j["rows"][0].at("p_limit").get<double>(), 0.5);
    EXPECT_TRUE(j["rows"][0].at("pn").is_null());
    EXPECT_EQ(j.at("lambda1").get<std::string>().substr(0, 12), "1.4142135623");

    auto csv = call({"gaps", "--s", "1", "--b", "2", "--n", "10", "--gmax", "4", "--format", "csv"});
    ASSERT_EQ(csv.rc, 0);
    std::istringstream in(csv.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "g,pn,p_limit");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
}

TEST(Cli, DecomposeRoundTripsAndBigIntegers) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 40; ++i) {
        const std::string m = std::to_string(rng() % 1'000'000'000ULL);
        for (const std::vector<std::string>& fam :
             {std::vector<std::string>{"--family", "quilt"}, {"--family", "generacci", "--s", "2", "--b", "3"}}) {
            std::vector<std::string> args = {"decompose"};
            args.insert(args.end(), fam.begin(), fam.end());
            args.push_back(m);
            auto j = call_json(args);
            BigInt sum = 0;
            for (const auto& t : j.at("terms")) sum += BigInt(t.get<std::string>());
            EXPECT_EQ(sum, BigInt(m));
            EXPECT_TRUE(j.at("legal").get<bool>());
        }
    }
    const std::string big = "123456789012345678901234567890";
    auto j = call_json({"decompose", "--family", "generacci", "--s", "1", "--b", "1", big});
    EXPECT_EQ(j.at("m"), big);
    auto g = call_json({"gen", "--s", "1", "--b", "1", "--count", "100"});
    EXPECT_EQ(g.at("terms").back(), "573147844013817084101");  // F_101
}

TEST(Cli, EnumerateMatchesCount) {
    auto q = quilt_terms(40);
    for (long m : {6L, 37L, 200L, 1000L}) {
        auto j = call_json({"enumerate", std::to_string(m)});
        EXPECT_EQ(BigInt(j.at("count").get<long>()), count_fq(q, m)) << m;
        auto r = kmin_kmax(q, m);
        EXPECT_EQ(j.at("kmin").get<std::size_t>(), r.kmin);
        EXPECT_EQ(j.at("kmax").get<std::size_t>(), r.kmax);
    }
}

TEST(Cli, CountChecks) {
    auto j = call_json({"count", "--family", "generacci", "--s", "2", "--b", "2", "--n", "25", "--closed-form", "--series"});
    EXPECT_TRUE(j["closed_form"].at("agrees").get<bool>());
    EXPECT_TRUE(j["series"].at("agrees").get<bool>());
    EXPECT_EQ(j.at("p").size(), 26u);
    auto f = call_json({"count", "--n", "20", "--series"});
    EXPECT_TRUE(f["series"].at("agrees").get<bool>());
    EXPECT_EQ(call({"count", "--closed-form"}).rc, cli::kUsageError);
}

TEST(Cli, MomentsAndHistogramCsv) {
    auto j = call_json({"moments", "--family", "generacci", "--s", "1", "--b", "2", "--n", "30"});
    EXPECT_FALSE(j.at("normality").is_null());
    EXPECT_EQ(j.at("scope"), "interval");
    auto r = call({"moments", "--n", "20", "--format", "csv"});
    ASSERT_EQ(r.rc, 0);
    EXPECT_EQ(r.out.substr(0, 8), "k,count\n");
    auto deg = call_json({"moments", "--n", "1"});
    EXPECT_TRUE(deg.at("normality").is_null());
}

TEST(Cli, BlocksAndRoots) {
    auto z = call_json({"blocks", "--n", "12", "--kappa-hi", "30"});
    EXPECT_TRUE(z.at("valid").get<bool>());
    EXPECT_TRUE(z["zn"].at("p0_at_least_one_over_S").get<bool>());
    EXPECT_TRUE(z["kappa"].at("passes").get<bool>());
    EXPECT_EQ(z["kappa"].at("rows").size(), 30u);
    auto f = call_json({"blocks", "--file", std::string(GENERACCI_DATA_DIR) + "/blocks/plrs.txt", "--n", "10"});
    EXPECT_TRUE(f.at("valid").get<bool>());
    auto g = call_json({"blocks", "--system", "generacci", "--s", "1", "--b", "3"});
    EXPECT_TRUE(g.at("valid").get<bool>());

    auto q = call_json({"roots", "--family", "quilt"});
    EXPECT_EQ(q.at("lambda1").get<std::string>().substr(0, 7), "1.32471");
    EXPECT_FALSE(q.contains("C"));
    auto r = call_json({"roots", "--s", "1", "--b", "1"});
    EXPECT_EQ(r.at("lambda1").get<std::string>().substr(0, 12), "1.6180339887");
    EXPECT_TRUE(r.contains("Cprime"));
}

TEST(Cli, DaveGreedyAndKRange) {
    auto d = call_json({"dave", "--n", "100"});
    EXPECT_NEAR(d.at("growth_ratio").get<double>(), 1.05459, 1e-3);
    auto g = call_json({"greedy-rate", "--n", "12", "--from", "10"});
    EXPECT_EQ(g.at("rows").size(), 3u);
    auto k1 = call({"krange", "--n", "18", "--jobs", "1"});
    auto k4 = call({"krange", "--n", "18", "--jobs", "4"});
    EXPECT_EQ(k1.out, k4.out);
}

TEST(Cli, IdenticalInvocationsIdenticalOutput) {
    for (const std::vector<std::string>& a :
         {std::vector<std::string>{"roots", "--s", "2", "--b", "3"}, {"gaps", "--s", "2", "--b", "1", "--n", "15"},
          {"count", "--n", "12", "--format", "csv"}, {"greedy-rate", "--n", "15", "--jobs", "3"}}) {
        auto a1 = call(a), a2 = call(a);
        EXPECT_EQ(a1.rc, 0);
        EXPECT_EQ(a1.out, a2.out);
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(call({}).rc, cli::kUsageError);
    EXPECT_EQ(call({"frobnicate"}).rc, cli::kUsageError);
    EXPECT_EQ(call({"quilt", "--bogus"}).rc, cli::kUsageError);
    EXPECT_EQ(call({"quilt", "--format", "xml"}).rc, cli::kUsageError);
    EXPECT_EQ(call({"gen", "--s", "1"}).rc, cli::kUsageError);
    EXPECT_EQ(call({"gen", "--s", "0", "--b", "1"}).rc, cli::kUsageError);
    EXPECT_EQ(call({"decompose", "--family", "generacci", "5"}).rc, cli::kUsageError);
    EXPECT_EQ(call({"decompose", "twelve"}).rc, cli::kUsageError);
    EXPECT_EQ(call({"decompose", "--family", "generacci", "--s", "1", "--b", "1", "--algo", "greedy6", "5"}).rc,
              cli::kUsageError);
    EXPECT_EQ(call({"--selftest", "quilt"}).rc, cli::kUsageError);
    auto e = call({"blocks", "--n", "1"});  // too short for the block structure
    EXPECT_EQ(e.rc, cli::kComputeError);
    EXPECT_TRUE(e.out.empty());
    EXPECT_FALSE(e.err.empty());
    EXPECT_EQ(call({"--help"}).rc, 0);
}

TEST(Cli, PrecisionFromEnvironment) {
    ::setenv("GENERACCI_PRECISION", "20", 1);
    auto j = call_json({"roots", "--s", "1", "--b", "2"});
    EXPECT_EQ(j.at("precision"), 20);
    EXPECT_EQ(j.at("lambda1").get<std::string>(), "1.4142135623730950488");
    ::setenv("GENERACCI_PRECISION", "5", 1);
    EXPECT_EQ(call({"roots"}).rc, cli::kUsageError);
    ::setenv("GENERACCI_PRECISION", "abc", 1);
    EXPECT_EQ(call({"roots"}).rc, cli::kUsageError);
    ::unsetenv("GENERACCI_PRECISION");
    EXPECT_EQ(call_json({"roots", "--s", "1", "--b", "2"}).at("precision"), 50);
}

TEST(Cli, SelftestReportsTheFastCriteria) {
    auto r = call({"--selftest"});
    auto j = Json::parse(r.out);
    std::vector<int> ids, want;
    bool all = true;
    for (const auto& e : j.at("selftest")) {
        ids.push_back(e.at("id").get<int>());
        all = all && e.at("pass").get<bool>();
    }
    for (const auto& c : checks::criteria())
        if (c.fast) want.push_back(c.id);
    EXPECT_EQ(ids, want);
    EXPECT_EQ(j.at("all_pass").get<bool>(), all);
    EXPECT_EQ(r.rc, all ? 0 : 1);
}
