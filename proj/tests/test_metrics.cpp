#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "toc/error.hpp"
#include "toc/metrics.hpp"

#include "support/lcs_oracle.hpp"

using namespace toc;

using namespace lcs_oracle;

namespace {

constexpr auto D = DisclosureStatus::Disclosed;
constexpr auto P = DisclosureStatus::PartiallyDisclosed;
constexpr auto ND = DisclosureStatus::NotDisclosed;

}  // namespace

TEST(RougeL, HandExamples) {
    EXPECT_DOUBLE_EQ(rouge_l("a b c", "a c"), 0.8);
    EXPECT_EQ(rouge_l("same words here", "same words here"), 1.0);
    EXPECT_EQ(rouge_l("", "a"), 0.0);
    EXPECT_EQ(rouge_l("a", ""), 0.0);
    EXPECT_EQ(rouge_l("A  B", "a b"), 1.0);
}

TEST(RougeL, ExhaustiveAgainstSubsequenceOracle) {
    ASSERT_EQ(all_strings().size(), 9841u);
    const auto sweep = sweep_rouge_l();
    EXPECT_EQ(sweep.mismatches, 0);
    EXPECT_GT(sweep.pairs, 16'000'000);
}

TEST(RougeL, OracleOnHandPairs) {
    const auto strings = all_strings();
    const SubsequenceOracle o(strings);
    auto at = [&](std::vector<int> s) {
        return static_cast<std::size_t>(std::find(strings.begin(), strings.end(), s) - strings.begin());
    };
    EXPECT_EQ(o.lcs(at({0, 1, 2}), at({0, 2})), 2u);
    EXPECT_EQ(o.lcs(at({0, 1, 2}), at({2, 1, 0})), 1u);
    EXPECT_EQ(o.lcs(at({0, 1, 2}), at({0, 0, 1, 1})), 2u);
    EXPECT_EQ(o.lcs(at({}), at({0, 1, 2})), 0u);
    EXPECT_EQ(o.lcs(at({0, 0, 1, 1}), at({0, 0, 1, 1})), 4u);
    EXPECT_EQ(o.lcs(at({0, 1, 0, 1, 0, 1, 0, 1}), at({1, 0, 1, 0, 1, 0, 1, 0})), 7u);
}

TEST(RougeL, RenamingInvariance) {
    const auto strings = all_strings();
    std::mt19937_64 rng(3);
    const std::vector<std::array<int, 3>> perms{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    for (int i = 0; i < 50000; ++i) {
        const auto& a = strings[rng() % strings.size()];
        const auto& b = strings[rng() % strings.size()];
        const double ref = rouge_l(render(a), render(b));
        for (const auto& p : perms) {
            auto ra = a;
            auto rb = b;
            for (auto& t : ra) t = p[static_cast<std::size_t>(t)];
            for (auto& t : rb) t = p[static_cast<std::size_t>(t)];
            ASSERT_EQ(rouge_l(render(ra), render(rb)), ref);
        }
        ASSERT_NEAR(rouge_l(render(a), render(b)), rouge_l(render(b), render(a)), 1e-15);
    }
}

TEST(CoverageF1, HandExamples) {
    EXPECT_DOUBLE_EQ(coverage_f1({D, ND, D}, {true, true, false}), 0.5);
    EXPECT_EQ(coverage_f1({D, P, ND}, {true, true, false}), 1.0);
    EXPECT_EQ(coverage_f1({ND, ND}, {false, false}), 0.0);
    EXPECT_THROW(coverage_f1({D}, {true, false}), Error);
}

TEST(CoverageF1, ExhaustiveThreeElementCombinations) {
    const DisclosureStatus statuses[] = {D, P, ND};
    int combos = 0;
    for (int g = 0; g < 8; ++g) {
        for (int code = 0; code < 27; ++code) {
            std::vector<bool> gold;
            std::vector<DisclosureStatus> pred;
            int tp = 0, fp = 0, fn = 0;
            for (int i = 0, x = code; i < 3; ++i, x /= 3) {
                const bool gi = (g >> i) & 1;
                const auto pi = statuses[x % 3];
                gold.push_back(gi);
                pred.push_back(pi);
                const bool positive = pi != ND;
                tp += positive && gi;
                fp += positive && !gi;
                fn += !positive && gi;
            }
            const double expected = tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
            EXPECT_NEAR(coverage_f1(pred, gold), expected, 1e-15) << g << "/" << code;
            ++combos;
        }
    }
    EXPECT_EQ(combos, 216);
}

TEST(DeltaCoverage, Subtraction) {
    EXPECT_NEAR(delta_coverage(0.2, 0.6), 0.4, 1e-15);
    EXPECT_EQ(delta_coverage(0.3, 0.3), 0.0);
    EXPECT_NEAR(delta_coverage(0.6, 0.2), -0.4, 1e-15);
}

TEST(Bleu, FrozenFixtureValue) {
    std::ifstream in(std::string(TOC_FIXTURES) + "/bleu_cases.json");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto doc = nlohmann::json::parse(ss.str());
    for (const auto& c : doc["cases"]) {
        const auto cand = c["candidate"].get<std::string>();
        const auto ref = c["reference"].get<std::string>();
        const double got = bleu(cand, ref);
        EXPECT_NEAR(got, c["bleu"].get<double>(), 1e-6);
        // Same pair without smoothing, over the orders that do match.
        const auto m = c["matches"].get<std::vector<double>>();
        const auto t = c["totals"].get<std::vector<double>>();
        const double bp = std::exp(1.0 - 9.0 / 7.0);
        const double unsmoothed = bp * std::cbrt(m[0] / t[0] * m[1] / t[1] * m[2] / t[2]);
        EXPECT_LT(got, unsmoothed);
        EXPECT_GT(got, 0.0);
    }
}

TEST(Bleu, Degenerate) {
    EXPECT_NEAR(bleu("one two three four five", "one two three four five"), 1.0, 1e-12);
    EXPECT_EQ(bleu("", "a b c d"), 0.0);
    EXPECT_EQ(bleu("p q r s", "a b c d"), 0.0);
}

TEST(ChainEntropy, HandValues) {
    auto chains = [](std::vector<DisclosureStatus> ss) {
        std::vector<ReasoningChain> out;
        for (auto s : ss) {
            ReasoningChain c;
            c.status = s;
            out.push_back(c);
        }
        return out;
    };
    EXPECT_EQ(chain_entropy(chains({D, D, D})), 0.0);
    EXPECT_NEAR(chain_entropy(chains({D, P, ND})), std::log(3.0), 1e-12);
    EXPECT_NEAR(chain_entropy(chains({D, P, ND})), 1.0986123, 1e-6);
    EXPECT_NEAR(chain_entropy(chains({D, D, ND})), -(2.0 / 3 * std::log(2.0 / 3) + 1.0 / 3 * std::log(1.0 / 3)), 1e-12);
    EXPECT_NEAR(chain_entropy(chains({D, D, ND})), 0.6365142, 1e-6);
    EXPECT_EQ(chain_entropy({}), 0.0);
}

TEST(JsonCompleteness, Counts) {
    const std::string good = R"({"modified_text": "x", "reasoning": "y", "confidence": 0.5})";
    std::vector<std::string> rs(9, good);
    rs.push_back("nope");
    EXPECT_DOUBLE_EQ(json_completeness(rs, AgentSchema::ApplyOperation), 0.9);
    EXPECT_EQ(json_completeness({good}, AgentSchema::ApplyOperation), 1.0);
    EXPECT_EQ(json_completeness({}, AgentSchema::ApplyOperation), 1.0);
}
