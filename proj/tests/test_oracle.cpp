#include <gtest/gtest.h>

#include "support/suites.hpp"

using namespace toc;

TEST(Enumerator, ReplaysToItsOwnReward) {
    SyntheticSpec spec;
    spec.max_elements = 3;
    spec.min_disclosed = 1;
    const auto rec = generate_synthetic(3, 1, spec).front();
    MockOptions mo;
    mo.noise = 0.0;
    oracle::Enumerator en(rec, mo);
    const auto opt = en.solve(3);
    ASSERT_GT(opt.states, 1);
    Claim c = rec.claim;
    for (const auto& a : opt.path) c = apply_action(c, a);
    EXPECT_EQ(c.raw_text, opt.claim);
    EXPECT_TRUE(validate_sequence(opt.path, default_precedence_rules()).empty());
    EXPECT_DOUBLE_EQ(en.reward_of(c, opt.path, en.chains_of(c)), opt.reward);
    // The empty sequence is always enumerated.
    EXPECT_GE(opt.reward, en.reward_of(rec.claim, {}, en.chains_of(rec.claim)));
}

TEST(Enumerator, LengthZeroIsTheOriginal) {
    const auto rec = generate_synthetic(3, 1).front();
    oracle::Enumerator en(rec, MockOptions{});
    const auto opt = en.solve(0);
    EXPECT_EQ(opt.states, 1);
    EXPECT_EQ(opt.claim, rec.claim.raw_text);
    EXPECT_TRUE(opt.path.empty());
}

TEST(Enumerator, LongerBoundNeverLowersTheOptimum) {
    SyntheticSpec spec;
    spec.max_elements = 4;
    spec.min_disclosed = 1;
    spec.max_disclosed = 2;
    const auto recs = generate_synthetic(9, 5, spec);
    for (const auto& rec : recs) {
        oracle::Enumerator en(rec, MockOptions{});
        double prev = -1e300;
        for (int len = 0; len <= 3; ++len) {
            const double r = en.solve(len).reward;
            EXPECT_GE(r, prev);
            prev = r;
        }
    }
}

TEST(OracleSuite, SearchMatchesExhaustiveOptimum) {
    const auto s = suites::run_oracle_suite();
    ASSERT_EQ(s.cases.size(), 50u);
    for (const auto& c : s.cases) {
        EXPECT_LE(c.branching, 3u) << c.record_id;
        EXPECT_GE(c.optimum_len, 1u) << c.record_id;
        if (!c.hit)
            std::cout << "miss " << c.record_id << ": optimum " << c.optimum << ", search " << c.found << " after "
                      << c.iterations << " iterations\n";
    }
    EXPECT_GE(s.hits, 48) << s.hits << "/50";  // at least 95%
    EXPECT_EQ(s.widening_violations, 0);
    EXPECT_EQ(s.conservation_violations, 0);
    EXPECT_GT(s.iterations_checked, 0);
    EXPECT_LT(s.seconds, 60.0);
}
