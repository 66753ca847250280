#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "toc/corpus.hpp"
#include "toc/error.hpp"
#include "toc/metrics.hpp"
#include "toc/mock_backend.hpp"

using namespace toc;

namespace {

const std::string kFixtures = TOC_FIXTURES;

std::string with_records(const std::string& records) { return R"({"records": [)" + records + "]}"; }

const std::string kRecord = R"({
  "claim": {"claim_id": "c1", "raw_text": "A lamp, comprising: a base; a shade.", "elements": []},
  "prior_art": [{"doc_id": "D1", "title": "t", "description": "A lamp has a base.", "figure_refs": []}],
  "gold_labels": [{"element_id": "e2", "disclosed": true, "evidence": "A lamp has a base.", "justification": "same"}]
})";

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InternalInvariant;
}

}  // namespace

TEST(Load, CaseStudyFixture) {
    const auto recs = load_corpus(kFixtures + "/case_study.json");
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].claim.claim_id, "case-study");
    EXPECT_EQ(recs[0].claim.elements.size(), 2u);
    ASSERT_EQ(recs[0].prior_art.size(), 1u);
    EXPECT_EQ(recs[0].prior_art[0].figure_refs, std::vector<std::string>{"FIG. 1"});
    EXPECT_FALSE(recs[0].gold_labels);
}

TEST(Load, EmptyRecordsAndGoldLabels) {
    EXPECT_TRUE(parse_corpus(with_records("")).empty());
    const auto recs = parse_corpus(with_records(kRecord));
    ASSERT_EQ(recs.size(), 1u);
    ASSERT_TRUE(recs[0].gold_labels);
    EXPECT_EQ(recs[0].gold_labels->front().element.element_id, "e2");
    EXPECT_TRUE(recs[0].gold_labels->front().disclosed);
}

TEST(Load, UnknownGoldElementNamesTheRecord) {
    auto bad = kRecord;
    bad.replace(bad.find("\"e2\""), 4, "\"e99\"");
    try {
        parse_corpus(with_records(kRecord + "," + bad));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LoadError);
        EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("e99"), std::string::npos) << e.what();
    }
}

TEST(Load, SchemaViolations) {
    EXPECT_EQ(code_of([] { parse_corpus(with_records(kRecord + "," + kRecord)); }), ErrorCode::LoadError);  // duplicate id
    EXPECT_EQ(code_of([] { parse_corpus("{}"); }), ErrorCode::LoadError);
    EXPECT_EQ(code_of([] { parse_corpus("not json"); }), ErrorCode::LoadError);
    auto no_text = kRecord;
    no_text.replace(no_text.find("\"raw_text\""), 10, "\"rawtext\"");
    EXPECT_EQ(code_of([&] { parse_corpus(with_records(no_text)); }), ErrorCode::LoadError);
    auto dup_doc = kRecord;
    dup_doc.replace(dup_doc.find("\"figure_refs\": []}]"), 19,
                    R"("figure_refs": []}, {"doc_id": "D1", "title": "u", "description": "x.", "figure_refs": []}])");
    EXPECT_EQ(code_of([&] { parse_corpus(with_records(dup_doc)); }), ErrorCode::LoadError);
    EXPECT_EQ(code_of([] { load_corpus("/nonexistent/corpus.json"); }), ErrorCode::LoadError);
}

TEST(Load, UnknownKeysStrictVersusLenient) {
    auto extra = kRecord;
    extra.replace(extra.find("\"prior_art\""), 11, R"("notes": "x", "prior_art")");
    EXPECT_EQ(code_of([&] { parse_corpus(with_records(extra)); }), ErrorCode::LoadError);
    std::vector<std::string> warnings;
    const auto recs = parse_corpus(with_records(extra), {false, &warnings});
    EXPECT_EQ(recs.size(), 1u);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("notes"), std::string::npos);
}

TEST(Load, SaveLoadSaveIsByteIdentical) {
    const auto dir = std::filesystem::temp_directory_path() / "toc_corpus_rt";
    std::filesystem::create_directories(dir);
    auto recs = generate_synthetic(42, 6);
    const auto extra = parse_corpus(with_records(kRecord));
    recs.insert(recs.end(), extra.begin(), extra.end());
    save_corpus(dir / "a.json", recs);
    const auto back = load_corpus(dir / "a.json");
    save_corpus(dir / "b.json", back);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
    EXPECT_EQ(dump_corpus(back), dump_corpus(recs));
    std::filesystem::remove_all(dir);
}

// --- evidence filtering -------------------------------------------------------------------

TEST(Evidence, SelfSimilarityRanksFirst) {
    const PriorArtDocument doc{"D1", "t", "A camera captures an input image. A memory stores pixels.", {}};
    const auto ev = filter_evidence({"e2", "element", "A memory stores pixels"}, doc, 1);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_EQ(ev[0].sentence, "A memory stores pixels.");
    EXPECT_NEAR(ev[0].score, 1.0, 1e-12);
}

TEST(Evidence, DisjointKeepsPositionOrder) {
    const PriorArtDocument doc{"D1", "t", "Red apples grow. Green pears fall. Blue plums rot.", {}};
    const auto ev = filter_evidence({"e2", "element", "a turbine blade"}, doc, 2);
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_EQ(ev[0].sentence, "Red apples grow.");
    EXPECT_EQ(ev[1].sentence, "Green pears fall.");
    EXPECT_EQ(ev[0].score, 0.0);
    EXPECT_EQ(ev[1].score, 0.0);
}

TEST(Evidence, HandCosinesPickFirstAndThird) {
    // Element {alpha, beta}. Term-frequency cosines by hand:
    //   s1 {alpha, beta, gamma}:                        2 / (sqrt2 * sqrt3) = 0.816
    //   s2 {alpha, delta, epsilon, zeta, eta, theta}:    1 / (sqrt2 * sqrt6) = 0.289
    //   s3 {alpha, beta, gamma, delta, epsilon, zeta}:   2 / (sqrt2 * sqrt6) = 0.577
    const PriorArtDocument doc{"D1", "t",
                               "Alpha beta gamma. Alpha delta epsilon zeta eta theta. Alpha beta gamma delta epsilon zeta.",
                               {}};
    const auto ev = filter_evidence({"e2", "element", "alpha beta"}, doc, 2);
    ASSERT_EQ(ev.size(), 2u);
    EXPECT_EQ(ev[0].sentence, "Alpha beta gamma.");
    EXPECT_EQ(ev[1].sentence, "Alpha beta gamma delta epsilon zeta.");
    EXPECT_NEAR(ev[0].score, 2.0 / (std::sqrt(2.0) * std::sqrt(3.0)), 1e-12);
    EXPECT_NEAR(ev[1].score, 2.0 / (std::sqrt(2.0) * std::sqrt(6.0)), 1e-12);
    EXPECT_NEAR(tf_cosine("alpha beta", "Alpha delta epsilon zeta eta theta."), 1.0 / std::sqrt(12.0), 1e-12);
}

TEST(Evidence, RepeatedTermsWeightTheVector) {
    // {alpha:2, beta:1} . {alpha:1} = 2; norms sqrt5 and 1.
    EXPECT_NEAR(tf_cosine("alpha alpha beta", "alpha"), 2.0 / std::sqrt(5.0), 1e-12);
}

TEST(Evidence, EmptyDescriptionAndBadTopK) {
    EXPECT_TRUE(filter_evidence({"e2", "element", "x"}, {"D1", "t", "", {}}, 3).empty());
    EXPECT_THROW(filter_evidence({"e2", "element", "x"}, {"D1", "t", "A b.", {}}, 0), Error);
}

TEST(Evidence, ShuffleKeepsTheScoreMultiset) {
    std::vector<std::string> sentences{"Alpha beta gamma.", "Delta alpha.", "Beta beta epsilon.", "Zeta eta.",
                                       "Alpha beta."};
    auto run = [&](const std::vector<std::string>& order) {
        std::string desc;
        for (const auto& s : order) desc += (desc.empty() ? "" : " ") + s;
        auto ev = filter_evidence({"e2", "element", "alpha beta"}, {"D1", "t", desc, {}}, 5);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& e : ev) out.emplace_back(e.sentence, e.score);
        std::sort(out.begin(), out.end());
        return out;
    };
    const auto ref = run(sentences);
    std::sort(sentences.begin(), sentences.end());
    do {
        EXPECT_EQ(run(sentences), ref);
    } while (std::next_permutation(sentences.begin(), sentences.end()));
}

// --- synthetic generator ------------------------------------------------------------------

TEST(Synthetic, DeterministicAndSeedSensitive) {
    const auto a = dump_corpus(generate_synthetic(42, 10));
    EXPECT_EQ(a, dump_corpus(generate_synthetic(42, 10)));
    EXPECT_NE(a, dump_corpus(generate_synthetic(43, 10)));
    const auto recs = generate_synthetic(42, 10);
    EXPECT_EQ(recs.size(), 10u);
    for (const auto& r : recs) {
        EXPECT_GE(r.claim.elements.size(), 2u);
        EXPECT_LE(r.claim.elements.size(), 5u);
        EXPECT_GE(r.prior_art.size(), 1u);
        EXPECT_LE(r.prior_art.size(), 2u);
    }
    EXPECT_THROW(generate_synthetic(1, 0), Error);
}

TEST(Synthetic, MockExaminerAgreesWithGoldLabels) {
    // The mock examiner is the oracle: run it over each generated record and
    // compare its verdicts with the labels the generator wrote.
    SyntheticSpec spec;
    spec.min_elements = 4;
    spec.max_elements = 5;
    const auto recs = generate_synthetic(42, 40, spec);
    MockBackend mock;
    std::vector<DisclosureStatus> predicted;
    std::vector<bool> gold;
    int records_with_two_of_four = 0;
    for (const auto& r : recs) {
        ASSERT_TRUE(r.gold_labels);
        int marked = 0;
        int found = 0;
        for (const auto& label : *r.gold_labels) {
            const auto* e = r.claim.find(label.element.element_id);
            ASSERT_NE(e, nullptr);
            int severity = 0;
            DisclosureStatus best = DisclosureStatus::NotDisclosed;
            for (const auto& doc : r.prior_art) {
                const auto s = mock.examine_once(*e, doc, 0).status;
                const int sev = s == DisclosureStatus::Disclosed ? 2 : s == DisclosureStatus::PartiallyDisclosed ? 1 : 0;
                if (sev > severity) {
                    severity = sev;
                    best = s;
                }
            }
            predicted.push_back(best);
            gold.push_back(label.disclosed);
            marked += label.disclosed ? 1 : 0;
            found += is_disclosed(best) ? 1 : 0;
        }
        EXPECT_EQ(found, marked) << r.claim.claim_id;
        if (r.gold_labels->size() == 4 && marked == 2) ++records_with_two_of_four;
    }
    EXPECT_GT(records_with_two_of_four, 0);
    EXPECT_EQ(coverage_f1(predicted, gold), 1.0);
}

TEST(Synthetic, DisclosedBoundsAreHonored) {
    SyntheticSpec spec;
    spec.min_elements = 4;
    spec.max_elements = 4;
    spec.min_disclosed = 2;
    spec.max_disclosed = 2;
    for (const auto& r : generate_synthetic(7, 30, spec)) {
        int marked = 0;
        for (const auto& l : *r.gold_labels) marked += l.disclosed ? 1 : 0;
        EXPECT_EQ(marked, 2) << r.claim.claim_id;
    }
    SyntheticSpec bad;
    bad.min_disclosed = 5;
    EXPECT_THROW(generate_synthetic(1, 1, bad), Error);
}
