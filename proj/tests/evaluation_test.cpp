#include "logidroid/evaluation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "logidroid/errors.hpp"
#include "support.hpp"

using namespace logidroid;
namespace ts = logidroid::testsupport;

// ===========================================================================
// perfect_match
// ===========================================================================

TEST(PerfectMatch, CaseAgainstItself) {
    const TestCase ground_truth = ts::todo_ground_truth();
    const MatchResult result = perfect_match(ground_truth, ground_truth);
    EXPECT_TRUE(result.perfect);
    EXPECT_FALSE(result.first_divergence.has_value());
}

TEST(PerfectMatch, SwappedStepsDivergeAtFirstDifference) {
    const TestCase ground_truth = ts::todo_ground_truth();
    TestCase swapped = ground_truth;
    std::swap(swapped.steps[1], swapped.steps[2]);
    const MatchResult result = perfect_match(swapped, ground_truth);
    EXPECT_FALSE(result.perfect);
    EXPECT_EQ(result.first_divergence, 1);
}

TEST(PerfectMatch, TrailingExtraStepFailsOnLength) {
    const TestCase ground_truth = ts::todo_ground_truth();
    TestCase longer = ground_truth;
    longer.steps.push_back(ts::click(ts::by_text("Finish")));
    const MatchResult result = perfect_match(longer, ground_truth);
    EXPECT_FALSE(result.perfect);
    EXPECT_EQ(result.first_divergence, static_cast<int>(ground_truth.steps.size()));

    // cross-check against an independent pairwise comparison
    bool oracle = longer.steps.size() == ground_truth.steps.size();
    for (std::size_t i = 0; oracle && i < ground_truth.steps.size(); ++i)
        oracle = steps_equal(longer.steps[i], ground_truth.steps[i]);
    EXPECT_EQ(result.perfect, oracle);
}

TEST(PerfectMatch, InvariantUnderAttributeNoise) {
    std::mt19937 rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        const TestCase base = ts::random_case(rng);
        const TestCase noisy = ts::perturb_case(base, rng);
        EXPECT_TRUE(perfect_match(noisy, base).perfect) << "trial " << trial;
    }
}

// ===========================================================================
// essential_coverage
// ===========================================================================

namespace {

// Brute-force oracle: does any strictly increasing assignment of generated
// positions cover the essential steps in order?
bool subsequence_oracle(const TestCase& generated, const TestCase& ground_truth,
                        std::vector<int> essential, std::size_t from = 0,
                        std::size_t which = 0) {
    if (which == essential.size()) return true;
    for (std::size_t i = from; i < generated.steps.size(); ++i) {
        if (steps_equal(generated.steps[i],
                        ground_truth.steps[static_cast<std::size_t>(essential[which])]) &&
            subsequence_oracle(generated, ground_truth, essential, i + 1, which + 1))
            return true;
    }
    return false;
}

}  // namespace

TEST(EssentialCoverage, ExtraIntermediateClickStillCovers) {
    const TestCase ground_truth = ts::todo_ground_truth();
    TestCase generated = ground_truth;
    generated.steps.insert(generated.steps.begin() + 3,
                           ts::click(ts::by_text("somewhere else")));
    const EssentialAnnotation all_steps = [&] {
        EssentialAnnotation out;
        for (int i = 0; i < static_cast<int>(ground_truth.steps.size()); ++i)
            out.push_back(i);
        return out;
    }();
    EXPECT_TRUE(essential_coverage(generated, ground_truth, all_steps));
    EXPECT_TRUE(subsequence_oracle(generated, ground_truth, all_steps));
}

TEST(EssentialCoverage, MissingAssertionFails) {
    const TestCase ground_truth = ts::todo_ground_truth();
    TestCase generated = ground_truth;
    generated.steps.pop_back();  // drop the disappearance assertion
    EXPECT_FALSE(
        essential_coverage(generated, ground_truth, default_annotation(ground_truth)));
}

TEST(EssentialCoverage, OrderViolationFails) {
    const TestCase ground_truth = ts::todo_ground_truth();
    TestCase generated = ground_truth;
    // move the existence assertion before the edit that creates the item
    std::rotate(generated.steps.begin() + 1, generated.steps.begin() + 3,
                generated.steps.begin() + 4);
    const EssentialAnnotation essential = {1, 3};  // edit, exists-assertion
    EXPECT_FALSE(essential_coverage(generated, ground_truth, essential));
    EXPECT_FALSE(subsequence_oracle(generated, ground_truth, essential));
}

TEST(EssentialCoverage, EmptyAnnotationRejected) {
    const TestCase ground_truth = ts::todo_ground_truth();
    EXPECT_THROW(essential_coverage(ground_truth, ground_truth, {}), NoAnnotations);
}

TEST(EssentialCoverage, DefaultAnnotationSelectsAssertionsAndEdits) {
    const EssentialAnnotation annotation = default_annotation(ts::todo_ground_truth());
    EXPECT_EQ(annotation, (EssentialAnnotation{1, 3, 5}));

    // event-only cases fall back to every step
    const TestCase clicks = ts::make_case(
        "a", "c", {ts::click(ts::by_text("x")), ts::click(ts::by_text("y"))});
    EXPECT_EQ(default_annotation(clicks), (EssentialAnnotation{0, 1}));
}

TEST(EssentialCoverage, AgreesWithBruteForceOracleOnRandomPairs) {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 300; ++trial) {
        const TestCase ground_truth = ts::random_case(rng, 2, 5);
        TestCase generated = ts::random_case(rng, 1, 6);
        // sometimes seed the generated case with real fragments
        if (trial % 2 == 0) {
            generated = ground_truth;
            std::shuffle(generated.steps.begin(), generated.steps.end(), rng);
        }
        const EssentialAnnotation annotation = default_annotation(ground_truth);
        EXPECT_EQ(essential_coverage(generated, ground_truth, annotation),
                  subsequence_oracle(generated, ground_truth, annotation))
            << "trial " << trial;
    }
}

// ===========================================================================
// evaluate_corpus
// ===========================================================================

namespace {

EvalPair pair_of(const std::string& id, TestCase generated, TestCase ground_truth) {
    return {id, std::move(generated), std::move(ground_truth), std::nullopt};
}

}  // namespace

TEST(EvaluateCorpus, ReproducesRateArithmetic) {
    const TestCase ground_truth = ts::todo_ground_truth();
    std::vector<EvalPair> pairs;
    // 4 perfect
    for (int i = 0; i < 4; ++i)
        pairs.push_back(pair_of("perfect" + std::to_string(i), ground_truth, ground_truth));
    // 2 essential-only: one extra step in the middle
    for (int i = 0; i < 2; ++i) {
        TestCase padded = ground_truth;
        padded.steps.insert(padded.steps.begin() + 2, ts::click(ts::by_text("extra")));
        pairs.push_back(pair_of("essential" + std::to_string(i), padded, ground_truth));
    }
    // 4 failures: missing assertions
    for (int i = 0; i < 4; ++i) {
        TestCase broken = ground_truth;
        broken.steps.resize(2);
        pairs.push_back(pair_of("fail" + std::to_string(i), broken, ground_truth));
    }

    const EvalReport report = evaluate_corpus(pairs);
    EXPECT_EQ(report.total, 10);
    EXPECT_EQ(report.perfect, 4);
    EXPECT_EQ(report.essential_pass, 6);
    EXPECT_EQ(report.perfect_rate, 0.40);
    EXPECT_EQ(report.essential_rate, 0.60);
    EXPECT_LE(report.perfect, report.essential_pass);

    // aggregate fields recompute from per-case records
    int perfect = 0, essential = 0;
    for (const auto& result : report.per_case) {
        perfect += result.verdict == CaseVerdict::perfect ? 1 : 0;
        essential += result.verdict != CaseVerdict::fail ? 1 : 0;
    }
    EXPECT_EQ(perfect, report.perfect);
    EXPECT_EQ(essential, report.essential_pass);
}

TEST(EvaluateCorpus, IdenticalPairsScoreOne) {
    const TestCase ground_truth = ts::todo_ground_truth();
    const EvalReport report = evaluate_corpus(
        {pair_of("a", ground_truth, ground_truth), pair_of("b", ground_truth, ground_truth)});
    EXPECT_EQ(report.perfect_rate, 1.0);
    EXPECT_EQ(report.essential_rate, 1.0);
}

TEST(EvaluateCorpus, OrderIndependentAggregates) {
    std::mt19937 rng(59);
    std::vector<EvalPair> pairs;
    for (int i = 0; i < 12; ++i) {
        const TestCase ground_truth = ts::random_case(rng, 2, 5);
        const TestCase generated =
            i % 3 == 0 ? ground_truth : ts::random_case(rng, 1, 5);
        pairs.push_back(pair_of("case" + std::to_string(i), generated, ground_truth));
    }
    const EvalReport forward = evaluate_corpus(pairs);
    std::reverse(pairs.begin(), pairs.end());
    const EvalReport backward = evaluate_corpus(pairs);
    EXPECT_EQ(forward.perfect, backward.perfect);
    EXPECT_EQ(forward.essential_pass, backward.essential_pass);
    EXPECT_EQ(forward.perfect_rate, backward.perfect_rate);
}

TEST(EvaluateCorpus, PerfectImpliesEssentialOnRandomPairs) {
    std::mt19937 rng(61);
    int perfect_seen = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const TestCase ground_truth = ts::random_case(rng, 1, 6);
        TestCase generated;
        if (trial % 2 == 0) {
            generated = ts::perturb_case(ground_truth, rng);
        } else {
            generated = ts::random_case(rng, 1, 6);
        }
        if (!perfect_match(generated, ground_truth).perfect) continue;
        ++perfect_seen;
        EXPECT_TRUE(essential_coverage(generated, ground_truth,
                                       default_annotation(ground_truth)))
            << "trial " << trial;
    }
    EXPECT_GE(perfect_seen, 400);  // the perturbed half must keep matching
}

TEST(ReportJson, CarriesProxyLabel) {
    const EvalReport report =
        evaluate_corpus({pair_of("a", ts::todo_ground_truth(), ts::todo_ground_truth())});
    const nlohmann::json doc = report_to_json(report);
    EXPECT_EQ(doc.at("perfect_rate"), 1.0);
    EXPECT_NE(doc.at("essential_rate_note").get<std::string>().find("proxy"),
              std::string::npos);
    EXPECT_EQ(doc.at("per_case").at(0).at("verdict"), "perfect");
}
