#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logidroid/model.hpp"

namespace logidroid {

struct MatchResult {
    bool perfect = false;
    std::optional<int> first_divergence;  // first failing step index when not perfect
};

// Step-for-step consistency: equal length and steps_equal pairwise in order.
MatchResult perfect_match(const TestCase& generated, const TestCase& ground_truth);

// Indices into the ground-truth steps that are essential for the
// functionality. When no annotation file marks a case, the default is every
// assertion plus every edit event (every step if that set is empty).
using EssentialAnnotation = std::vector<int>;
EssentialAnnotation default_annotation(const TestCase& ground_truth);

// Automated proxy for human-judged success: true iff every essential
// ground-truth step has a steps_equal match in `generated`, in the same
// relative order. Throws NoAnnotations for an empty annotation.
bool essential_coverage(const TestCase& generated, const TestCase& ground_truth,
                        const EssentialAnnotation& annotation);

enum class CaseVerdict { perfect, essential_only, fail };
std::string to_string(CaseVerdict verdict);

struct CaseResult {
    std::string case_id;
    CaseVerdict verdict = CaseVerdict::fail;
    std::optional<int> first_divergence;
};

struct EvalReport {
    int total = 0;
    int perfect = 0;
    int essential_pass = 0;  // includes perfect cases
    double perfect_rate = 0.0;
    double essential_rate = 0.0;
    std::vector<CaseResult> per_case;
};

struct EvalPair {
    std::string case_id;
    TestCase generated;
    TestCase ground_truth;
    std::optional<EssentialAnnotation> annotation;  // default rule when absent
};

EvalReport evaluate_corpus(const std::vector<EvalPair>& pairs);

// Report document; essential_rate is explicitly labeled as the automated
// proxy metric.
nlohmann::json report_to_json(const EvalReport& report);

}  // namespace logidroid
