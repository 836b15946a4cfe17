#include "logidroid/evaluation.hpp"

#include <algorithm>

#include "logidroid/errors.hpp"

namespace logidroid {

MatchResult perfect_match(const TestCase& generated, const TestCase& ground_truth) {
    const std::size_t common = std::min(generated.steps.size(), ground_truth.steps.size());
    for (std::size_t i = 0; i < common; ++i)
        if (!steps_equal(generated.steps[i], ground_truth.steps[i]))
            return {false, static_cast<int>(i)};
    if (generated.steps.size() != ground_truth.steps.size())
        return {false, static_cast<int>(common)};
    return {true, std::nullopt};
}

EssentialAnnotation default_annotation(const TestCase& ground_truth) {
    EssentialAnnotation annotation;
    for (std::size_t i = 0; i < ground_truth.steps.size(); ++i) {
        const TestStep& step = ground_truth.steps[i];
        const bool essential = step.kind == StepKind::assertion ||
                               (step.action && *step.action == ActionKind::edit);
        if (essential) annotation.push_back(static_cast<int>(i));
    }
    if (annotation.empty())  // event-only cases: every step counts
        for (std::size_t i = 0; i < ground_truth.steps.size(); ++i)
            annotation.push_back(static_cast<int>(i));
    return annotation;
}

bool essential_coverage(const TestCase& generated, const TestCase& ground_truth,
                        const EssentialAnnotation& annotation) {
    if (annotation.empty()) throw NoAnnotations("annotation marks no essential step");
    EssentialAnnotation essential = annotation;
    std::sort(essential.begin(), essential.end());
    // Greedy order-preserving embedding of the essential steps.
    std::size_t position = 0;
    for (const int index : essential) {
        if (index < 0 || index >= static_cast<int>(ground_truth.steps.size()))
            throw NoAnnotations("annotation index " + std::to_string(index) +
                                " is out of range");
        const TestStep& target = ground_truth.steps[static_cast<std::size_t>(index)];
        bool found = false;
        while (position < generated.steps.size()) {
            if (steps_equal(generated.steps[position], target)) {
                found = true;
                ++position;
                break;
            }
            ++position;
        }
        if (!found) return false;
    }
    return true;
}

std::string to_string(CaseVerdict verdict) {
    switch (verdict) {
        case CaseVerdict::perfect: return "perfect";
        case CaseVerdict::essential_only: return "essential_only";
        case CaseVerdict::fail: return "fail";
    }
    return "fail";
}

EvalReport evaluate_corpus(const std::vector<EvalPair>& pairs) {
    EvalReport report;
    report.total = static_cast<int>(pairs.size());
    for (const EvalPair& pair : pairs) {
        CaseResult result;
        result.case_id = pair.case_id;
        const MatchResult match = perfect_match(pair.generated, pair.ground_truth);
        result.first_divergence = match.first_divergence;
        const EssentialAnnotation annotation =
            pair.annotation ? *pair.annotation : default_annotation(pair.ground_truth);
        const bool essential =
            essential_coverage(pair.generated, pair.ground_truth, annotation);
        if (match.perfect) {
            result.verdict = CaseVerdict::perfect;
            ++report.perfect;
            ++report.essential_pass;
        } else if (essential) {
            result.verdict = CaseVerdict::essential_only;
            ++report.essential_pass;
        } else {
            result.verdict = CaseVerdict::fail;
        }
        report.per_case.push_back(std::move(result));
    }
    report.perfect_rate =
        report.total == 0 ? 0.0 : static_cast<double>(report.perfect) / report.total;
    report.essential_rate =
        report.total == 0 ? 0.0 : static_cast<double>(report.essential_pass) / report.total;
    return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json per_case = nlohmann::json::array();
    for (const CaseResult& result : report.per_case) {
        nlohmann::json item{{"case_id", result.case_id},
                            {"verdict", to_string(result.verdict)}};
        if (result.first_divergence) item["first_divergence"] = *result.first_divergence;
        per_case.push_back(std::move(item));
    }
    return nlohmann::json{
        {"total", report.total},
        {"perfect", report.perfect},
        {"perfect_rate", report.perfect_rate},
        {"essential_pass", report.essential_pass},
        {"essential_rate", report.essential_rate},
        {"essential_rate_note",
         "automated essential-step proxy, not a human-judged success rate"},
        {"per_case", std::move(per_case)}};
}

}  // namespace logidroid
