#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "logidroid/errors.hpp"
#include "logidroid/llm.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

// ---------------------------------------------------------------------------
// Step grammar
// ---------------------------------------------------------------------------
// Two productions:
//   (Event)     <Action> a widget <Widget> [with <Value>]
//   (Assertion) Identify a widget <Widget> (in the state | not in the state)
// The "with <Value>" clause is mandatory for edit and optional otherwise.
// Action synonyms: Click/Tap -> click, Edit/Enter/Type -> edit,
// Swipe left/right/up/down -> swipe_*. When the (Event)/(Assertion) tag and
// the phrasing conflict, the phrasing wins: an Identify line is always an
// assertion.

struct ParsedLogicStep {
    StepKind kind = StepKind::event;
    std::optional<ActionKind> action;     // events
    std::string widget_slot;              // raw slot text, quoting preserved
    std::optional<std::string> value;     // quotes stripped
    std::optional<Condition> condition;   // assertions
};

enum class ViolationCode {
    format,
    too_short,
    too_long,
    contains_code,
    irrelevant_step,
    unknown_action,
};

std::string to_string(ViolationCode code);

struct Violation {
    ViolationCode code = ViolationCode::format;
    int line_no = 0;  // 1-based line within the raw output; 0 for whole-output
    std::string message;
};

std::string to_string(const Violation& violation);

struct LineParse {
    std::optional<ParsedLogicStep> step;
    std::optional<ViolationCode> code;
    std::string message;
};

// Parses one line (an optional "Step k:" prefix is accepted).
LineParse parse_logic_line(const std::string& line);

// Parses a stored phrase; phrases produced by this module always parse.
std::optional<ParsedLogicStep> parse_logic_phrase(const std::string& phrase);

// Normal form of a parsed step: canonical verb, canonical tag, re-quoted value.
std::string canonical_phrase(const ParsedLogicStep& step);

// Quoted substrings of the widget slot, in order; the whole slot when it
// contains no quotes. These are the lookup candidates for widget matching.
std::vector<std::string> widget_candidates(const std::string& widget_slot);

// "Step k: <phrase>" lines; validate_logic on the result reparses equal.
std::string render_logic(const BusinessLogic& logic);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationContext {
    // Content words from the requirement and retrieved cases. When empty the
    // lexical relevance check is skipped.
    std::set<std::string> vocabulary;
    int min_steps = 3;
    int max_steps = 15;

    static ValidationContext from(const std::string& requirement,
                                  const std::vector<TestCase>& related);
};

struct ValidationResult {
    std::optional<BusinessLogic> logic;
    std::vector<Violation> violations;

    bool ok() const { return logic.has_value(); }
};

// Parses raw model output line by line against the step grammar, enforces the
// step-count bounds, rejects code/XPath/script content and (with a non-empty
// vocabulary) steps lexically unrelated to the requirement and retrieved
// cases. Returns either the parsed logic or every violation found.
ValidationResult validate_logic(const std::string& raw,
                                const ValidationContext& context = {},
                                const std::string& functionality = "");

// ---------------------------------------------------------------------------
// Fusion
// ---------------------------------------------------------------------------

struct FusionRejected : Error {
    FusionRejected(const std::string& what, std::vector<Violation> violations_in)
        : Error(what), violations(std::move(violations_in)) {}
    std::vector<Violation> violations;
};

struct FusionOptions {
    int max_rounds = 3;  // provider calls per fuse invocation
    int min_steps = 3;
    int max_steps = 15;
};

// Turns the requirement plus retrieved cases into validated business logic
// via the fusion prompt, re-prompting with the violations as corrective
// feedback. With zero retrieved cases the prompt simply omits the
// related-case section. Throws FusionRejected when every round fails.
BusinessLogic fuse(const std::string& requirement, const std::vector<TestCase>& retrieved,
                   const std::string& category, Completer& llm,
                   const FusionOptions& options = {});

}  // namespace logidroid
