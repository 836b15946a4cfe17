#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace logidroid {

// ---------------------------------------------------------------------------
// Actions, conditions, step kinds
// ---------------------------------------------------------------------------

// Input actions a widget can receive. `back` is a global key press the agent
// may use to escape unexpected dialogs; it is recorded in session history but
// never emitted into a synthesized test case.
enum class ActionKind {
    click,
    edit,
    swipe_left,
    swipe_right,
    swipe_up,
    swipe_down,
    back,
};

// Verification condition of an assertion.
enum class Condition { exists, not_exists };

enum class StepKind { event, assertion };

std::string to_string(ActionKind action);
std::string to_string(Condition condition);
std::string to_string(StepKind kind);
std::optional<ActionKind> action_from_string(const std::string& name);
std::optional<Condition> condition_from_string(const std::string& name);

// Only `edit` carries an input value; every other action forbids one.
inline bool action_requires_value(ActionKind action) { return action == ActionKind::edit; }

// ---------------------------------------------------------------------------
// Widgets
// ---------------------------------------------------------------------------

struct Rect {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    bool well_formed() const { return left <= right && top <= bottom; }
    int center_x() const { return (left + right) / 2; }
    int center_y() const { return (top + bottom) / 2; }
    int width() const { return right - left; }
    int height() const { return bottom - top; }

    bool operator==(const Rect&) const = default;
};

// The three key semantic attributes that identify a widget. Used as the step
// pattern in test cases, as the transition selector in simulated apps, and as
// the backtracking target. Any non-empty subset identifies the widget.
struct WidgetPattern {
    std::string text;
    std::string content_desc;
    std::string resource_id;

    bool empty() const { return text.empty() && content_desc.empty() && resource_id.empty(); }

    bool operator==(const WidgetPattern&) const = default;
};

// A widget as perceived on screen: the three key attributes plus the
// operations it supports and its pixel bounds.
struct WidgetDescriptor {
    std::string text;
    std::string content_desc;
    std::string resource_id;
    std::set<ActionKind> supported_ops;
    Rect bounds;

    bool has_key_attribute() const {
        return !text.empty() || !content_desc.empty() || !resource_id.empty();
    }
    WidgetPattern pattern() const { return {text, content_desc, resource_id}; }
    // First non-empty key attribute; the label used in prompt renderings.
    const std::string& label() const;

    bool operator==(const WidgetDescriptor&) const = default;
};

// ---------------------------------------------------------------------------
// Test cases
// ---------------------------------------------------------------------------

// One step of a functional test case: an input event or a verification
// assertion.
//   kind=event     -> action set (value only for edit), condition unset
//   kind=assertion -> condition set, action and value unset
struct TestStep {
    StepKind kind = StepKind::event;
    WidgetPattern widget;
    std::optional<ActionKind> action;
    std::optional<std::string> value;
    std::optional<Condition> condition;

    bool operator==(const TestStep&) const = default;
};

// An ordered sequence of events and assertions validating one functionality.
struct TestCase {
    std::string app_id;
    std::string category;
    std::vector<TestStep> steps;

    bool operator==(const TestCase&) const = default;
};

// Returns an explanation if the value violates its invariants, nullopt if valid.
std::optional<std::string> validate(const TestStep& step);
std::optional<std::string> validate(const TestCase& test_case);
std::optional<std::string> validate(const WidgetDescriptor& widget);

// ---------------------------------------------------------------------------
// GUI states
// ---------------------------------------------------------------------------

struct IndexedWidget {
    int id = 0;
    WidgetDescriptor widget;

    bool operator==(const IndexedWidget&) const = default;
};

// One perceived screen. Widget ids are dense 0..n-1 and assigned in
// description order: sorted by (bounds.top, bounds.left), ties broken by
// (bounds.right, original traversal index).
struct GuiState {
    int state_id = 0;
    std::vector<IndexedWidget> widgets;
    std::string description;
    std::optional<std::string> screenshot_ref;

    const WidgetDescriptor* find(int widget_id) const;

    bool operator==(const GuiState&) const = default;
};

// Orders raw widgets per the spatial rule and assigns dense ids.
std::vector<IndexedWidget> order_widgets(std::vector<WidgetDescriptor> raw);

// ---------------------------------------------------------------------------
// Business logic
// ---------------------------------------------------------------------------

// One implementation-agnostic logic step. The phrase conforms to the step
// grammar (see fusion.hpp), e.g. `(Event) Click a widget "add button"`.
struct LogicStep {
    StepKind kind = StepKind::event;
    std::string phrase;

    bool operator==(const LogicStep&) const = default;
};

struct BusinessLogic {
    std::string functionality;
    std::vector<LogicStep> steps;

    bool operator==(const BusinessLogic&) const = default;
};

// ---------------------------------------------------------------------------
// Instructions
// ---------------------------------------------------------------------------

enum class InstructionKind { event, assertion, no_match, task_complete };

std::string to_string(InstructionKind kind);
std::optional<InstructionKind> instruction_kind_from_string(const std::string& name);

// A concrete decision emitted by the decision agent, addressed by widget id
// within the state identified by source_state_id.
//   event          -> widget_id + action (+ value for edit)
//   assertion      -> widget_id + condition
//   no_match, task_complete -> carry nothing
struct Instruction {
    InstructionKind kind = InstructionKind::event;
    std::optional<int> widget_id;
    std::optional<ActionKind> action;
    std::optional<std::string> value;
    std::optional<Condition> condition;
    std::optional<int> source_state_id;

    bool operator==(const Instruction&) const = default;
};

std::optional<std::string> validate(const Instruction& instruction);

// ---------------------------------------------------------------------------
// Canonicalization and comparison
// ---------------------------------------------------------------------------

// ASCII trim + case-fold. The normal form used for all widget matching.
std::string canonical_text(const std::string& text);
// Lowercase alphanumeric word tokens, split on everything else.
std::vector<std::string> word_tokens(const std::string& text);
// canonical_text with internal whitespace removed; tolerates spacing
// differences such as "sample to do" vs "sample todo".
std::string squashed_text(const std::string& text);

WidgetPattern canonicalize(const WidgetPattern& pattern);

// Trims and case-folds every text field; idempotent and deterministic.
TestStep canonicalize_step(const TestStep& step);

// True when the two patterns share at least one equal, non-empty canonical
// attribute among text / content_desc / resource_id.
bool widgets_match(const WidgetPattern& a, const WidgetPattern& b);

// Phrase-to-widget matching: the canonical phrase equals a canonical
// attribute, or the squashed forms are equal.
bool widget_matches_phrase(const WidgetPattern& widget, const std::string& phrase);

// True iff kinds match, action/value/condition match, and the widgets match
// per widgets_match (all comparisons on canonical forms).
bool steps_equal(const TestStep& a, const TestStep& b);

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------
// Canonical test-case document:
//   {"app": ..., "category": ..., "steps": [{"kind": "event"|"assertion",
//    "action"?: ..., "widget": {"text": ..., "resource_id": ..., "content_desc": ...},
//    "value"?: ..., "condition"?: "exists"|"not_exists"}]}
// Absent optional fields are omitted, never null.

void to_json(nlohmann::json& j, const WidgetPattern& pattern);
void from_json(const nlohmann::json& j, WidgetPattern& pattern);
void to_json(nlohmann::json& j, const TestStep& step);
void from_json(const nlohmann::json& j, TestStep& step);
void to_json(nlohmann::json& j, const TestCase& test_case);
void from_json(const nlohmann::json& j, TestCase& test_case);
void to_json(nlohmann::json& j, const WidgetDescriptor& widget);
void from_json(const nlohmann::json& j, WidgetDescriptor& widget);
void to_json(nlohmann::json& j, const IndexedWidget& widget);
void from_json(const nlohmann::json& j, IndexedWidget& widget);
void to_json(nlohmann::json& j, const GuiState& state);
void from_json(const nlohmann::json& j, GuiState& state);
void to_json(nlohmann::json& j, const LogicStep& step);
void from_json(const nlohmann::json& j, LogicStep& step);
void to_json(nlohmann::json& j, const BusinessLogic& logic);
void from_json(const nlohmann::json& j, BusinessLogic& logic);
void to_json(nlohmann::json& j, const Instruction& instruction);
void from_json(const nlohmann::json& j, Instruction& instruction);

}  // namespace logidroid
