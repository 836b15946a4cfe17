#include "logidroid/model.hpp"

#include <algorithm>
#include <cctype>

#include "logidroid/errors.hpp"

namespace logidroid {

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string to_string(ActionKind action) {
    switch (action) {
        case ActionKind::click: return "click";
        case ActionKind::edit: return "edit";
        case ActionKind::swipe_left: return "swipe_left";
        case ActionKind::swipe_right: return "swipe_right";
        case ActionKind::swipe_up: return "swipe_up";
        case ActionKind::swipe_down: return "swipe_down";
        case ActionKind::back: return "back";
    }
    return "click";
}

std::string to_string(Condition condition) {
    return condition == Condition::exists ? "exists" : "not_exists";
}

std::string to_string(StepKind kind) {
    return kind == StepKind::event ? "event" : "assertion";
}

std::string to_string(InstructionKind kind) {
    switch (kind) {
        case InstructionKind::event: return "event";
        case InstructionKind::assertion: return "assertion";
        case InstructionKind::no_match: return "no_match";
        case InstructionKind::task_complete: return "task_complete";
    }
    return "event";
}

std::optional<ActionKind> action_from_string(const std::string& name) {
    if (name == "click") return ActionKind::click;
    if (name == "edit") return ActionKind::edit;
    if (name == "swipe_left") return ActionKind::swipe_left;
    if (name == "swipe_right") return ActionKind::swipe_right;
    if (name == "swipe_up") return ActionKind::swipe_up;
    if (name == "swipe_down") return ActionKind::swipe_down;
    if (name == "back") return ActionKind::back;
    return std::nullopt;
}

std::optional<Condition> condition_from_string(const std::string& name) {
    if (name == "exists") return Condition::exists;
    if (name == "not_exists") return Condition::not_exists;
    return std::nullopt;
}

std::optional<InstructionKind> instruction_kind_from_string(const std::string& name) {
    if (name == "event") return InstructionKind::event;
    if (name == "assertion") return InstructionKind::assertion;
    if (name == "no_match") return InstructionKind::no_match;
    if (name == "task_complete") return InstructionKind::task_complete;
    return std::nullopt;
}

const std::string& WidgetDescriptor::label() const {
    if (!text.empty()) return text;
    if (!content_desc.empty()) return content_desc;
    return resource_id;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::optional<std::string> validate(const TestStep& step) {
    if (step.widget.empty()) return "step widget has no non-empty attribute";
    if (step.kind == StepKind::event) {
        if (!step.action) return "event step without action";
        if (step.condition) return "event step carries a condition";
        if (action_requires_value(*step.action) && !step.value)
            return "edit event without value";
        if (step.value && !action_requires_value(*step.action))
            return "non-edit event carries a value";
    } else {
        if (!step.condition) return "assertion step without condition";
        if (step.action) return "assertion step carries an action";
        if (step.value) return "assertion step carries a value";
    }
    return std::nullopt;
}

std::optional<std::string> validate(const TestCase& test_case) {
    if (test_case.steps.empty()) return "test case has no steps";
    for (std::size_t i = 0; i < test_case.steps.size(); ++i) {
        if (auto why = validate(test_case.steps[i]))
            return "step " + std::to_string(i + 1) + ": " + *why;
    }
    return std::nullopt;
}

std::optional<std::string> validate(const WidgetDescriptor& widget) {
    if (!widget.has_key_attribute()) return "widget has no non-empty key attribute";
    if (!widget.bounds.well_formed()) return "widget bounds are inverted";
    return std::nullopt;
}

std::optional<std::string> validate(const Instruction& instruction) {
    switch (instruction.kind) {
        case InstructionKind::event:
            if (!instruction.widget_id || !instruction.action)
                return "event instruction requires widget_id and action";
            if (action_requires_value(*instruction.action) && !instruction.value)
                return "edit instruction without value";
            if (instruction.condition) return "event instruction carries a condition";
            break;
        case InstructionKind::assertion:
            if (!instruction.widget_id || !instruction.condition)
                return "assertion instruction requires widget_id and condition";
            if (instruction.action || instruction.value)
                return "assertion instruction carries an action or value";
            break;
        case InstructionKind::no_match:
        case InstructionKind::task_complete:
            if (instruction.widget_id || instruction.action || instruction.value ||
                instruction.condition)
                return "sentinel instruction must carry nothing";
            break;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// GUI states
// ---------------------------------------------------------------------------

const WidgetDescriptor* GuiState::find(int widget_id) const {
    if (widget_id < 0 || widget_id >= static_cast<int>(widgets.size())) return nullptr;
    return &widgets[static_cast<std::size_t>(widget_id)].widget;
}

std::vector<IndexedWidget> order_widgets(std::vector<WidgetDescriptor> raw) {
    std::vector<std::size_t> order(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Rect& ra = raw[a].bounds;
        const Rect& rb = raw[b].bounds;
        if (ra.top != rb.top) return ra.top < rb.top;
        if (ra.left != rb.left) return ra.left < rb.left;
        if (ra.right != rb.right) return ra.right < rb.right;
        return a < b;  // original traversal index
    });
    std::vector<IndexedWidget> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        out.push_back({static_cast<int>(i), std::move(raw[order[i]])});
    return out;
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

std::string canonical_text(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    std::string out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i)
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
    return out;
}

std::vector<std::string> word_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string squashed_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : canonical_text(text))
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    return out;
}

WidgetPattern canonicalize(const WidgetPattern& pattern) {
    return {canonical_text(pattern.text), canonical_text(pattern.content_desc),
            canonical_text(pattern.resource_id)};
}

TestStep canonicalize_step(const TestStep& step) {
    TestStep out = step;
    out.widget = canonicalize(step.widget);
    if (out.value) out.value = canonical_text(*out.value);
    return out;
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

bool widgets_match(const WidgetPattern& a, const WidgetPattern& b) {
    const WidgetPattern ca = canonicalize(a);
    const WidgetPattern cb = canonicalize(b);
    if (!ca.text.empty() && ca.text == cb.text) return true;
    if (!ca.content_desc.empty() && ca.content_desc == cb.content_desc) return true;
    if (!ca.resource_id.empty() && ca.resource_id == cb.resource_id) return true;
    return false;
}

bool widget_matches_phrase(const WidgetPattern& widget, const std::string& phrase) {
    const std::string canon = canonical_text(phrase);
    if (canon.empty()) return false;
    const WidgetPattern cw = canonicalize(widget);
    if (canon == cw.text || canon == cw.content_desc || canon == cw.resource_id) return true;
    const std::string squash = squashed_text(phrase);
    return squash == squashed_text(widget.text) ||
           squash == squashed_text(widget.content_desc) ||
           squash == squashed_text(widget.resource_id);
}

bool steps_equal(const TestStep& a, const TestStep& b) {
    if (a.kind != b.kind) return false;
    const TestStep ca = canonicalize_step(a);
    const TestStep cb = canonicalize_step(b);
    if (ca.action != cb.action) return false;
    if (ca.value != cb.value) return false;
    if (ca.condition != cb.condition) return false;
    return widgets_match(ca.widget, cb.widget);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const WidgetPattern& pattern) {
    j = nlohmann::json{{"text", pattern.text},
                       {"resource_id", pattern.resource_id},
                       {"content_desc", pattern.content_desc}};
}

void from_json(const nlohmann::json& j, WidgetPattern& pattern) {
    pattern.text = j.value("text", "");
    pattern.resource_id = j.value("resource_id", "");
    pattern.content_desc = j.value("content_desc", "");
}

void to_json(nlohmann::json& j, const TestStep& step) {
    j = nlohmann::json{{"kind", to_string(step.kind)}, {"widget", step.widget}};
    if (step.action) j["action"] = to_string(*step.action);
    if (step.value) j["value"] = *step.value;
    if (step.condition) j["condition"] = to_string(*step.condition);
}

void from_json(const nlohmann::json& j, TestStep& step) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "event")
        step.kind = StepKind::event;
    else if (kind == "assertion")
        step.kind = StepKind::assertion;
    else
        throw Error("unknown step kind: " + kind);
    step.widget = j.value("widget", WidgetPattern{});
    step.action.reset();
    step.value.reset();
    step.condition.reset();
    if (j.contains("action")) {
        const auto action = action_from_string(j.at("action").get<std::string>());
        if (!action) throw Error("unknown action: " + j.at("action").get<std::string>());
        step.action = *action;
    }
    if (j.contains("value")) step.value = j.at("value").get<std::string>();
    if (j.contains("condition")) {
        const auto condition = condition_from_string(j.at("condition").get<std::string>());
        if (!condition)
            throw Error("unknown condition: " + j.at("condition").get<std::string>());
        step.condition = *condition;
    }
}

void to_json(nlohmann::json& j, const TestCase& test_case) {
    j = nlohmann::json{{"app", test_case.app_id},
                       {"category", test_case.category},
                       {"steps", test_case.steps}};
}

void from_json(const nlohmann::json& j, TestCase& test_case) {
    test_case.app_id = j.at("app").get<std::string>();
    test_case.category = j.at("category").get<std::string>();
    test_case.steps = j.at("steps").get<std::vector<TestStep>>();
}

void to_json(nlohmann::json& j, const WidgetDescriptor& widget) {
    nlohmann::json ops = nlohmann::json::array();
    for (ActionKind op : widget.supported_ops) ops.push_back(to_string(op));
    j = nlohmann::json{
        {"text", widget.text},
        {"content_desc", widget.content_desc},
        {"resource_id", widget.resource_id},
        {"ops", std::move(ops)},
        {"bounds", {widget.bounds.left, widget.bounds.top, widget.bounds.right,
                    widget.bounds.bottom}}};
}

void from_json(const nlohmann::json& j, WidgetDescriptor& widget) {
    widget.text = j.value("text", "");
    widget.content_desc = j.value("content_desc", "");
    widget.resource_id = j.value("resource_id", "");
    widget.supported_ops.clear();
    if (j.contains("ops")) {
        for (const auto& op : j.at("ops")) {
            const auto action = action_from_string(op.get<std::string>());
            if (!action) throw Error("unknown op: " + op.get<std::string>());
            widget.supported_ops.insert(*action);
        }
    }
    widget.bounds = {};
    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        if (!b.is_array() || b.size() != 4) throw Error("bounds must be [l,t,r,b]");
        widget.bounds = {b[0].get<int>(), b[1].get<int>(), b[2].get<int>(), b[3].get<int>()};
    }
}

void to_json(nlohmann::json& j, const IndexedWidget& widget) {
    to_json(j, widget.widget);
    j["id"] = widget.id;
}

void from_json(const nlohmann::json& j, IndexedWidget& widget) {
    from_json(j, widget.widget);
    widget.id = j.at("id").get<int>();
}

void to_json(nlohmann::json& j, const GuiState& state) {
    j = nlohmann::json{{"state_id", state.state_id},
                       {"widgets", state.widgets},
                       {"description", state.description}};
    if (state.screenshot_ref) j["screenshot"] = *state.screenshot_ref;
}

void from_json(const nlohmann::json& j, GuiState& state) {
    state.state_id = j.at("state_id").get<int>();
    state.widgets = j.at("widgets").get<std::vector<IndexedWidget>>();
    state.description = j.at("description").get<std::string>();
    state.screenshot_ref.reset();
    if (j.contains("screenshot")) state.screenshot_ref = j.at("screenshot").get<std::string>();
}

void to_json(nlohmann::json& j, const LogicStep& step) {
    j = nlohmann::json{{"kind", to_string(step.kind)}, {"phrase", step.phrase}};
}

void from_json(const nlohmann::json& j, LogicStep& step) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "event")
        step.kind = StepKind::event;
    else if (kind == "assertion")
        step.kind = StepKind::assertion;
    else
        throw Error("unknown logic step kind: " + kind);
    step.phrase = j.at("phrase").get<std::string>();
}

void to_json(nlohmann::json& j, const BusinessLogic& logic) {
    j = nlohmann::json{{"functionality", logic.functionality}, {"steps", logic.steps}};
}

void from_json(const nlohmann::json& j, BusinessLogic& logic) {
    logic.functionality = j.at("functionality").get<std::string>();
    logic.steps = j.at("steps").get<std::vector<LogicStep>>();
}

void to_json(nlohmann::json& j, const Instruction& instruction) {
    j = nlohmann::json{{"kind", to_string(instruction.kind)}};
    if (instruction.widget_id) j["widget_id"] = *instruction.widget_id;
    if (instruction.action) j["action"] = to_string(*instruction.action);
    if (instruction.value) j["value"] = *instruction.value;
    if (instruction.condition) j["condition"] = to_string(*instruction.condition);
    if (instruction.source_state_id) j["source_state"] = *instruction.source_state_id;
}

void from_json(const nlohmann::json& j, Instruction& instruction) {
    const auto kind = instruction_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw Error("unknown instruction kind: " + j.at("kind").get<std::string>());
    instruction = Instruction{};
    instruction.kind = *kind;
    if (j.contains("widget_id")) instruction.widget_id = j.at("widget_id").get<int>();
    if (j.contains("action")) {
        const auto action = action_from_string(j.at("action").get<std::string>());
        if (!action) throw Error("unknown action: " + j.at("action").get<std::string>());
        instruction.action = *action;
    }
    if (j.contains("value")) instruction.value = j.at("value").get<std::string>();
    if (j.contains("condition")) {
        const auto condition = condition_from_string(j.at("condition").get<std::string>());
        if (!condition)
            throw Error("unknown condition: " + j.at("condition").get<std::string>());
        instruction.condition = *condition;
    }
    if (j.contains("source_state"))
        instruction.source_state_id = j.at("source_state").get<int>();
}

}  // namespace logidroid
