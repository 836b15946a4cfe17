#include "logidroid/fusion.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "logidroid/prompts.hpp"

namespace logidroid {

std::string to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::format: return "format";
        case ViolationCode::too_short: return "too_short";
        case ViolationCode::too_long: return "too_long";
        case ViolationCode::contains_code: return "contains_code";
        case ViolationCode::irrelevant_step: return "irrelevant_step";
        case ViolationCode::unknown_action: return "unknown_action";
    }
    return "format";
}

std::string to_string(const Violation& violation) {
    std::string out = to_string(violation.code);
    if (violation.line_no > 0) out += " (line " + std::to_string(violation.line_no) + ")";
    if (!violation.message.empty()) out += ": " + violation.message;
    return out;
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lowered(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

bool starts_with_ci(const std::string& s, const std::string& lowercase_prefix) {
    return lowered(s).rfind(lowercase_prefix, 0) == 0;
}

bool ends_with_ci(const std::string& s, const std::string& lowercase_suffix) {
    if (s.size() < lowercase_suffix.size()) return false;
    return lowered(s).compare(s.size() - lowercase_suffix.size(), lowercase_suffix.size(),
                              lowercase_suffix) == 0;
}

// Strips an optional "Step N:" or "Step N." prefix.
std::string strip_step_prefix(const std::string& line) {
    const std::string low = lowered(line);
    if (low.rfind("step", 0) != 0) return line;
    std::size_t i = 4;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t digits = i;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits])))
        ++digits;
    if (digits == i) return line;
    if (digits >= line.size() || (line[digits] != ':' && line[digits] != '.')) return line;
    return trimmed(line.substr(digits + 1));
}

// Consumes a leading "(Event)" or "(Assertion)" tag; returns the tagged kind.
bool consume_tag(std::string& line, StepKind& kind) {
    if (line.empty() || line.front() != '(') return false;
    const auto close = line.find(')');
    if (close == std::string::npos) return false;
    const std::string tag = lowered(trimmed(line.substr(1, close - 1)));
    if (tag == "event")
        kind = StepKind::event;
    else if (tag == "assertion")
        kind = StepKind::assertion;
    else
        return false;
    line = trimmed(line.substr(close + 1));
    return true;
}

// Strips matching outer quotes from a value slot.
std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

// Position of the last " with " that sits outside any quoted span.
std::optional<std::size_t> last_top_level_with(const std::string& s) {
    const std::string low = lowered(s);
    std::optional<std::size_t> found;
    char quote = '\0';
    for (std::size_t i = 0; i + 6 <= s.size(); ++i) {
        const char c = s[i];
        if (quote != '\0') {
            if (c == quote) quote = '\0';
            continue;
        }
        if (c == '"' || c == '\'') {
            quote = c;
            continue;
        }
        if (low.compare(i, 6, " with ") == 0) found = i;
    }
    return found;
}

std::optional<ActionKind> action_from_words(const std::string& words) {
    const std::string w = lowered(trimmed(words));
    if (w == "click" || w == "tap") return ActionKind::click;
    if (w == "edit" || w == "enter" || w == "type") return ActionKind::edit;
    if (w == "swipe left") return ActionKind::swipe_left;
    if (w == "swipe right") return ActionKind::swipe_right;
    if (w == "swipe up") return ActionKind::swipe_up;
    if (w == "swipe down") return ActionKind::swipe_down;
    return std::nullopt;
}

bool looks_like_code(const std::string& line) {
    const std::string low = lowered(line);
    if (low.find("```") != std::string::npos) return true;
    if (low.find("xpath") != std::string::npos) return true;
    if (low.find("driver.") != std::string::npos) return true;
    if (low.find("//") != std::string::npos) return true;
    // Path-shaped tokens: start with '/' or contain two or more separators.
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
        const auto slashes = std::count(token.begin(), token.end(), '/');
        if (slashes >= 2 || (slashes >= 1 && token.front() == '/')) return true;
    }
    return false;
}

const std::set<std::string>& stopwords() {
    static const std::set<std::string> kStopwords{
        "a", "an", "the", "in", "on", "at", "with", "or", "and",
        "to", "of", "is", "are", "not", "state", "widget"};
    return kStopwords;
}

std::set<std::string> content_words(const std::string& text) {
    std::set<std::string> out;
    for (auto& token : word_tokens(text))
        if (!stopwords().count(token)) out.insert(std::move(token));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Line parsing
// ---------------------------------------------------------------------------

LineParse parse_logic_line(const std::string& raw_line) {
    std::string line = strip_step_prefix(trimmed(raw_line));
    if (line.empty()) return {std::nullopt, ViolationCode::format, "empty step line"};

    StepKind tagged = StepKind::event;
    if (!consume_tag(line, tagged))
        return {std::nullopt, ViolationCode::format,
                "missing (Event) or (Assertion) tag: " + raw_line};

    ParsedLogicStep step;
    // Phrasing wins over the tag: an Identify line is always an assertion.
    if (starts_with_ci(line, "identify a widget")) {
        step.kind = StepKind::assertion;
        std::string rest = trimmed(line.substr(std::string("identify a widget").size()));
        if (ends_with_ci(rest, "not in the state")) {
            step.condition = Condition::not_exists;
            rest = trimmed(rest.substr(0, rest.size() - std::string("not in the state").size()));
        } else if (ends_with_ci(rest, "in the state")) {
            step.condition = Condition::exists;
            rest = trimmed(rest.substr(0, rest.size() - std::string("in the state").size()));
        } else {
            return {std::nullopt, ViolationCode::format,
                    "assertion must end with 'in the state' or 'not in the state': " + raw_line};
        }
        if (rest.empty())
            return {std::nullopt, ViolationCode::format, "assertion names no widget: " + raw_line};
        step.widget_slot = rest;
        return {step, std::nullopt, ""};
    }

    step.kind = StepKind::event;
    const std::string low = lowered(line);
    const auto marker = low.find(" a widget ");
    if (marker == std::string::npos)
        return {std::nullopt, ViolationCode::format,
                "expected '<Action> a widget <Widget>': " + raw_line};
    const std::string action_words = trimmed(line.substr(0, marker));
    const auto action = action_from_words(action_words);
    if (!action)
        return {std::nullopt, ViolationCode::unknown_action,
                "unknown action '" + action_words + "'"};
    step.action = *action;

    std::string rest = trimmed(line.substr(marker + std::string(" a widget ").size()));
    if (const auto with_pos = last_top_level_with(rest)) {
        const std::string value = trimmed(rest.substr(*with_pos + 6));
        step.value = strip_quotes(value);
        rest = trimmed(rest.substr(0, *with_pos));
    }
    if (rest.empty())
        return {std::nullopt, ViolationCode::format, "event names no widget: " + raw_line};
    step.widget_slot = rest;
    if (*action == ActionKind::edit && !step.value)
        return {std::nullopt, ViolationCode::format,
                "edit step requires a 'with <Value>' clause: " + raw_line};
    return {step, std::nullopt, ""};
}

std::optional<ParsedLogicStep> parse_logic_phrase(const std::string& phrase) {
    LineParse parsed = parse_logic_line(phrase);
    if (!parsed.step) return std::nullopt;
    return parsed.step;
}

std::string canonical_phrase(const ParsedLogicStep& step) {
    std::ostringstream out;
    if (step.kind == StepKind::event) {
        out << "(Event) " << action_verb(step.action.value_or(ActionKind::click))
            << " a widget " << step.widget_slot;
        if (step.value) out << " with \"" << *step.value << "\"";
    } else {
        out << "(Assertion) Identify a widget " << step.widget_slot
            << (step.condition == Condition::not_exists ? " not in the state"
                                                        : " in the state");
    }
    return out.str();
}

std::vector<std::string> widget_candidates(const std::string& widget_slot) {
    std::vector<std::string> out;
    char quote = '\0';
    std::string current;
    for (char c : widget_slot) {
        if (quote != '\0') {
            if (c == quote) {
                if (!current.empty()) out.push_back(current);
                current.clear();
                quote = '\0';
            } else {
                current.push_back(c);
            }
        } else if (c == '"' || c == '\'') {
            quote = c;
        }
    }
    if (out.empty()) out.push_back(trimmed(widget_slot));
    return out;
}

std::string render_logic(const BusinessLogic& logic) {
    std::ostringstream out;
    for (std::size_t i = 0; i < logic.steps.size(); ++i) {
        if (i) out << '\n';
        out << render_logic_line(static_cast<int>(i) + 1, logic.steps[i]);
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidationContext ValidationContext::from(const std::string& requirement,
                                          const std::vector<TestCase>& related) {
    ValidationContext context;
    context.vocabulary = content_words(requirement);
    for (const TestCase& test_case : related) {
        for (const auto& word : content_words(test_case.category))
            context.vocabulary.insert(word);
        for (const TestStep& step : test_case.steps) {
            for (const auto& word : content_words(step.widget.text))
                context.vocabulary.insert(word);
            for (const auto& word : content_words(step.widget.content_desc))
                context.vocabulary.insert(word);
            for (const auto& word : content_words(step.widget.resource_id))
                context.vocabulary.insert(word);
            if (step.value)
                for (const auto& word : content_words(*step.value))
                    context.vocabulary.insert(word);
        }
    }
    return context;
}

ValidationResult validate_logic(const std::string& raw, const ValidationContext& context,
                                const std::string& functionality) {
    std::vector<Violation> violations;
    std::vector<LogicStep> steps;
    int line_no = 0;
    int step_lines = 0;

    std::istringstream in(raw);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trimmed(line);
        if (text.empty()) continue;
        ++step_lines;

        if (looks_like_code(text)) {
            violations.push_back({ViolationCode::contains_code, line_no,
                                  "line contains code, XPath, or a file path: " + text});
            continue;
        }
        LineParse parsed = parse_logic_line(text);
        if (!parsed.step) {
            violations.push_back(
                {parsed.code.value_or(ViolationCode::format), line_no, parsed.message});
            continue;
        }
        if (!context.vocabulary.empty()) {
            std::set<std::string> words = content_words(parsed.step->widget_slot);
            if (parsed.step->value)
                for (const auto& word : content_words(*parsed.step->value))
                    words.insert(word);
            const bool related = std::any_of(words.begin(), words.end(), [&](const auto& w) {
                return context.vocabulary.count(w) > 0;
            });
            if (!words.empty() && !related) {
                violations.push_back({ViolationCode::irrelevant_step, line_no,
                                      "step shares no content word with the requirement or "
                                      "retrieved cases: " +
                                          text});
                continue;
            }
        }
        steps.push_back({parsed.step->kind, canonical_phrase(*parsed.step)});
    }

    if (step_lines < context.min_steps)
        violations.push_back({ViolationCode::too_short, 0,
                              std::to_string(step_lines) + " steps, need at least " +
                                  std::to_string(context.min_steps)});
    else if (step_lines > context.max_steps)
        violations.push_back({ViolationCode::too_long, 0,
                              std::to_string(step_lines) + " steps, allowed at most " +
                                  std::to_string(context.max_steps)});

    if (!violations.empty()) return {std::nullopt, std::move(violations)};
    return {BusinessLogic{functionality, std::move(steps)}, {}};
}

// ---------------------------------------------------------------------------
// Fusion loop
// ---------------------------------------------------------------------------

BusinessLogic fuse(const std::string& requirement, const std::vector<TestCase>& retrieved,
                   const std::string& category, Completer& llm,
                   const FusionOptions& options) {
    const std::string base = render_fusion_prompt(requirement, category, retrieved);
    ValidationContext context = ValidationContext::from(requirement, retrieved);
    context.min_steps = options.min_steps;
    context.max_steps = options.max_steps;

    std::string prompt = base;
    std::vector<Violation> last;
    for (int round = 0; round < options.max_rounds; ++round) {
        const std::string reply = llm.complete(PromptRole::knowledge_fusion, prompt);
        ValidationResult result = validate_logic(reply, context, requirement);
        if (result.ok()) return *result.logic;
        last = std::move(result.violations);

        std::ostringstream feedback;
        feedback << base << "\nFeedback: the previous output was rejected:\n";
        for (const auto& violation : last) feedback << "- " << to_string(violation) << '\n';
        feedback << "Please regenerate the test knowledge and follow the required step "
                    "format exactly.\n";
        prompt = feedback.str();
    }
    throw FusionRejected(
        "fusion rejected after " + std::to_string(options.max_rounds) + " rounds",
        std::move(last));
}

}  // namespace logidroid
