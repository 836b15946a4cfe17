#include "logidroid/prompts.hpp"

#include <sstream>

#include "logidroid/errors.hpp"

namespace logidroid {

std::string action_verb(ActionKind action) {
    switch (action) {
        case ActionKind::click: return "Click";
        case ActionKind::edit: return "Edit";
        case ActionKind::swipe_left: return "Swipe left";
        case ActionKind::swipe_right: return "Swipe right";
        case ActionKind::swipe_up: return "Swipe up";
        case ActionKind::swipe_down: return "Swipe down";
        case ActionKind::back: return "Press back";
    }
    return "Click";
}

namespace {

const std::string& pattern_label(const WidgetPattern& widget) {
    if (!widget.text.empty()) return widget.text;
    if (!widget.content_desc.empty()) return widget.content_desc;
    return widget.resource_id;
}

}  // namespace

std::string render_step_line(int number, const TestStep& step) {
    std::ostringstream out;
    out << "Step " << number << ": ";
    if (step.kind == StepKind::event) {
        out << "(Event) " << action_verb(step.action.value_or(ActionKind::click))
            << " a widget \"" << pattern_label(step.widget) << "\"";
        if (step.value) out << " with \"" << *step.value << "\"";
    } else {
        out << "(Assertion) Identify a widget \"" << pattern_label(step.widget) << "\" "
            << (step.condition == Condition::not_exists ? "not in the state" : "in the state");
    }
    return out.str();
}

std::string render_logic_line(int number, const LogicStep& step) {
    return "Step " + std::to_string(number) + ": " + step.phrase;
}

std::string render_case_lines(const TestCase& test_case) {
    std::ostringstream out;
    for (std::size_t i = 0; i < test_case.steps.size(); ++i) {
        if (i) out << '\n';
        out << render_step_line(static_cast<int>(i) + 1, test_case.steps[i]);
    }
    return out.str();
}

std::string instruction_line(const Instruction& instruction) {
    std::ostringstream out;
    switch (instruction.kind) {
        case InstructionKind::event:
            out << "widget=" << instruction.widget_id.value_or(-1)
                << " action=" << to_string(instruction.action.value_or(ActionKind::click));
            if (instruction.value) out << " value=\"" << *instruction.value << "\"";
            break;
        case InstructionKind::assertion:
            out << "widget=" << instruction.widget_id.value_or(-1)
                << " assert=" << to_string(instruction.condition.value_or(Condition::exists));
            break;
        case InstructionKind::no_match:
            out << "(-1)";
            break;
        case InstructionKind::task_complete:
            out << "task complete";
            break;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Summary generation
// ---------------------------------------------------------------------------

std::string render_summary_prompt(const TestCase& test_case, const std::string& category) {
    if (category.empty()) throw MissingContextField("summary prompt requires a category");
    if (test_case.steps.empty())
        throw MissingContextField("summary prompt requires a non-empty test case");

    std::ostringstream out;
    out << "You are a functional summary generator. Based on the test cases for the "
           "Android app, generate a natural and one-sentence description.\n";
    out << "\nTest case from a [" << category << "] app\n";
    out << render_case_lines(test_case) << '\n';
    out << "Functional summary:\n";
    out << "\nExample 1: Test case from a Browser app\n"
           "Step 1: (Event) Click a widget \"search\"\n"
           "Step 2: (Event) Edit a widget \"search\" with \"news\"\n"
           "Step 3: (Event) Identify a widget \"latest news\" in the state\n"
           "Functional summary: Test the search functionality\n";
    out << "Example 2: Test case from a Note app\n"
           "Step 1: (Event) Click a widget \"new note button\"\n"
           "Step 2: (Event) Edit a widget \"note content\" with \"shopping list\"\n"
           "Step 3: (Event) Click a widget \"save note button\"\n"
           "Step 4: (Assertion) Identify a widget \"shopping list\" in the state\n"
           "Functional summary: Test the note creation functionality\n";
    out << "\nPlease generate the functional description for the [" << category << "] app.\n";
    out << "1. Please keep it simple: only include at most the subject, verb, and object.\n"
           "2. Please use natural English, not technical terms.\n"
           "3. Please focus on the main actions, ignore the details.\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Knowledge fusion
// ---------------------------------------------------------------------------

std::string render_fusion_prompt(const std::string& requirement, const std::string& category,
                                 const std::vector<TestCase>& related) {
    if (requirement.empty()) throw MissingContextField("fusion prompt requires a requirement");
    if (category.empty()) throw MissingContextField("fusion prompt requires a category");

    std::ostringstream out;
    out << "You are a summarizer to fuse test knowledge for the functionality: ["
        << requirement << "] in a [" << category << "] app.\n";
    for (std::size_t i = 0; i < related.size(); ++i) {
        out << "\nRelated Test Case " << (i + 1) << ":\n";
        out << render_case_lines(related[i]) << '\n';
    }
    out << "\nExample: Test knowledge for the functionality: [Test the search "
           "functionality] in a [Browser] app.\n"
           "Step 1: (Event) Click a widget \"search\" or \"url\" in the search bar\n"
           "Step 2: (Event) Edit a widget \"search\" or \"url\" in the search bar with "
           "\"news\"\n"
           "Step 3: (Event) Identify a widget \"latest news\" in the state\n";
    out << "\nPlease generate the test knowledge for the [" << category << "] app.\n";
    out << "1. The generated test step do not too short or too long.\n"
           "2. Please strictly use steps in the format of Event and Assertion\n"
           "(1) (Event) [Action] a widget [Widget] with [Value]\n"
           "(2) (Assertion) Identify a widget [Widget] [Condition]\n"
           "3. Please do not include any code, XPATH, or scripting instructions\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Step selection
// ---------------------------------------------------------------------------

std::string render_step_selection_prompt(
    const std::string& requirement, const std::vector<std::pair<int, LogicStep>>& candidates,
    const std::string& state_description) {
    if (requirement.empty())
        throw MissingContextField("step selection prompt requires a requirement");
    if (candidates.empty())
        throw MissingContextField("step selection prompt requires candidate steps");
    if (state_description.empty())
        throw MissingContextField("step selection prompt requires a state description");

    std::ostringstream out;
    out << "You are a test step selector. Based on the functional requirement, the "
           "candidate business logic steps, and the current GUI state, select the one "
           "step that can be performed now.\n";
    out << "\nRequirement: [" << requirement << "]\n";
    out << "Candidate steps:\n";
    for (const auto& [number, step] : candidates) out << render_logic_line(number, step) << '\n';
    out << "Current state:\n" << state_description << '\n';
    out << "\nExample: if Step 2 is the first candidate step whose widget appears in the "
           "current state, reply: Step 2\n"
           "Example: if no candidate step can be performed in the current state, reply: "
           "(-1)\n";
    out << "\nPlease select one step for the current state.\n"
           "1. Reply with exactly one candidate step number, in the form \"Step k\".\n"
           "2. If no candidate step applies, reply \"(-1)\".\n"
           "3. Do not add any explanation.\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Instruction generation
// ---------------------------------------------------------------------------

namespace {

void append_executed(std::ostringstream& out, const std::vector<std::string>& executed_lines) {
    out << "Executed instructions for this step:\n";
    if (executed_lines.empty()) {
        out << "(none)\n";
    } else {
        for (std::size_t i = 0; i < executed_lines.size(); ++i)
            out << (i + 1) << ". " << executed_lines[i] << '\n';
    }
}

}  // namespace

std::string render_instruction_prompt(const std::string& requirement, int step_number,
                                      const LogicStep& step,
                                      const std::vector<std::string>& executed_lines,
                                      const std::string& state_description) {
    if (requirement.empty())
        throw MissingContextField("instruction prompt requires a requirement");
    if (step.phrase.empty()) throw MissingContextField("instruction prompt requires a step");
    if (state_description.empty())
        throw MissingContextField("instruction prompt requires a state description");

    std::ostringstream out;
    out << "You are a test instruction generator. Translate the selected business logic "
           "step into one concrete instruction for the current GUI state.\n";
    out << "\nRequirement: [" << requirement << "]\n";
    out << "Selected step: " << render_logic_line(step_number, step) << '\n';
    append_executed(out, executed_lines);
    out << "Current state:\n" << state_description << '\n';
    out << "\nExample: to click widget 3, reply: widget=3 action=click\n"
           "Example: to type \"news\" into widget 1, reply: widget=1 action=edit "
           "value=\"news\"\n"
           "Example: to verify widget 2 is present, reply: widget=2\n";
    out << "\nPlease generate one instruction for the selected step.\n"
           "1. For an event step, reply in the form: widget=<id> action=<click|edit|"
           "swipe_left|swipe_right|swipe_up|swipe_down|back> value=\"<text>\" (include "
           "value only for edit).\n"
           "2. For an assertion step, reply only the widget to verify, in the form: "
           "widget=<id>.\n"
           "3. The widget id must be one of the ids listed in the current state.\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Completion judgment
// ---------------------------------------------------------------------------

std::string render_completion_prompt(const std::string& requirement, int step_number,
                                     const LogicStep& step,
                                     const std::vector<std::string>& executed_lines,
                                     const std::string& state_description) {
    if (requirement.empty())
        throw MissingContextField("completion prompt requires a requirement");
    if (step.phrase.empty()) throw MissingContextField("completion prompt requires a step");
    if (state_description.empty())
        throw MissingContextField("completion prompt requires a state description");

    std::ostringstream out;
    out << "You are a completion judge. Decide whether the current business logic step "
           "is completed.\n";
    out << "\nRequirement: [" << requirement << "]\n";
    out << "Current step: " << render_logic_line(step_number, step) << '\n';
    append_executed(out, executed_lines);
    out << "Current state:\n" << state_description << '\n';
    out << "\nExample: if the executed instructions fulfilled the step and the current "
           "state reflects the result, reply: Yes\n"
           "Example: if the step needs further instructions, reply: No\n";
    out << "\nPlease judge the completion of the current step.\n"
           "1. Reply with exactly one word: Yes or No.\n";
    return out.str();
}

}  // namespace logidroid
