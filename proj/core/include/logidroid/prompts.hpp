#pragma once

#include <string>
#include <utility>
#include <vector>

#include "logidroid/llm.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

// Prompt assembly for the five roles. Every prompt is a pure function of its
// context and follows the same four-part layout: Task Definition, Input
// Object, Demonstration Case, Acceptance Criteria. Incomplete context raises
// MissingContextField.

// "Step k: (Event) Click a widget "add button"" / "... with "value"" /
// "Step k: (Assertion) Identify a widget "item" [not] in the state".
std::string render_step_line(int number, const TestStep& step);

// "Step k: <phrase>" for a grammar-conforming logic phrase.
std::string render_logic_line(int number, const LogicStep& step);

// Numbered step lines for a whole case, newline-separated.
std::string render_case_lines(const TestCase& test_case);

// "widget=3 action=click value="x"" for events, "widget=3 assert=exists"
// for assertions. Used in executed-instruction listings.
std::string instruction_line(const Instruction& instruction);

// Prompt verb for an action (Click, Edit, Swipe right, ...).
std::string action_verb(ActionKind action);

std::string render_summary_prompt(const TestCase& test_case, const std::string& category);

std::string render_fusion_prompt(const std::string& requirement, const std::string& category,
                                 const std::vector<TestCase>& related);

// Candidates carry their 1-based step numbers within the whole logic.
std::string render_step_selection_prompt(
    const std::string& requirement,
    const std::vector<std::pair<int, LogicStep>>& candidates,
    const std::string& state_description);

std::string render_instruction_prompt(const std::string& requirement, int step_number,
                                      const LogicStep& step,
                                      const std::vector<std::string>& executed_lines,
                                      const std::string& state_description);

std::string render_completion_prompt(const std::string& requirement, int step_number,
                                     const LogicStep& step,
                                     const std::vector<std::string>& executed_lines,
                                     const std::string& state_description);

}  // namespace logidroid
