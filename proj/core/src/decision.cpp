#include "logidroid/decision.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "logidroid/errors.hpp"
#include "logidroid/fusion.hpp"
#include "logidroid/prompts.hpp"

namespace logidroid {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::optional<int> first_integer(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) continue;
        const bool negative = i > 0 && s[i - 1] == '-';
        std::size_t end = i;
        while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
        const int value = std::stoi(s.substr(i, end - i));
        return negative ? -value : value;
    }
    return std::nullopt;
}

// Integer following a keyword such as "widget"; falls back to the first
// integer in the reply.
std::optional<int> integer_after(const std::string& s, const std::string& keyword) {
    const auto pos = s.find(keyword);
    if (pos != std::string::npos) {
        if (auto value = first_integer(s.substr(pos + keyword.size()))) return value;
    }
    return first_integer(s);
}

std::string lowered(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

std::optional<std::string> quoted_after(const std::string& s, const std::string& keyword) {
    auto start = s.find(keyword);
    start = start == std::string::npos ? 0 : start + keyword.size();
    const auto open = s.find('"', start);
    if (open == std::string::npos) return std::nullopt;
    const auto close = s.find('"', open + 1);
    if (close == std::string::npos) return std::nullopt;
    return s.substr(open + 1, close - open - 1);
}

std::optional<ActionKind> action_token_after(const std::string& reply) {
    const std::string low = lowered(reply);
    auto pos = low.find("action");
    if (pos == std::string::npos) return std::nullopt;
    pos += 6;
    while (pos < low.size() && !std::isalpha(static_cast<unsigned char>(low[pos]))) ++pos;
    std::size_t end = pos;
    while (end < low.size() &&
           (std::isalpha(static_cast<unsigned char>(low[end])) || low[end] == '_'))
        ++end;
    std::string token = low.substr(pos, end - pos);
    if (auto action = action_from_string(token)) return action;
    if (token == "tap") return ActionKind::click;
    if (token == "type" || token == "enter") return ActionKind::edit;
    if (token == "swipe") {
        // direction may follow as a separate word
        std::size_t next = end;
        while (next < low.size() && !std::isalpha(static_cast<unsigned char>(low[next])))
            ++next;
        std::size_t next_end = next;
        while (next_end < low.size() && std::isalpha(static_cast<unsigned char>(low[next_end])))
            ++next_end;
        const std::string direction = low.substr(next, next_end - next);
        if (direction == "left") return ActionKind::swipe_left;
        if (direction == "right") return ActionKind::swipe_right;
        if (direction == "up") return ActionKind::swipe_up;
        if (direction == "down") return ActionKind::swipe_down;
    }
    return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Step selection
// ---------------------------------------------------------------------------

StepSelection select_step(const std::string& requirement,
                          const std::string& state_description,
                          const std::vector<std::pair<int, LogicStep>>& window_steps,
                          Completer& llm) {
    const std::string base =
        render_step_selection_prompt(requirement, window_steps, state_description);
    std::string prompt = base;
    std::string last_reply;
    for (int round = 0; round < 2; ++round) {
        last_reply = trimmed(llm.complete(PromptRole::step_selection, prompt));
        if (last_reply.find("(-1)") != std::string::npos) return {true, -1};
        if (const auto number = first_integer(last_reply)) {
            if (*number == -1) return {true, -1};
            for (std::size_t i = 0; i < window_steps.size(); ++i)
                if (window_steps[i].first == *number)
                    return {false, static_cast<int>(i)};
        }
        prompt = base + "\nFeedback: your previous reply \"" + last_reply +
                 "\" is not a listed step number. Reply with one of the listed step "
                 "numbers in the form \"Step k\", or \"(-1)\" if no step applies.\n";
    }
    throw UnparseableReply("step selection reply \"" + last_reply +
                           "\" is neither a candidate step number nor (-1)");
}

// ---------------------------------------------------------------------------
// Instruction generation
// ---------------------------------------------------------------------------

namespace {

Instruction parse_instruction_reply(const std::string& reply, const ParsedLogicStep& step,
                                    const GuiState& state) {
    const auto widget_id = integer_after(lowered(reply), "widget");
    if (!widget_id) throw UnparseableReply("reply names no widget id: " + reply);
    if (!state.find(*widget_id))
        throw InvalidWidgetId("widget " + std::to_string(*widget_id) +
                              " is not in the current state");

    Instruction instruction;
    instruction.widget_id = *widget_id;
    instruction.source_state_id = state.state_id;

    if (step.kind == StepKind::assertion) {
        instruction.kind = InstructionKind::assertion;
        instruction.condition = step.condition.value_or(Condition::exists);
        return instruction;
    }

    instruction.kind = InstructionKind::event;
    const auto action = action_token_after(reply);
    if (!action) throw UnparseableReply("reply names no action: " + reply);
    instruction.action = *action;
    if (*action == ActionKind::edit) {
        if (auto value = quoted_after(reply, "value"))
            instruction.value = *value;
        else if (step.value)
            instruction.value = *step.value;  // fall back to the logic step's input
        else
            throw UnparseableReply("edit instruction carries no value: " + reply);
    }
    return instruction;
}

}  // namespace

Instruction generate_instruction(const std::string& requirement, int step_number,
                                 const LogicStep& logic_step, const GuiState& state,
                                 const std::vector<std::string>& executed_lines,
                                 DeviceSession& session, Completer& llm) {
    const auto parsed = parse_logic_phrase(logic_step.phrase);
    if (!parsed) throw Error("logic step does not parse: " + logic_step.phrase);

    if (parsed->kind == StepKind::assertion && parsed->condition == Condition::not_exists) {
        // The target is absent from the visible state, so asking the model
        // would invite hallucination; resolve it from history instead.
        for (const std::string& candidate : widget_candidates(parsed->widget_slot)) {
            try {
                const BacktrackHit hit = session.backtrack_widget(candidate);
                Instruction instruction;
                instruction.kind = InstructionKind::assertion;
                instruction.widget_id = hit.widget_id;
                instruction.condition = Condition::not_exists;
                instruction.source_state_id = hit.state_id;
                return instruction;
            } catch (const AssertionTargetUnresolved&) {
            }
        }
        throw AssertionTargetUnresolved("no historical state contains " +
                                        parsed->widget_slot);
    }

    const std::string base = render_instruction_prompt(requirement, step_number, logic_step,
                                                       executed_lines, state.description);
    std::string prompt = base;
    std::string problem;
    for (int round = 0; round < 2; ++round) {
        const std::string reply = llm.complete(PromptRole::instruction_generation, prompt);
        try {
            return parse_instruction_reply(reply, *parsed, state);
        } catch (const InvalidWidgetId& e) {
            problem = e.what();
        } catch (const UnparseableReply& e) {
            problem = e.what();
        }
        prompt = base + "\nFeedback: your previous reply was invalid (" + problem +
                 "). Follow the reply format exactly and use a widget id from the "
                 "current state.\n";
    }
    throw StepFailed("no valid instruction for step " + std::to_string(step_number) + ": " +
                     problem);
}

// ---------------------------------------------------------------------------
// Completion judgment
// ---------------------------------------------------------------------------

namespace {

std::optional<bool> parse_verdict(const std::string& reply) {
    std::string token;
    for (char c : trimmed(reply)) {
        if (std::isalpha(static_cast<unsigned char>(c)))
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (!token.empty())
            break;
    }
    if (token == "yes") return true;
    if (token == "no") return false;
    return std::nullopt;
}

}  // namespace

bool judge_completion(const std::string& requirement, int step_number, const LogicStep& step,
                      const std::vector<std::string>& executed_lines,
                      const GuiState& latest, Completer& llm) {
    const std::string base = render_completion_prompt(requirement, step_number, step,
                                                      executed_lines, latest.description);
    std::string prompt = base;
    for (int round = 0; round < 2; ++round) {
        const std::string reply = llm.complete(PromptRole::completion_judgment, prompt);
        if (const auto verdict = parse_verdict(reply)) return *verdict;
        prompt = base + "\nFeedback: your previous reply \"" + trimmed(reply) +
                 "\" is not a valid verdict. Reply with exactly one word: Yes or No.\n";
    }
    return false;  // conservative: stay on the current step
}

// ---------------------------------------------------------------------------
// Loop
// ---------------------------------------------------------------------------

std::string to_string(StepOutcome outcome) {
    switch (outcome) {
        case StepOutcome::pending: return "pending";
        case StepOutcome::completed: return "completed";
        case StepOutcome::skipped: return "skipped";
        case StepOutcome::unmatched: return "unmatched";
    }
    return "pending";
}

TraceSink::TraceSink(std::filesystem::path path) : path_(std::move(path)) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream(*path_, std::ios::trunc).flush();
}

void TraceSink::write(const nlohmann::json& record) {
    records_.push_back(record);
    if (path_) {
        std::ofstream out(*path_, std::ios::app);
        out << record.dump() << '\n';
    }
}

DecisionReport run_decision_loop(const std::string& requirement, const BusinessLogic& logic,
                                 DeviceSession& session, Completer& llm,
                                 const DecisionOptions& options, TraceSink* trace) {
    if (options.window_size < 1) throw Error("window_size must be >= 1");
    if (options.attempt_limit < 1) throw Error("attempt_limit must be >= 1");

    const int step_count = static_cast<int>(logic.steps.size());
    DecisionReport report;
    report.outcomes.assign(step_count, StepOutcome::pending);
    BudgetedCompleter budget(llm, options.call_budget_multiplier * step_count);

    const auto first_pending = [&]() {
        for (int i = 0; i < step_count; ++i)
            if (report.outcomes[i] == StepOutcome::pending) return i;
        return step_count;
    };

    int window_start = 0;
    int current_step = -1;
    bool is_completed = true;  // forces a selection on the first iteration
    int attempts = 0;
    int iteration = 0;

    try {
        if (session.history().empty()) session.perceive();

        while (first_pending() < step_count && window_start < step_count) {
            ++iteration;
            nlohmann::json record{{"iter", iteration}, {"window_start", window_start}};

            if (is_completed) {
                std::vector<std::pair<int, LogicStep>> candidates;
                nlohmann::json candidate_numbers = nlohmann::json::array();
                const int window_end = std::min(window_start + options.window_size, step_count);
                for (int i = window_start; i < window_end; ++i) {
                    if (report.outcomes[i] != StepOutcome::pending) continue;
                    candidates.emplace_back(i + 1, logic.steps[i]);
                    candidate_numbers.push_back(i + 1);
                }
                record["candidates"] = candidate_numbers;

                const StepSelection selection = select_step(
                    requirement, session.latest_state().description, candidates, budget);
                if (selection.no_match) {
                    record["selected"] = -1;
                    window_start += 1;
                    nlohmann::json newly_unmatched = nlohmann::json::array();
                    for (int i = 0; i < window_start && i < step_count; ++i) {
                        if (report.outcomes[i] != StepOutcome::pending) continue;
                        report.outcomes[i] = StepOutcome::unmatched;
                        newly_unmatched.push_back(i + 1);
                    }
                    record["unmatched"] = newly_unmatched;
                    record["outcome"] = "slide";
                    if (trace) trace->write(record);
                    continue;
                }
                current_step = candidates[selection.index_in_window].first - 1;
                record["selected"] = current_step + 1;
                is_completed = false;
                attempts = 0;
            }

            record["step"] = current_step + 1;
            const LogicStep& step = logic.steps[current_step];

            std::vector<std::string> executed_lines;
            for (const auto& [index, instruction] : report.executed_cmds)
                if (index == current_step)
                    executed_lines.push_back(instruction_line(instruction));

            std::optional<Instruction> instruction;
            std::optional<bool> assertion_verdict;
            std::string failure;
            try {
                instruction =
                    generate_instruction(requirement, current_step + 1, step,
                                         session.latest_state(), executed_lines, session,
                                         budget);
                report.executed_cmds.emplace_back(current_step, *instruction);
                if (instruction->kind == InstructionKind::event)
                    session.execute(*instruction);
                else
                    assertion_verdict = session.check_assertion(*instruction);
            } catch (const StepFailed& e) {
                failure = e.what();
            } catch (const AssertionTargetUnresolved& e) {
                failure = e.what();
            } catch (const ActionUnsupported& e) {
                failure = e.what();
            } catch (const StaleWidget& e) {
                failure = e.what();
            } catch (const InvalidWidgetId& e) {
                failure = e.what();
            }

            if (instruction) record["instruction"] = *instruction;
            if (assertion_verdict) record["assertion"] = *assertion_verdict ? "pass" : "fail";

            session.perceive();

            bool done = false;
            if (failure.empty()) {
                std::vector<std::string> judged_lines = executed_lines;
                std::string line = instruction_line(*instruction);
                if (assertion_verdict) line += *assertion_verdict ? " -> pass" : " -> fail";
                judged_lines.push_back(std::move(line));
                done = judge_completion(requirement, current_step + 1, step, judged_lines,
                                        session.latest_state(), budget);
            } else {
                record["error"] = failure;
            }
            record["judgment"] = done ? "yes" : "no";

            if (done) {
                report.outcomes[current_step] = StepOutcome::completed;
                is_completed = true;
                attempts = 0;
                record["attempts"] = 0;
                record["outcome"] = "completed";
                window_start = std::max(window_start, first_pending());
            } else {
                ++attempts;
                record["attempts"] = attempts;
                if (attempts >= options.attempt_limit) {
                    report.outcomes[current_step] = StepOutcome::skipped;
                    is_completed = true;
                    attempts = 0;
                    record["outcome"] = "skipped";
                    window_start = std::max(window_start, first_pending());
                } else {
                    record["outcome"] = "in_progress";
                }
            }
            if (trace) trace->write(record);
        }
    } catch (const SessionAborted&) {
        throw;
    } catch (const ScriptExhausted& e) {
        throw SessionAborted(std::string("provider exhausted: ") + e.what());
    } catch (const ProviderUnavailable& e) {
        throw SessionAborted(std::string("provider unavailable: ") + e.what());
    } catch (const UnparseableReply& e) {
        throw SessionAborted(std::string("unusable provider replies: ") + e.what());
    } catch (const BackendUnavailable& e) {
        throw SessionAborted(std::string("device failure: ") + e.what());
    } catch (const EmptyScreen& e) {
        throw SessionAborted(std::string("device failure: ") + e.what());
    }

    report.task_complete = true;
    report.iterations = iteration;
    report.provider_calls = budget.used();

    if (trace) {
        nlohmann::json completed = nlohmann::json::array();
        nlohmann::json skipped = nlohmann::json::array();
        nlohmann::json unmatched = nlohmann::json::array();
        for (int i = 0; i < step_count; ++i) {
            switch (report.outcomes[i]) {
                case StepOutcome::completed: completed.push_back(i + 1); break;
                case StepOutcome::skipped: skipped.push_back(i + 1); break;
                case StepOutcome::unmatched: unmatched.push_back(i + 1); break;
                case StepOutcome::pending: break;
            }
        }
        trace->write({{"task_complete", true},
                      {"completed", completed},
                      {"skipped", skipped},
                      {"unmatched", unmatched}});
    }
    return report;
}

}  // namespace logidroid
