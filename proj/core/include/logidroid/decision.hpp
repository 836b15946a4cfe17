#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "logidroid/device.hpp"
#include "logidroid/llm.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

struct DecisionOptions {
    int window_size = 2;             // candidate logic steps offered at once
    int attempt_limit = 3;           // consecutive "No" judgments before a skip
    int call_budget_multiplier = 10; // provider-call budget = multiplier * |steps|
};

// ---------------------------------------------------------------------------
// Individual decisions
// ---------------------------------------------------------------------------

struct StepSelection {
    bool no_match = false;
    int index_in_window = -1;  // valid when !no_match
};

// Asks the model which candidate step applies to the current state. The reply
// is an in-window step number or the sentinel "(-1)". An invalid reply gets
// one reparse round with corrective feedback, then raises UnparseableReply.
StepSelection select_step(const std::string& requirement,
                          const std::string& state_description,
                          const std::vector<std::pair<int, LogicStep>>& window_steps,
                          Completer& llm);

// Turns the selected logic step into a concrete instruction. Event and
// existence-assertion steps ask the model for a widget id (one corrective
// round on an invalid reply, then StepFailed); disappearance assertions are
// resolved deterministically through session backtracking, no provider call.
Instruction generate_instruction(const std::string& requirement, int step_number,
                                 const LogicStep& logic_step, const GuiState& state,
                                 const std::vector<std::string>& executed_lines,
                                 DeviceSession& session, Completer& llm);

// Binary completion verdict over the step, its executed instructions, and the
// latest state. Unparseable replies get one feedback round, then count as
// "no".
bool judge_completion(const std::string& requirement, int step_number,
                      const LogicStep& step,
                      const std::vector<std::string>& executed_lines,
                      const GuiState& latest, Completer& llm);

// ---------------------------------------------------------------------------
// Loop
// ---------------------------------------------------------------------------

enum class StepOutcome { pending, completed, skipped, unmatched };

std::string to_string(StepOutcome outcome);

struct DecisionReport {
    std::vector<StepOutcome> outcomes;  // one per logic step
    std::vector<std::pair<int, Instruction>> executed_cmds;  // (0-based step, instruction)
    int provider_calls = 0;
    int iterations = 0;
    bool task_complete = false;

    bool all_completed() const {
        for (const StepOutcome outcome : outcomes)
            if (outcome != StepOutcome::completed) return false;
        return true;
    }
};

// Records one JSON object per loop iteration plus a final task_complete
// record; optionally mirrored to a trace.jsonl file.
class TraceSink {
public:
    TraceSink() = default;
    explicit TraceSink(std::filesystem::path path);

    void write(const nlohmann::json& record);
    const std::vector<nlohmann::json>& records() const { return records_; }

private:
    std::optional<std::filesystem::path> path_;
    std::vector<nlohmann::json> records_;
};

// Runs the perceive-select-generate-execute-judge loop over the business
// logic. The window is anchored at the first unconsumed step and only moves
// forward; a NO_MATCH selection slides it by one, marking passed steps
// unmatched. Total provider calls are hard-capped at
// call_budget_multiplier * |steps|; device failure, provider exhaustion, or
// a spent budget raise SessionAborted.
DecisionReport run_decision_loop(const std::string& requirement, const BusinessLogic& logic,
                                 DeviceSession& session, Completer& llm,
                                 const DecisionOptions& options = {},
                                 TraceSink* trace = nullptr);

}  // namespace logidroid
