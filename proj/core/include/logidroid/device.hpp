#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "logidroid/model.hpp"

namespace logidroid {

struct HierarchyDump {
    std::vector<WidgetDescriptor> widgets;  // backend traversal order, unfiltered
    std::string raw;                        // verbatim backend output, kept for audit
};

// Interface to the device under test. dump_hierarchy after perform reflects
// the post-action screen; perform on a widget absent from the latest dump is
// rejected by the backend.
class DeviceBackend {
public:
    virtual ~DeviceBackend() = default;

    virtual HierarchyDump dump_hierarchy() = 0;
    virtual std::optional<std::vector<std::uint8_t>> screenshot() = 0;
    virtual void perform(ActionKind action, const WidgetDescriptor& target,
                         const std::optional<std::string>& text) = 0;
    virtual std::string current_app() = 0;

    // Settle delay applied after each performed action (0 on the simulator).
    virtual std::chrono::milliseconds post_action_settle() const {
        return std::chrono::milliseconds(0);
    }
};

// One line per widget, in widget-id order:
//   widget <id>: text='<t>' content-desc='<cd>' resource-id='<r>' ops=[...]
// Empty attributes render as empty quotes. Deterministic.
std::string describe_state(const GuiState& state);

// Where a backtracked widget was found.
struct BacktrackHit {
    int state_id = 0;
    int widget_id = 0;
    WidgetDescriptor widget;
};

struct HistoryEntry {
    GuiState state;
    std::optional<Instruction> instruction;  // what ran from this state, if anything
    std::optional<bool> assertion_passed;    // verdict when the instruction asserted
};

// Owns one backend for the duration of a test session: perceives states,
// executes instructions, checks assertions, and keeps the append-only history
// that supports backtracking and case synthesis. When a run directory is
// given, each perceived state's raw hierarchy dump is stored under
// states/<id>.xml and its screenshot (if the backend provides one) under
// states/<id>.png.
class DeviceSession {
public:
    explicit DeviceSession(DeviceBackend& backend,
                           std::optional<std::filesystem::path> run_dir = std::nullopt);

    // Dumps the hierarchy, keeps widgets with at least one non-empty key
    // attribute, orders them spatially, renders the description, and appends
    // the state to history. A screen with zero describable widgets is retried
    // once after a settle delay, then raises EmptyScreen.
    const GuiState& perceive();

    // Executes an event instruction against the latest state. Raises
    // StaleWidget when the instruction addresses an older state and
    // ActionUnsupported when the widget does not support the action
    // (`back` bypasses the capability check: it is a global key).
    void execute(const Instruction& instruction);

    // Verifies an assertion instruction against the latest state; the target
    // descriptor is resolved from the instruction's source state. Records the
    // verdict in history and returns it.
    bool check_assertion(const Instruction& instruction);

    // Scans history newest-to-oldest, skipping the current state, for the
    // first widget matching the target. Raises AssertionTargetUnresolved.
    BacktrackHit backtrack_widget(const WidgetPattern& target) const;
    BacktrackHit backtrack_widget(const std::string& phrase) const;

    // Emits one test step per executed event and per checked assertion, in
    // execution order. `back` events are excluded. Raises EmptySession when
    // nothing remains.
    TestCase synthesize_case(const std::string& app_id, const std::string& category) const;

    const std::vector<HistoryEntry>& history() const { return history_; }
    const GuiState& latest_state() const;
    DeviceBackend& backend() { return backend_; }

private:
    const WidgetDescriptor& resolve(int state_id, int widget_id) const;

    DeviceBackend& backend_;
    std::optional<std::filesystem::path> run_dir_;
    std::vector<HistoryEntry> history_;
    int next_state_id_ = 1;
};

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

struct ReplayResult {
    int events_executed = 0;
    std::vector<std::pair<int, bool>> assertion_verdicts;  // (0-based step index, pass)

    bool all_assertions_passed() const {
        for (const auto& [index, pass] : assertion_verdicts)
            if (!pass) return false;
        return true;
    }
};

// Replays a synthesized case step by step on a fresh session over `backend`.
// Events resolve their widget by the one-attribute match rule; exists
// assertions check the current state; disappearance assertions resolve their
// target by backtracking. Raises Error when an event widget cannot be found.
ReplayResult replay_case(const TestCase& test_case, DeviceBackend& backend,
                         std::optional<std::filesystem::path> run_dir = std::nullopt);

}  // namespace logidroid
