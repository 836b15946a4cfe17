#include "logidroid/device.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include "logidroid/errors.hpp"

namespace logidroid {

std::string describe_state(const GuiState& state) {
    std::ostringstream out;
    for (const auto& [id, widget] : state.widgets) {
        out << "widget " << id << ": text='" << widget.text << "' content-desc='"
            << widget.content_desc << "' resource-id='" << widget.resource_id << "' ops=[";
        bool first = true;
        for (ActionKind op : widget.supported_ops) {
            if (!first) out << ", ";
            out << to_string(op);
            first = false;
        }
        out << "]\n";
    }
    return out.str();
}

DeviceSession::DeviceSession(DeviceBackend& backend,
                             std::optional<std::filesystem::path> run_dir)
    : backend_(backend), run_dir_(std::move(run_dir)) {
    if (run_dir_) std::filesystem::create_directories(*run_dir_ / "states");
}

const GuiState& DeviceSession::latest_state() const {
    if (history_.empty()) throw Error("no state perceived yet");
    return history_.back().state;
}

namespace {

std::vector<WidgetDescriptor> describable(const std::vector<WidgetDescriptor>& widgets) {
    std::vector<WidgetDescriptor> out;
    for (const auto& widget : widgets)
        if (widget.has_key_attribute()) out.push_back(widget);
    return out;
}

}  // namespace

const GuiState& DeviceSession::perceive() {
    HierarchyDump dump = backend_.dump_hierarchy();
    std::vector<WidgetDescriptor> visible = describable(dump.widgets);
    if (visible.empty()) {
        // one retry after a settle delay
        std::this_thread::sleep_for(std::chrono::seconds(1));
        dump = backend_.dump_hierarchy();
        visible = describable(dump.widgets);
        if (visible.empty()) throw EmptyScreen("no describable widgets after retry");
    }

    GuiState state;
    state.state_id = next_state_id_++;
    state.widgets = order_widgets(std::move(visible));
    state.description = describe_state(state);

    if (run_dir_) {
        const auto base = *run_dir_ / "states" / std::to_string(state.state_id);
        std::ofstream xml(base.string() + ".xml", std::ios::binary);
        xml << dump.raw;
        if (auto png = backend_.screenshot(); png && !png->empty()) {
            const std::string path = base.string() + ".png";
            std::ofstream shot(path, std::ios::binary);
            shot.write(reinterpret_cast<const char*>(png->data()),
                       static_cast<std::streamsize>(png->size()));
            state.screenshot_ref = path;
        }
    }

    history_.push_back({std::move(state), std::nullopt, std::nullopt});
    return history_.back().state;
}

void DeviceSession::execute(const Instruction& instruction) {
    if (instruction.kind != InstructionKind::event)
        throw Error("execute requires an event instruction");
    if (auto why = validate(instruction)) throw Error("invalid instruction: " + *why);

    const GuiState& latest = latest_state();
    if (instruction.source_state_id != latest.state_id)
        throw StaleWidget("instruction addresses state " +
                          std::to_string(instruction.source_state_id.value_or(-1)) +
                          " but the latest state is " + std::to_string(latest.state_id));
    const WidgetDescriptor* widget = latest.find(*instruction.widget_id);
    if (!widget)
        throw InvalidWidgetId("widget " + std::to_string(*instruction.widget_id) +
                              " does not exist in state " + std::to_string(latest.state_id));
    const ActionKind action = *instruction.action;
    if (action != ActionKind::back && widget->supported_ops.count(action) == 0)
        throw ActionUnsupported("widget " + std::to_string(*instruction.widget_id) +
                                " does not support " + to_string(action));

    backend_.perform(action, *widget, instruction.value);
    if (const auto settle = backend_.post_action_settle(); settle.count() > 0)
        std::this_thread::sleep_for(settle);
    history_.back().instruction = instruction;
}

bool DeviceSession::check_assertion(const Instruction& instruction) {
    if (instruction.kind != InstructionKind::assertion)
        throw Error("check_assertion requires an assertion instruction");
    if (auto why = validate(instruction)) throw Error("invalid instruction: " + *why);

    const GuiState& current = latest_state();
    const WidgetDescriptor& target =
        resolve(*instruction.source_state_id, *instruction.widget_id);
    const WidgetPattern pattern = target.pattern();

    bool found = false;
    for (const auto& [id, widget] : current.widgets) {
        if (widgets_match(pattern, widget.pattern())) {
            found = true;
            break;
        }
    }
    const bool pass = *instruction.condition == Condition::exists ? found : !found;
    history_.back().instruction = instruction;
    history_.back().assertion_passed = pass;
    return pass;
}

BacktrackHit DeviceSession::backtrack_widget(const WidgetPattern& target) const {
    if (history_.empty()) throw AssertionTargetUnresolved("session has no history");
    for (auto it = std::next(history_.rbegin()); it != history_.rend(); ++it)
        for (const auto& [id, widget] : it->state.widgets)
            if (widgets_match(target, widget.pattern()))
                return {it->state.state_id, id, widget};
    throw AssertionTargetUnresolved("no historical state contains the target widget");
}

BacktrackHit DeviceSession::backtrack_widget(const std::string& phrase) const {
    if (history_.empty()) throw AssertionTargetUnresolved("session has no history");
    for (auto it = std::next(history_.rbegin()); it != history_.rend(); ++it)
        for (const auto& [id, widget] : it->state.widgets)
            if (widget_matches_phrase(widget.pattern(), phrase))
                return {it->state.state_id, id, widget};
    throw AssertionTargetUnresolved("no historical state contains \"" + phrase + "\"");
}

const WidgetDescriptor& DeviceSession::resolve(int state_id, int widget_id) const {
    for (const auto& entry : history_) {
        if (entry.state.state_id != state_id) continue;
        const WidgetDescriptor* widget = entry.state.find(widget_id);
        if (!widget)
            throw AssertionTargetUnresolved("widget " + std::to_string(widget_id) +
                                            " not in state " + std::to_string(state_id));
        return *widget;
    }
    throw AssertionTargetUnresolved("state " + std::to_string(state_id) + " not in history");
}

TestCase DeviceSession::synthesize_case(const std::string& app_id,
                                        const std::string& category) const {
    TestCase out{app_id, category, {}};
    for (const auto& entry : history_) {
        if (!entry.instruction) continue;
        const Instruction& instruction = *entry.instruction;
        if (instruction.kind == InstructionKind::event) {
            if (instruction.action == ActionKind::back) continue;  // recovery only
            const WidgetDescriptor& widget =
                resolve(*instruction.source_state_id, *instruction.widget_id);
            TestStep step;
            step.kind = StepKind::event;
            step.widget = widget.pattern();
            step.action = instruction.action;
            step.value = instruction.value;
            out.steps.push_back(std::move(step));
        } else if (instruction.kind == InstructionKind::assertion) {
            const WidgetDescriptor& widget =
                resolve(*instruction.source_state_id, *instruction.widget_id);
            TestStep step;
            step.kind = StepKind::assertion;
            step.widget = widget.pattern();
            step.condition = instruction.condition;
            out.steps.push_back(std::move(step));
        }
    }
    if (out.steps.empty()) throw EmptySession("session recorded no events or assertions");
    return out;
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

namespace {

const IndexedWidget* find_match(const GuiState& state, const WidgetPattern& pattern) {
    for (const auto& indexed : state.widgets)
        if (widgets_match(pattern, indexed.widget.pattern())) return &indexed;
    return nullptr;
}

}  // namespace

ReplayResult replay_case(const TestCase& test_case, DeviceBackend& backend,
                         std::optional<std::filesystem::path> run_dir) {
    DeviceSession session(backend, std::move(run_dir));
    ReplayResult result;
    session.perceive();

    for (std::size_t i = 0; i < test_case.steps.size(); ++i) {
        const TestStep& step = test_case.steps[i];
        const GuiState& current = session.latest_state();

        if (step.kind == StepKind::event) {
            const IndexedWidget* match = find_match(current, step.widget);
            if (!match)
                throw Error("replay: no widget matches step " + std::to_string(i + 1));
            Instruction instruction;
            instruction.kind = InstructionKind::event;
            instruction.widget_id = match->id;
            instruction.action = step.action;
            instruction.value = step.value;
            instruction.source_state_id = current.state_id;
            session.execute(instruction);
            ++result.events_executed;
        } else if (*step.condition == Condition::exists) {
            const IndexedWidget* match = find_match(current, step.widget);
            bool pass = false;
            if (match) {
                Instruction instruction;
                instruction.kind = InstructionKind::assertion;
                instruction.widget_id = match->id;
                instruction.condition = Condition::exists;
                instruction.source_state_id = current.state_id;
                pass = session.check_assertion(instruction);
            }
            result.assertion_verdicts.emplace_back(static_cast<int>(i), pass);
        } else {
            const BacktrackHit hit = session.backtrack_widget(step.widget);
            Instruction instruction;
            instruction.kind = InstructionKind::assertion;
            instruction.widget_id = hit.widget_id;
            instruction.condition = Condition::not_exists;
            instruction.source_state_id = hit.state_id;
            result.assertion_verdicts.emplace_back(static_cast<int>(i),
                                                   session.check_assertion(instruction));
        }
        session.perceive();
    }
    return result;
}

}  // namespace logidroid
