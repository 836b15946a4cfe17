#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logidroid/device.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

// One transition of a simulated app: performing `action` on a widget matched
// by `selector` in state `from` (with the exact input `value`, when given)
// moves the app to state `to` and applies the widget effects.
struct Transition {
    std::string from;
    WidgetPattern selector;
    ActionKind action = ActionKind::click;
    std::optional<std::string> value;
    std::string to;
    std::vector<WidgetPattern> removes;
    std::vector<WidgetDescriptor> adds;
};

// Deterministic finite-state app model used as the default backend in tests
// and CI. Loaded from JSON:
//   {"app_id": ..., "initial": ..., "states": {"S1": [<widget>...]},
//    "transitions": [{"from":..., "on": {"widget": {...}, "action": ...,
//    "value"?: ...}, "to":..., "effects"?: {"remove": [...], "add": [...]}}]}
struct SimulatedApp {
    std::string app_id;
    std::string initial;
    std::map<std::string, std::vector<WidgetDescriptor>> states;
    std::vector<Transition> transitions;

    static SimulatedApp from_json(const nlohmann::json& j);
    static SimulatedApp from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    // Throws InvalidAppModel: the initial state must exist, every transition
    // endpoint must exist, and every selector must resolve to at least one
    // widget in its `from` state.
    void check() const;
};

// True when every non-empty selector attribute canonically equals the
// widget's corresponding attribute.
bool selector_matches(const WidgetPattern& selector, const WidgetPattern& widget);

class SimulatorBackend final : public DeviceBackend {
public:
    explicit SimulatorBackend(SimulatedApp app);

    HierarchyDump dump_hierarchy() override;
    std::optional<std::vector<std::uint8_t>> screenshot() override { return std::nullopt; }
    void perform(ActionKind action, const WidgetDescriptor& target,
                 const std::optional<std::string>& text) override;
    std::string current_app() override { return app_.app_id; }

    const std::string& state_name() const { return state_; }
    void reset();

private:
    SimulatedApp app_;
    std::string state_;
    std::vector<WidgetDescriptor> widgets_;  // live widget list of the current state
};

}  // namespace logidroid
