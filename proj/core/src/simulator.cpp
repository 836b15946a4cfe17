#include "logidroid/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "logidroid/errors.hpp"

namespace logidroid {

// ---------------------------------------------------------------------------
// Model loading
// ---------------------------------------------------------------------------

SimulatedApp SimulatedApp::from_json(const nlohmann::json& j) {
    SimulatedApp app;
    app.app_id = j.at("app_id").get<std::string>();
    app.initial = j.at("initial").get<std::string>();
    for (const auto& [name, widgets] : j.at("states").items())
        app.states[name] = widgets.get<std::vector<WidgetDescriptor>>();
    for (const auto& t : j.value("transitions", nlohmann::json::array())) {
        Transition transition;
        transition.from = t.at("from").get<std::string>();
        transition.to = t.at("to").get<std::string>();
        const auto& on = t.at("on");
        transition.selector = on.at("widget").get<WidgetPattern>();
        const auto action = action_from_string(on.at("action").get<std::string>());
        if (!action)
            throw InvalidAppModel("unknown action in transition: " +
                                  on.at("action").get<std::string>());
        transition.action = *action;
        if (on.contains("value")) transition.value = on.at("value").get<std::string>();
        if (t.contains("effects")) {
            const auto& effects = t.at("effects");
            if (effects.contains("remove"))
                transition.removes = effects.at("remove").get<std::vector<WidgetPattern>>();
            if (effects.contains("add"))
                transition.adds = effects.at("add").get<std::vector<WidgetDescriptor>>();
        }
        app.transitions.push_back(std::move(transition));
    }
    app.check();
    return app;
}

SimulatedApp SimulatedApp::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidAppModel("cannot open app model: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidAppModel("app model is not valid JSON: " + std::string(e.what()));
    }
    return from_json(j);
}

nlohmann::json SimulatedApp::to_json() const {
    nlohmann::json states_json = nlohmann::json::object();
    for (const auto& [name, widgets] : states) states_json[name] = widgets;
    nlohmann::json transitions_json = nlohmann::json::array();
    for (const auto& t : transitions) {
        nlohmann::json on{{"widget", t.selector}, {"action", to_string(t.action)}};
        if (t.value) on["value"] = *t.value;
        nlohmann::json item{{"from", t.from}, {"on", std::move(on)}, {"to", t.to}};
        if (!t.removes.empty() || !t.adds.empty())
            item["effects"] = nlohmann::json{{"remove", t.removes}, {"add", t.adds}};
        transitions_json.push_back(std::move(item));
    }
    return nlohmann::json{{"app_id", app_id},
                          {"initial", initial},
                          {"states", std::move(states_json)},
                          {"transitions", std::move(transitions_json)}};
}

bool selector_matches(const WidgetPattern& selector, const WidgetPattern& widget) {
    if (selector.empty()) return false;
    const WidgetPattern s = canonicalize(selector);
    const WidgetPattern w = canonicalize(widget);
    if (!s.text.empty() && s.text != w.text) return false;
    if (!s.content_desc.empty() && s.content_desc != w.content_desc) return false;
    if (!s.resource_id.empty() && s.resource_id != w.resource_id) return false;
    return true;
}

void SimulatedApp::check() const {
    if (!states.count(initial)) throw InvalidAppModel("initial state missing: " + initial);
    // attribute-less widgets are legal here; perception filters them out
    for (const auto& [name, widgets] : states)
        for (const auto& widget : widgets)
            if (!widget.bounds.well_formed())
                throw InvalidAppModel("state " + name + ": widget bounds are inverted");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const Transition& t = transitions[i];
        const std::string where = "transition " + std::to_string(i + 1);
        if (!states.count(t.from)) throw InvalidAppModel(where + ": unknown state " + t.from);
        if (!states.count(t.to)) throw InvalidAppModel(where + ": unknown state " + t.to);
        const auto& widgets = states.at(t.from);
        const bool resolves = std::any_of(widgets.begin(), widgets.end(), [&](const auto& w) {
            return selector_matches(t.selector, w.pattern());
        });
        if (!resolves)
            throw InvalidAppModel(where + ": selector matches no widget in " + t.from);
    }
}

// ---------------------------------------------------------------------------
// Backend
// ---------------------------------------------------------------------------

SimulatorBackend::SimulatorBackend(SimulatedApp app) : app_(std::move(app)) {
    app_.check();
    reset();
}

void SimulatorBackend::reset() {
    state_ = app_.initial;
    widgets_ = app_.states.at(state_);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

const char* widget_class(const WidgetDescriptor& widget) {
    if (widget.supported_ops.count(ActionKind::edit)) return "android.widget.EditText";
    if (widget.supported_ops.count(ActionKind::click)) return "android.widget.Button";
    return "android.view.View";
}

bool scrollable(const WidgetDescriptor& widget) {
    return widget.supported_ops.count(ActionKind::swipe_left) ||
           widget.supported_ops.count(ActionKind::swipe_right) ||
           widget.supported_ops.count(ActionKind::swipe_up) ||
           widget.supported_ops.count(ActionKind::swipe_down);
}

}  // namespace

HierarchyDump SimulatorBackend::dump_hierarchy() {
    std::ostringstream xml;
    xml << "<?xml version='1.0' encoding='UTF-8' standalone='yes' ?>\n";
    xml << "<hierarchy rotation=\"0\">\n";
    for (std::size_t i = 0; i < widgets_.size(); ++i) {
        const WidgetDescriptor& w = widgets_[i];
        xml << "  <node index=\"" << i << "\" text=\"" << xml_escape(w.text)
            << "\" resource-id=\"" << xml_escape(w.resource_id) << "\" class=\""
            << widget_class(w) << "\" package=\"" << xml_escape(app_.app_id)
            << "\" content-desc=\"" << xml_escape(w.content_desc) << "\" clickable=\""
            << (w.supported_ops.count(ActionKind::click) ? "true" : "false")
            << "\" scrollable=\"" << (scrollable(w) ? "true" : "false")
            << "\" long-clickable=\"false\" bounds=\"[" << w.bounds.left << ","
            << w.bounds.top << "][" << w.bounds.right << "," << w.bounds.bottom
            << "]\" />\n";
    }
    xml << "</hierarchy>\n";
    return {widgets_, xml.str()};
}

void SimulatorBackend::perform(ActionKind action, const WidgetDescriptor& target,
                               const std::optional<std::string>& text) {
    const auto it = std::find(widgets_.begin(), widgets_.end(), target);
    if (it == widgets_.end() && action != ActionKind::back)
        throw StaleWidget("target widget is not on the current screen");

    for (const Transition& t : app_.transitions) {
        if (t.from != state_ || t.action != action) continue;
        if (!selector_matches(t.selector, target.pattern())) continue;
        if (t.value && (!text || *text != *t.value)) continue;

        state_ = t.to;
        widgets_ = app_.states.at(state_);
        for (const WidgetPattern& pattern : t.removes)
            widgets_.erase(std::remove_if(widgets_.begin(), widgets_.end(),
                                          [&](const WidgetDescriptor& w) {
                                              return selector_matches(pattern, w.pattern());
                                          }),
                           widgets_.end());
        for (const WidgetDescriptor& w : t.adds) widgets_.push_back(w);
        return;
    }

    // No transition fired: edits update the widget in place, the rest are
    // no-ops on the model.
    if (action == ActionKind::edit && text && it != widgets_.end()) it->text = *text;
}

}  // namespace logidroid
