#include "logidroid/adb.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>

#include "logidroid/errors.hpp"

namespace logidroid {

// ---------------------------------------------------------------------------
// uiautomator dump parsing
// ---------------------------------------------------------------------------

namespace {

std::string xml_unescape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        const auto end = s.find(';', i);
        if (end == std::string::npos) {
            out.push_back(s[i++]);
            continue;
        }
        const std::string entity = s.substr(i + 1, end - i - 1);
        if (entity == "amp")
            out.push_back('&');
        else if (entity == "lt")
            out.push_back('<');
        else if (entity == "gt")
            out.push_back('>');
        else if (entity == "quot")
            out.push_back('"');
        else if (entity == "apos")
            out.push_back('\'');
        else if (!entity.empty() && entity[0] == '#')
            out.push_back(static_cast<char>(std::stoi(entity.substr(1))));
        else
            out.append(s, i, end - i + 1);
        i = end + 1;
    }
    return out;
}

// Attributes of one <node ...> element, raw values unescaped.
std::map<std::string, std::string> parse_attributes(const std::string& xml,
                                                    std::size_t& pos) {
    std::map<std::string, std::string> attrs;
    while (pos < xml.size()) {
        while (pos < xml.size() && std::isspace(static_cast<unsigned char>(xml[pos]))) ++pos;
        if (pos >= xml.size() || xml[pos] == '>' || xml[pos] == '/') break;
        std::string name;
        while (pos < xml.size() && xml[pos] != '=' && xml[pos] != '>' &&
               !std::isspace(static_cast<unsigned char>(xml[pos])))
            name.push_back(xml[pos++]);
        while (pos < xml.size() && std::isspace(static_cast<unsigned char>(xml[pos]))) ++pos;
        if (pos >= xml.size() || xml[pos] != '=') break;
        ++pos;  // '='
        while (pos < xml.size() && std::isspace(static_cast<unsigned char>(xml[pos]))) ++pos;
        if (pos >= xml.size() || (xml[pos] != '"' && xml[pos] != '\'')) break;
        const char quote = xml[pos++];
        std::string value;
        while (pos < xml.size() && xml[pos] != quote) value.push_back(xml[pos++]);
        if (pos < xml.size()) ++pos;  // closing quote
        attrs[name] = xml_unescape(value);
    }
    return attrs;
}

Rect parse_bounds(const std::string& s) {
    // "[l,t][r,b]"
    Rect rect;
    int values[4] = {0, 0, 0, 0};
    int index = 0;
    std::size_t i = 0;
    while (i < s.size() && index < 4) {
        if (s[i] == '-' || std::isdigit(static_cast<unsigned char>(s[i]))) {
            std::size_t end = i + 1;
            while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
            values[index++] = std::stoi(s.substr(i, end - i));
            i = end;
        } else {
            ++i;
        }
    }
    rect = {values[0], values[1], values[2], values[3]};
    return rect;
}

}  // namespace

std::vector<WidgetDescriptor> parse_uiautomator_dump(const std::string& xml) {
    std::vector<WidgetDescriptor> widgets;
    std::size_t pos = 0;
    while ((pos = xml.find("<node", pos)) != std::string::npos) {
        pos += 5;
        auto attrs = parse_attributes(xml, pos);
        WidgetDescriptor widget;
        widget.text = attrs["text"];
        widget.resource_id = attrs["resource-id"];
        widget.content_desc = attrs["content-desc"];
        widget.bounds = parse_bounds(attrs["bounds"]);

        const std::string& cls = attrs["class"];
        if (attrs["clickable"] == "true") widget.supported_ops.insert(ActionKind::click);
        if (cls.find("EditText") != std::string::npos) {
            widget.supported_ops.insert(ActionKind::edit);
            widget.supported_ops.insert(ActionKind::click);
        }
        if (attrs["scrollable"] == "true") {
            widget.supported_ops.insert(ActionKind::swipe_left);
            widget.supported_ops.insert(ActionKind::swipe_right);
            widget.supported_ops.insert(ActionKind::swipe_up);
            widget.supported_ops.insert(ActionKind::swipe_down);
        }
        widgets.push_back(std::move(widget));
    }
    return widgets;
}

// ---------------------------------------------------------------------------
// adb backend
// ---------------------------------------------------------------------------

AdbBackend::AdbBackend(std::string serial) : serial_(std::move(serial)) {
    if (serial_.empty()) throw BackendUnavailable("adb backend requires a device serial");
}

std::string AdbBackend::run(const std::string& args) const {
    const auto bytes = run_bytes(args);
    return std::string(bytes.begin(), bytes.end());
}

std::vector<std::uint8_t> AdbBackend::run_bytes(const std::string& args) const {
    const std::string command = "adb -s " + serial_ + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) throw BackendUnavailable("cannot spawn adb");
    std::vector<std::uint8_t> out;
    std::uint8_t buffer[4096];
    std::size_t n;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0)
        out.insert(out.end(), buffer, buffer + n);
    const int status = pclose(pipe);
    if (status != 0)
        throw BackendUnavailable("adb " + args + " exited with status " +
                                 std::to_string(status));
    return out;
}

HierarchyDump AdbBackend::dump_hierarchy() {
    run("shell uiautomator dump /sdcard/window_dump.xml");
    const std::string xml = run("shell cat /sdcard/window_dump.xml");
    if (xml.find("<hierarchy") == std::string::npos)
        throw BackendUnavailable("uiautomator dump produced no hierarchy");
    return {parse_uiautomator_dump(xml), xml};
}

std::optional<std::vector<std::uint8_t>> AdbBackend::screenshot() {
    auto bytes = run_bytes("exec-out screencap -p");
    if (bytes.empty()) return std::nullopt;
    return bytes;
}

namespace {

// input-text argument escaping: spaces become %s, shell metacharacters are
// backslash-escaped.
std::string escape_input_text(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == ' ') {
            out += "%s";
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == ',' ||
                   c == '_' || c == '-' || c == ':' || c == '@') {
            out.push_back(c);
        } else {
            out.push_back('\\');
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace

SwipeSegment swipe_segment(const Rect& bounds, ActionKind direction) {
    const int cx = bounds.center_x();
    const int cy = bounds.center_y();
    const int x_low = bounds.left + bounds.width() / 5;
    const int x_high = bounds.left + bounds.width() * 4 / 5;
    const int y_low = bounds.top + bounds.height() / 5;
    const int y_high = bounds.top + bounds.height() * 4 / 5;
    switch (direction) {
        case ActionKind::swipe_right: return {x_low, cy, x_high, cy};
        case ActionKind::swipe_left: return {x_high, cy, x_low, cy};
        case ActionKind::swipe_down: return {cx, y_low, cx, y_high};
        case ActionKind::swipe_up: return {cx, y_high, cx, y_low};
        default: return {cx, cy, cx, cy};
    }
}

void AdbBackend::perform(ActionKind action, const WidgetDescriptor& target,
                         const std::optional<std::string>& text) {
    const Rect& b = target.bounds;
    const int cx = b.center_x();
    const int cy = b.center_y();
    std::ostringstream cmd;
    switch (action) {
        case ActionKind::click:
            cmd << "shell input tap " << cx << ' ' << cy;
            break;
        case ActionKind::edit:
            run("shell input tap " + std::to_string(cx) + ' ' + std::to_string(cy));
            cmd << "shell input text " << escape_input_text(text.value_or(""));
            break;
        case ActionKind::swipe_right:
        case ActionKind::swipe_left:
        case ActionKind::swipe_down:
        case ActionKind::swipe_up: {
            const SwipeSegment s = swipe_segment(b, action);
            cmd << "shell input swipe " << s.x1 << ' ' << s.y1 << ' ' << s.x2 << ' '
                << s.y2 << " 200";
            break;
        }
        case ActionKind::back:
            cmd << "shell input keyevent 4";
            break;
    }
    run(cmd.str());
}

std::string AdbBackend::current_app() {
    const std::string out = run("shell dumpsys activity activities");
    const auto pos = out.find("mResumedActivity");
    if (pos == std::string::npos) return "";
    const auto brace = out.find('{', pos);
    if (brace == std::string::npos) return "";
    // "... u0 com.example.app/.MainActivity t123}"
    const auto slash = out.find('/', brace);
    if (slash == std::string::npos) return "";
    auto start = out.rfind(' ', slash);
    if (start == std::string::npos) return "";
    return out.substr(start + 1, slash - start - 1);
}

}  // namespace logidroid
