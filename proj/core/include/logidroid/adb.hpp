#pragma once

#include <string>
#include <vector>

#include "logidroid/device.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

// Parses a uiautomator hierarchy dump. Every <node> becomes a widget:
// text / resource-id / content-desc map onto the key attributes,
// clickable -> click, an EditText class -> edit (and click), scrollable ->
// the four swipes. bounds="[l,t][r,b]" supplies the rectangle.
std::vector<WidgetDescriptor> parse_uiautomator_dump(const std::string& xml);

// Gesture path for a swipe: horizontal swipes travel from 20% to 80% of the
// widget's width at its vertical center, vertical swipes symmetrically.
struct SwipeSegment {
    int x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    bool operator==(const SwipeSegment&) const = default;
};
SwipeSegment swipe_segment(const Rect& bounds, ActionKind direction);

// Backend driving a real device through the Android Debug Bridge:
// hierarchy via `uiautomator dump`, taps via `input tap`, text via
// `input text`, swipes via `input swipe`, screenshots via `screencap`.
// Exercised manually against a device; the dump parser is covered by tests.
class AdbBackend final : public DeviceBackend {
public:
    explicit AdbBackend(std::string serial);

    HierarchyDump dump_hierarchy() override;
    std::optional<std::vector<std::uint8_t>> screenshot() override;
    void perform(ActionKind action, const WidgetDescriptor& target,
                 const std::optional<std::string>& text) override;
    std::string current_app() override;

    std::chrono::milliseconds post_action_settle() const override {
        return std::chrono::milliseconds(500);
    }

private:
    std::string run(const std::string& args) const;
    std::vector<std::uint8_t> run_bytes(const std::string& args) const;

    std::string serial_;
};

}  // namespace logidroid
