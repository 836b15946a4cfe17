#include <benchmark/benchmark.h>

#include <random>

#include "logidroid/adb.hpp"
#include "logidroid/device.hpp"
#include "logidroid/evaluation.hpp"
#include "logidroid/simulator.hpp"
#include "support.hpp"

using namespace logidroid;
namespace ts = logidroid::testsupport;

namespace {

std::vector<WidgetDescriptor> random_layout(int n) {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> coordinate(0, 1000);
    std::vector<WidgetDescriptor> out;
    for (int i = 0; i < n; ++i) {
        const int left = coordinate(rng);
        const int top = coordinate(rng);
        out.push_back(ts::widget("widget " + std::to_string(i), "",
                                 "id_" + std::to_string(i), {ActionKind::click},
                                 {left, top, left + 100, top + 40}));
    }
    return out;
}

}  // namespace

static void BM_OrderWidgets(benchmark::State& state) {
    const auto layout = random_layout(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(order_widgets(layout));
}
BENCHMARK(BM_OrderWidgets)->Arg(20)->Arg(100);

static void BM_DescribeState(benchmark::State& state) {
    GuiState gui;
    gui.state_id = 1;
    gui.widgets = order_widgets(random_layout(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(describe_state(gui));
}
BENCHMARK(BM_DescribeState)->Arg(20)->Arg(100);

static void BM_UiautomatorParse(benchmark::State& state) {
    SimulatorBackend backend(ts::todo_app());
    const std::string xml = backend.dump_hierarchy().raw;
    for (auto _ : state) benchmark::DoNotOptimize(parse_uiautomator_dump(xml));
}
BENCHMARK(BM_UiautomatorParse);

static void BM_PerfectMatch(benchmark::State& state) {
    const TestCase ground_truth = ts::todo_ground_truth();
    for (auto _ : state)
        benchmark::DoNotOptimize(perfect_match(ground_truth, ground_truth));
}
BENCHMARK(BM_PerfectMatch);
