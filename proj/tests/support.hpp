#pragma once

// Shared fixtures for the test suites: the to-do simulator app driven by the
// golden scenario, a flat panel app for trace conformance, knowledge-store
// corpus builders, scripted transcripts, and small random generators.

#include <atomic>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logidroid/llm.hpp"
#include "logidroid/model.hpp"
#include "logidroid/simulator.hpp"

namespace logidroid::testsupport {

// ---------------------------------------------------------------------------
// Filesystem
// ---------------------------------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const auto stamp =
            std::chrono::steady_clock::now().time_since_epoch().count() % 1000000;
        path_ = std::filesystem::temp_directory_path() /
                ("logidroid-" + tag + "-" + std::to_string(stamp) + "-" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Model builders
// ---------------------------------------------------------------------------

inline WidgetDescriptor widget(std::string text, std::string content_desc,
                               std::string resource_id, std::set<ActionKind> ops,
                               Rect bounds) {
    WidgetDescriptor out;
    out.text = std::move(text);
    out.content_desc = std::move(content_desc);
    out.resource_id = std::move(resource_id);
    out.supported_ops = std::move(ops);
    out.bounds = bounds;
    return out;
}

inline WidgetPattern by_text(std::string text) { return {std::move(text), "", ""}; }
inline WidgetPattern by_desc(std::string desc) { return {"", std::move(desc), ""}; }
inline WidgetPattern by_id(std::string id) { return {"", "", std::move(id)}; }

inline TestStep click(WidgetPattern target) {
    TestStep step;
    step.kind = StepKind::event;
    step.widget = std::move(target);
    step.action = ActionKind::click;
    return step;
}

inline TestStep edit(WidgetPattern target, std::string value) {
    TestStep step;
    step.kind = StepKind::event;
    step.widget = std::move(target);
    step.action = ActionKind::edit;
    step.value = std::move(value);
    return step;
}

inline TestStep swipe(WidgetPattern target, ActionKind direction) {
    TestStep step;
    step.kind = StepKind::event;
    step.widget = std::move(target);
    step.action = direction;
    return step;
}

inline TestStep assert_exists(WidgetPattern target) {
    TestStep step;
    step.kind = StepKind::assertion;
    step.widget = std::move(target);
    step.condition = Condition::exists;
    return step;
}

inline TestStep assert_gone(WidgetPattern target) {
    TestStep step;
    step.kind = StepKind::assertion;
    step.widget = std::move(target);
    step.condition = Condition::not_exists;
    return step;
}

inline TestCase make_case(std::string app_id, std::string category,
                          std::vector<TestStep> steps) {
    return {std::move(app_id), std::move(category), std::move(steps)};
}

// ---------------------------------------------------------------------------
// The to-do app: S1 list -> S2 editor -> S2_filled -> S3 item added -> S4
// item removed. Drives the add-and-remove golden scenario.
// ---------------------------------------------------------------------------

inline SimulatedApp todo_app() {
    SimulatedApp app;
    app.app_id = "com.example.todo";
    app.initial = "S1";

    const WidgetDescriptor toolbar =
        widget("My To-dos", "", "toolbar_title", {}, {0, 0, 1080, 160});
    const WidgetDescriptor fab = widget("", "add todo item button", "fab_add",
                                        {ActionKind::click}, {880, 1660, 1040, 1820});
    const WidgetDescriptor title_empty =
        widget("Title", "", "todo_title", {ActionKind::click, ActionKind::edit},
               {40, 200, 1040, 320});
    const WidgetDescriptor title_filled =
        widget("Sample todo", "", "todo_title", {ActionKind::click, ActionKind::edit},
               {40, 200, 1040, 320});
    const WidgetDescriptor finish = widget("Finish", "finish button", "btn_finish",
                                           {ActionKind::click}, {40, 400, 360, 520});
    const WidgetDescriptor row =
        widget("Sample todo", "", "todo_row_0",
               {ActionKind::click, ActionKind::swipe_left, ActionKind::swipe_right},
               {40, 200, 1040, 320});

    app.states["S1"] = {toolbar, fab};
    app.states["S2"] = {title_empty, finish};
    app.states["S2_filled"] = {title_filled, finish};
    app.states["S3"] = {toolbar, row, fab};
    app.states["S4"] = {toolbar, fab};

    app.transitions.push_back({"S1", by_id("fab_add"), ActionKind::click, std::nullopt,
                               "S2", {}, {}});
    app.transitions.push_back({"S2", by_id("todo_title"), ActionKind::edit,
                               std::string("Sample todo"), "S2_filled", {}, {}});
    app.transitions.push_back({"S2_filled", by_id("btn_finish"), ActionKind::click,
                               std::nullopt, "S3", {}, {}});
    app.transitions.push_back({"S3", by_id("todo_row_0"), ActionKind::swipe_right,
                               std::nullopt, "S4", {}, {}});
    return app;
}

// Ground truth for the add-and-remove scenario: four events, two assertions.
inline TestCase todo_ground_truth() {
    return make_case("com.example.todo", "To-do",
                     {click(by_desc("add todo item button")),
                      edit(by_id("todo_title"), "Sample todo"),
                      click(by_text("Finish")),
                      assert_exists(by_text("Sample todo")),
                      swipe(by_text("Sample todo"), ActionKind::swipe_right),
                      assert_gone(by_text("Sample todo"))});
}

inline std::string todo_requirement() { return "Add and remove a to-do item"; }

// Five To-do cases from other apps; each carries the vocabulary the fused
// logic needs (title, finish, sample, todo, add) so any top-3 retrieval
// supports the relevance check.
inline std::vector<TestCase> todo_corpus() {
    std::vector<TestCase> corpus;
    corpus.push_back(make_case(
        "org.acme.tasks", "To-do",
        {click(by_desc("add todo button")), edit(by_id("task_title"), "sample todo"),
         click(by_text("finish")), assert_exists(by_text("sample todo")),
         swipe(by_text("sample todo"), ActionKind::swipe_right),
         assert_gone(by_text("sample todo"))}));
    corpus.push_back(make_case(
        "io.list.keeper", "To-do",
        {click(by_text("new todo")), edit(by_id("title_field"), "sample entry"),
         click(by_desc("finish button")), assert_exists(by_text("sample entry"))}));
    corpus.push_back(make_case(
        "net.daily.planner", "To-do",
        {click(by_text("skip button")), click(by_desc("add task button")),
         edit(by_id("todo_title_input"), "sample task"), click(by_text("finish task")),
         assert_exists(by_text("sample task"))}));
    corpus.push_back(make_case(
        "org.simple.checklist", "To-do",
        {click(by_id("btn_add_todo")), edit(by_id("item_title"), "sample item"),
         click(by_text("finish editing")), swipe(by_text("sample item"), ActionKind::swipe_left),
         assert_gone(by_text("sample item"))}));
    corpus.push_back(make_case(
        "com.plain.notado", "To-do",
        {click(by_desc("add todo item")), edit(by_id("todo_title_box"), "sample todo"),
         click(by_id("finish_btn")), assert_exists(by_text("sample todo")),
         swipe(by_text("sample todo"), ActionKind::swipe_right),
         assert_gone(by_text("sample todo"))}));
    return corpus;
}

// Sequential summary replies for ingesting todo_corpus().
inline std::vector<ScriptEntry> todo_summary_script() {
    std::vector<ScriptEntry> script;
    const std::vector<std::string> replies = {
        "Test adding and removing a todo item",
        "Test creating a new todo entry",
        "Test adding a task to the list",
        "Test removing a checklist item",
        "Test adding and deleting a todo",
    };
    for (const auto& reply : replies)
        script.push_back({PromptRole::summary_generation, std::nullopt, std::nullopt, reply});
    return script;
}

inline std::string todo_fusion_reply() {
    return "Step 1: (Event) Click a widget \"add todo item button\"\n"
           "Step 2: (Event) Edit a widget \"title\" with \"Sample todo\"\n"
           "Step 3: (Event) Click a widget \"finish button\"\n"
           "Step 4: (Assertion) Identify a widget \"Sample todo\" in the state\n"
           "Step 5: (Event) Swipe right a widget \"Sample todo\"\n"
           "Step 6: (Assertion) Identify a widget \"Sample todo\" not in the state";
}

// Decision-loop replies for the golden run, in call order.
inline std::vector<ScriptEntry> todo_decision_script() {
    std::vector<ScriptEntry> script;
    const auto select = [&](const std::string& reply) {
        script.push_back({PromptRole::step_selection, std::nullopt, std::nullopt, reply});
    };
    const auto instruct = [&](const std::string& reply) {
        script.push_back(
            {PromptRole::instruction_generation, std::nullopt, std::nullopt, reply});
    };
    const auto judge = [&](const std::string& reply) {
        script.push_back(
            {PromptRole::completion_judgment, std::nullopt, std::nullopt, reply});
    };

    select("Step 1");
    instruct("widget=1 action=click");  // S1: 0 toolbar, 1 fab
    judge("Yes");
    select("Step 2");
    instruct("widget=0 action=edit value=\"Sample todo\"");  // S2: 0 title, 1 finish
    judge("Yes");
    select("Step 3");
    instruct("widget=1 action=click");  // S2_filled: 0 title, 1 finish
    judge("Yes");
    select("Step 4");
    instruct("widget=1");  // S3: 0 toolbar, 1 row, 2 fab
    judge("Yes");
    select("Step 5");
    instruct("widget=1 action=swipe_right");
    judge("Yes");
    select("Step 6");  // disappearance assertion resolves via backtracking
    judge("Yes");
    return script;
}

// Full scripted transcript for the golden pipeline run (fusion + decisions).
inline std::vector<ScriptEntry> golden_pipeline_script() {
    std::vector<ScriptEntry> script;
    script.push_back(
        {PromptRole::knowledge_fusion, std::nullopt, std::nullopt, todo_fusion_reply()});
    for (auto& entry : todo_decision_script()) script.push_back(std::move(entry));
    return script;
}

inline nlohmann::json script_to_json(const std::vector<ScriptEntry>& entries) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& entry : entries) {
        nlohmann::json match{{"role", to_string(entry.role)}};
        if (entry.turn) match["turn"] = *entry.turn;
        if (entry.contains) match["contains"] = *entry.contains;
        out.push_back({{"match", std::move(match)}, {"reply", entry.reply}});
    }
    return out;
}

inline std::filesystem::path write_script(const std::filesystem::path& path,
                                          const std::vector<ScriptEntry>& entries) {
    write_text(path, script_to_json(entries).dump(2) + "\n");
    return path;
}

// ---------------------------------------------------------------------------
// The panel app: one flat state with five buttons; clicks are no-ops. Used
// for window-sliding traces where one logic step matches nothing.
// ---------------------------------------------------------------------------

inline SimulatedApp panel_app() {
    SimulatedApp app;
    app.app_id = "com.example.panel";
    app.initial = "main";
    const std::vector<std::string> names = {"alpha button", "beta button", "delta button",
                                            "epsilon button", "zeta button"};
    std::vector<WidgetDescriptor> widgets;
    for (std::size_t i = 0; i < names.size(); ++i)
        widgets.push_back(widget(names[i], "", "btn_" + std::to_string(i),
                                 {ActionKind::click},
                                 {40, static_cast<int>(i) * 100,
                                  1040, static_cast<int>(i) * 100 + 80}));
    app.states["main"] = widgets;
    return app;
}

// Six click steps; step 3 names a button the panel does not have.
inline BusinessLogic panel_logic() {
    BusinessLogic logic;
    logic.functionality = "Press each panel button in order";
    const std::vector<std::string> targets = {"alpha button", "beta button", "gamma button",
                                              "delta button", "epsilon button",
                                              "zeta button"};
    for (const auto& target : targets)
        logic.steps.push_back(
            {StepKind::event, "(Event) Click a widget \"" + target + "\""});
    return logic;
}

// Scripted replies for the panel run: steps 1,2 complete, window slides past
// step 3, steps 4,5,6 complete.
inline std::vector<ScriptEntry> panel_decision_script() {
    std::vector<ScriptEntry> script;
    const auto select = [&](const std::string& reply) {
        script.push_back({PromptRole::step_selection, std::nullopt, std::nullopt, reply});
    };
    const auto instruct = [&](const std::string& reply) {
        script.push_back(
            {PromptRole::instruction_generation, std::nullopt, std::nullopt, reply});
    };
    const auto judge = [&](const std::string& reply) {
        script.push_back(
            {PromptRole::completion_judgment, std::nullopt, std::nullopt, reply});
    };
    select("Step 1");
    instruct("widget=0 action=click");
    judge("Yes");
    select("Step 2");
    instruct("widget=1 action=click");
    judge("Yes");
    select("(-1)");
    select("Step 4");
    instruct("widget=2 action=click");
    judge("Yes");
    select("Step 5");
    instruct("widget=3 action=click");
    judge("Yes");
    select("Step 6");
    instruct("widget=4 action=click");
    judge("Yes");
    return script;
}

// ---------------------------------------------------------------------------
// Random generators (seeded, deterministic)
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> pool = {
        "add",    "remove", "item",   "task",  "note",   "save",   "delete", "search",
        "button", "title",  "entry",  "list",  "open",   "close",  "send",   "message",
        "cart",   "buy",    "news",   "field", "submit", "cancel", "done",   "edit"};
    return pool;
}

inline std::string random_phrase(std::mt19937& rng, int min_words = 1, int max_words = 3) {
    std::uniform_int_distribution<int> count(min_words, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, word_pool().size() - 1);
    std::string out;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += word_pool()[pick(rng)];
    }
    return out;
}

inline WidgetPattern random_pattern(std::mt19937& rng) {
    std::uniform_int_distribution<int> mask_dist(1, 7);
    const int mask = mask_dist(rng);
    WidgetPattern pattern;
    if (mask & 1) pattern.text = random_phrase(rng);
    if (mask & 2) pattern.content_desc = random_phrase(rng);
    if (mask & 4) pattern.resource_id = random_phrase(rng, 1, 2) + "_id";
    return pattern;
}

inline TestStep random_step(std::mt19937& rng) {
    std::uniform_int_distribution<int> kind_dist(0, 5);
    const int kind = kind_dist(rng);
    const WidgetPattern target = random_pattern(rng);
    switch (kind) {
        case 0: return click(target);
        case 1: return edit(target, random_phrase(rng));
        case 2: return swipe(target, ActionKind::swipe_left);
        case 3: return swipe(target, ActionKind::swipe_up);
        case 4: return assert_exists(target);
        default: return assert_gone(target);
    }
}

inline TestCase random_case(std::mt19937& rng, int min_steps = 1, int max_steps = 8) {
    std::uniform_int_distribution<int> count(min_steps, max_steps);
    TestCase out;
    out.app_id = "app." + random_phrase(rng, 1, 1);
    out.category = "Random";
    const int n = count(rng);
    for (int i = 0; i < n; ++i) out.steps.push_back(random_step(rng));
    return out;
}

// Whitespace and case noise that leaves canonical forms unchanged.
inline std::string perturb_text(const std::string& text, std::mt19937& rng) {
    if (text.empty()) return text;
    std::string out = text;
    std::uniform_int_distribution<int> coin(0, 1);
    for (char& c : out)
        if (coin(rng) && std::isalpha(static_cast<unsigned char>(c)))
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (coin(rng)) out = "  " + out;
    if (coin(rng)) out += " ";
    return out;
}

inline TestCase perturb_case(const TestCase& original, std::mt19937& rng) {
    TestCase out = original;
    for (TestStep& step : out.steps) {
        step.widget.text = perturb_text(step.widget.text, rng);
        step.widget.content_desc = perturb_text(step.widget.content_desc, rng);
        step.widget.resource_id = perturb_text(step.widget.resource_id, rng);
        if (step.value) step.value = perturb_text(*step.value, rng);
    }
    return out;
}

}  // namespace logidroid::testsupport
