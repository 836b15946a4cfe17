#include "logidroid/pipeline.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "logidroid/evaluation.hpp"
#include "logidroid/knowledge_store.hpp"
#include "logidroid/simulator.hpp"
#include "support.hpp"

using namespace logidroid;
namespace ts = logidroid::testsupport;

namespace {

// Builds the fixture store (five To-do entries from other apps) under dir.
void build_fixture_store(const std::filesystem::path& dir) {
    KnowledgeStore store =
        KnowledgeStore::create(dir, std::make_shared<DeterministicEmbedder>());
    ScriptedProvider provider(ts::todo_summary_script());
    LlmSession session(provider, "store");
    for (const TestCase& test_case : ts::todo_corpus()) store.ingest(test_case, session);
}

RunConfig golden_config(const ts::TempDir& dir) {
    build_fixture_store(dir.path() / "store");
    ts::write_text(dir.path() / "todo.app.json", ts::todo_app().to_json().dump(2));
    ts::write_script(dir.path() / "script.json", ts::golden_pipeline_script());

    RunConfig config;
    config.store_dir = (dir.path() / "store").string();
    config.requirement = ts::todo_requirement();
    config.category = "To-do";
    config.exclude_app = "com.example.todo";
    config.llm_spec = "scripted:" + (dir.path() / "script.json").string();
    config.app_model = (dir.path() / "todo.app.json").string();
    config.run_dir = dir.path() / "run";
    return config;
}

}  // namespace

TEST(Pipeline, GoldenRunMatchesGroundTruth) {
    ts::TempDir dir("pipeline");
    const PipelineResult result = run_pipeline(golden_config(dir));

    EXPECT_EQ(result.status, PipelineStatus::perfect);
    ASSERT_EQ(result.test_case.steps.size(), 6u);
    EXPECT_TRUE(perfect_match(result.test_case, ts::todo_ground_truth()).perfect);

    // run dir is fully populated
    for (const char* name :
         {"logic.json", "trace.jsonl", "transcript.jsonl", "case.json", "run.meta.json"})
        EXPECT_TRUE(std::filesystem::exists(result.run_dir / name)) << name;
    EXPECT_TRUE(std::filesystem::exists(result.run_dir / "states" / "1.xml"));
}

TEST(Pipeline, TranscriptReplayReproducesCaseJson) {
    ts::TempDir dir("pipeline");
    const RunConfig first_config = golden_config(dir);
    const PipelineResult first = run_pipeline(first_config);

    RunConfig replay_config = first_config;
    replay_config.llm_spec =
        "scripted:" + (first.run_dir / "transcript.jsonl").string();
    replay_config.run_dir = dir.path() / "replay";
    const PipelineResult replay = run_pipeline(replay_config);

    EXPECT_EQ(ts::read_text(first.run_dir / "case.json"),
              ts::read_text(replay.run_dir / "case.json"));
    EXPECT_EQ(ts::read_text(first.run_dir / "trace.jsonl"),
              ts::read_text(replay.run_dir / "trace.jsonl"));
}

TEST(Pipeline, ExclusionProvenanceRecorded) {
    ts::TempDir dir("pipeline");
    const PipelineResult result = run_pipeline(golden_config(dir));
    const nlohmann::json meta =
        nlohmann::json::parse(ts::read_text(result.run_dir / "run.meta.json"));
    const auto& retrieval = meta.at("retrieval");
    EXPECT_EQ(retrieval.size(), 3u);  // top_sim default
    for (const auto& item : retrieval) EXPECT_NE(item.at("app_id"), "com.example.todo");
}

TEST(Pipeline, NoRetrievalAblationStillCompletes) {
    ts::TempDir dir("pipeline");
    ts::write_text(dir.path() / "todo.app.json", ts::todo_app().to_json().dump(2));
    ts::write_script(dir.path() / "script.json", ts::golden_pipeline_script());

    RunConfig config;
    config.no_retrieval = true;
    // without retrieved cases the requirement alone supplies the relevance
    // vocabulary, so it must name the things the logic will touch
    config.requirement =
        "Add a todo item with the title Sample todo, click finish, then swipe to "
        "remove it";
    config.category = "To-do";
    config.llm_spec = "scripted:" + (dir.path() / "script.json").string();
    config.app_model = (dir.path() / "todo.app.json").string();
    config.run_dir = dir.path() / "run";

    const PipelineResult result = run_pipeline(config);
    EXPECT_EQ(result.status, PipelineStatus::perfect);
    EXPECT_EQ(result.test_case.steps.size(), 6u);
    const nlohmann::json meta =
        nlohmann::json::parse(ts::read_text(result.run_dir / "run.meta.json"));
    EXPECT_TRUE(meta.at("retrieval").empty());
}

TEST(Pipeline, UnreachableBackendAbortsInPerceptionPhase) {
    ts::TempDir dir("pipeline");
    RunConfig config = golden_config(dir);
    config.app_model = (dir.path() / "missing.app.json").string();
    try {
        run_pipeline(config);
        FAIL() << "expected PipelineError";
    } catch (const PipelineError& e) {
        EXPECT_EQ(e.phase, "perception");
    }
}

TEST(Pipeline, UnknownCategoryFallsBackToAllCategories) {
    ts::TempDir dir("pipeline");
    RunConfig config = golden_config(dir);
    config.category = "Task-Manager";  // not a store category
    const PipelineResult result = run_pipeline(config);
    EXPECT_EQ(result.status, PipelineStatus::perfect);
    const nlohmann::json meta =
        nlohmann::json::parse(ts::read_text(result.run_dir / "run.meta.json"));
    EXPECT_EQ(meta.at("retrieval").size(), 3u);
}

TEST(Pipeline, ConfigValidation) {
    RunConfig config;
    EXPECT_THROW(run_pipeline(config), Error);
    config.requirement = "r";
    config.category = "c";
    config.llm_spec = "scripted:/nonexistent";
    config.app_model = "x";
    config.top_sim = 0;
    EXPECT_THROW(run_pipeline(config), Error);
}

// ===========================================================================
// CLI (drives the installed binary end to end)
// ===========================================================================

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run_cli(const std::string& args) {
    const std::string command = std::string(LOGIDROID_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return {};
    CommandResult result;
    char buffer[4096];
    std::size_t n;
    while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0)
        result.output.append(buffer, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace

TEST(Cli, FullFlowThroughSubcommands) {
    ts::TempDir dir("cli");
    // case corpus on disk
    const auto cases_dir = dir.path() / "cases";
    std::filesystem::create_directories(cases_dir);
    const auto corpus = ts::todo_corpus();
    for (std::size_t i = 0; i < corpus.size(); ++i)
        ts::write_text(cases_dir / ("case" + std::to_string(i) + ".json"),
                       nlohmann::json(corpus[i]).dump(2));
    const auto summary_script =
        ts::write_script(dir.path() / "summaries.json", ts::todo_summary_script());

    // build-db
    const auto build = run_cli("build-db --cases " + cases_dir.string() + " --out " +
                               (dir.path() / "store").string() + " --llm scripted:" +
                               summary_script.string());
    ASSERT_EQ(build.exit_code, 0) << build.output;
    EXPECT_NE(build.output.find("ingested 5 cases"), std::string::npos);
    EXPECT_NE(build.output.find("To-do: 5"), std::string::npos);

    // query
    const auto query =
        run_cli("query --db " + (dir.path() / "store").string() +
                " --category To-do --requirement \"Add and remove a to-do item\" --top 2");
    ASSERT_EQ(query.exit_code, 0) << query.output;
    EXPECT_EQ(nlohmann::json::parse(query.output).size(), 2u);

    // fuse
    const auto fusion_script = ts::write_script(
        dir.path() / "fusion.json",
        {{PromptRole::knowledge_fusion, std::nullopt, std::nullopt,
          ts::todo_fusion_reply()}});
    const auto fused =
        run_cli("fuse --db " + (dir.path() / "store").string() +
                " --category To-do --requirement \"Add and remove a to-do item\""
                " --llm scripted:" +
                fusion_script.string() + " --out " + (dir.path() / "logic.json").string());
    ASSERT_EQ(fused.exit_code, 0) << fused.output;
    const nlohmann::json logic =
        nlohmann::json::parse(ts::read_text(dir.path() / "logic.json"));
    EXPECT_EQ(logic.at("steps").size(), 6u);

    // generate
    ts::write_text(dir.path() / "todo.app.json", ts::todo_app().to_json().dump(2));
    const auto pipeline_script =
        ts::write_script(dir.path() / "pipeline.json", ts::golden_pipeline_script());
    const auto generated = run_cli(
        "--run-dir " + (dir.path() / "run").string() + " generate --db " +
        (dir.path() / "store").string() +
        " --requirement \"Add and remove a to-do item\" --category To-do "
        "--app-model " +
        (dir.path() / "todo.app.json").string() + " --llm scripted:" +
        pipeline_script.string() + " --exclude-app com.example.todo --out " +
        (dir.path() / "generated" / "golden.json").string());
    ASSERT_EQ(generated.exit_code, 0) << generated.output;

    // eval against the ground truth
    std::filesystem::create_directories(dir.path() / "truth");
    ts::write_text(dir.path() / "truth" / "golden.json",
                   nlohmann::json(ts::todo_ground_truth()).dump(2));
    const auto evaluated = run_cli(
        "eval --generated " + (dir.path() / "generated").string() + " --ground-truth " +
        (dir.path() / "truth").string() + " --out " + (dir.path() / "report.json").string());
    ASSERT_EQ(evaluated.exit_code, 0) << evaluated.output;
    const nlohmann::json report =
        nlohmann::json::parse(ts::read_text(dir.path() / "report.json"));
    EXPECT_EQ(report.at("perfect_rate"), 1.0);
}

TEST(Cli, GenerateExitCodeDistinguishesSkips) {
    ts::TempDir dir("cli");
    ts::write_text(dir.path() / "panel.app.json", ts::panel_app().to_json().dump(2));

    // fusion reply whose step 3 matches nothing on the panel
    std::vector<ScriptEntry> script;
    std::string fusion_reply;
    for (std::size_t i = 0; i < ts::panel_logic().steps.size(); ++i)
        fusion_reply +=
            "Step " + std::to_string(i + 1) + ": " + ts::panel_logic().steps[i].phrase + "\n";
    script.push_back(
        {PromptRole::knowledge_fusion, std::nullopt, std::nullopt, fusion_reply});
    for (auto& entry : ts::panel_decision_script()) script.push_back(std::move(entry));
    const auto script_path = ts::write_script(dir.path() / "panel.script.json", script);

    const auto result = run_cli(
        "--run-dir " + (dir.path() / "run").string() +
        " generate --no-retrieval --requirement \"Press each panel button in order\" "
        "--category Device --app-model " +
        (dir.path() / "panel.app.json").string() + " --llm scripted:" +
        script_path.string() + " --out " + (dir.path() / "case.json").string());
    EXPECT_EQ(result.exit_code, 2) << result.output;  // completed with an unmatched step
}

TEST(Cli, AbortExitsWithOne) {
    ts::TempDir dir("cli");
    const auto result = run_cli(
        "generate --no-retrieval --requirement r --category c --app-model " +
        (dir.path() / "missing.json").string() + " --llm scripted:" +
        (dir.path() / "missing-script.json").string());
    EXPECT_EQ(result.exit_code, 1);
    EXPECT_NE(result.output.find("aborted"), std::string::npos);
}
