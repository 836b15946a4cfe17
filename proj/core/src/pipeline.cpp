#include "logidroid/pipeline.hpp"

#include <fstream>
#include <memory>

#include "logidroid/adb.hpp"
#include "logidroid/device.hpp"
#include "logidroid/prompts.hpp"
#include "logidroid/simulator.hpp"

namespace logidroid {

namespace {

void check_config(const RunConfig& config) {
    if (config.requirement.empty()) throw Error("requirement must not be empty");
    if (config.category.empty()) throw Error("category must not be empty");
    if (config.top_sim < 1) throw Error("top_sim must be >= 1");
    if (config.step_num < 1) throw Error("step_num must be >= 1");
    if (config.attempt_limit < 1) throw Error("attempt_limit must be >= 1");
    if (config.llm_spec.empty()) throw Error("an llm spec is required");
    if (config.app_model.empty() && config.adb_serial.empty())
        throw Error("either an app model or a device serial is required");
    if (!config.app_model.empty() && !config.adb_serial.empty())
        throw Error("an app model and a device serial are mutually exclusive");
    if (config.store_dir.empty() && !config.no_retrieval)
        throw Error("a knowledge store is required unless retrieval is disabled");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

template <typename Fn>
auto phase(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
    check_config(config);
    std::filesystem::create_directories(config.run_dir);

    // Stage 1: retrieval + fusion.
    std::vector<RetrievalResult> retrieved;
    if (!config.no_retrieval) {
        retrieved = phase("retrieval", [&] {
            std::shared_ptr<Embedder> embedder;
            if (!config.embedder_spec.empty())
                embedder = std::shared_ptr<Embedder>(make_embedder(config.embedder_spec));
            KnowledgeStore store = KnowledgeStore::open(config.store_dir, embedder);
            try {
                return store.retrieve(config.requirement, config.category,
                                      config.exclude_app, config.top_sim);
            } catch (const UnknownCategory&) {
                // mislabeled categories fall back to an all-category search
                return store.retrieve_any_category(config.requirement, config.exclude_app,
                                                   config.top_sim);
            }
        });
    }
    std::vector<TestCase> related;
    related.reserve(retrieved.size());
    for (const auto& result : retrieved) related.push_back(result.entry.test_case);

    const std::unique_ptr<LlmProvider> provider =
        phase("fusion", [&] { return make_provider(config.llm_spec); });
    LlmSession session(*provider, "pipeline", config.run_dir / "transcript.jsonl");

    FusionOptions fusion_options;
    const BusinessLogic logic = phase("fusion", [&] {
        return fuse(config.requirement, related, config.category, session, fusion_options);
    });
    write_file(config.run_dir / "logic.json", nlohmann::json(logic).dump(2) + "\n");

    // Stage 2: perception + decision.
    std::unique_ptr<DeviceBackend> backend = phase("perception", [&] {
        std::unique_ptr<DeviceBackend> out;
        if (!config.app_model.empty())
            out = std::make_unique<SimulatorBackend>(SimulatedApp::from_file(config.app_model));
        else
            out = std::make_unique<AdbBackend>(config.adb_serial);
        out->current_app();  // reachability probe
        return out;
    });
    const std::string app_id = backend->current_app();

    DeviceSession device(*backend, config.run_dir);
    TraceSink trace(config.run_dir / "trace.jsonl");
    DecisionOptions options{config.step_num, config.attempt_limit,
                            config.call_budget_multiplier};
    const DecisionReport report = phase("decision", [&] {
        return run_decision_loop(config.requirement, logic, device, session, options,
                                 &trace);
    });

    const TestCase test_case = phase("synthesis", [&] {
        return device.synthesize_case(app_id, config.category);
    });
    write_file(config.run_dir / "case.json", nlohmann::json(test_case).dump(2) + "\n");

    PipelineResult result;
    result.status = report.all_completed() ? PipelineStatus::perfect
                                           : PipelineStatus::completed_with_skips;
    result.test_case = test_case;
    result.logic = logic;
    result.report = report;
    result.run_dir = config.run_dir;

    nlohmann::json retrieval_meta = nlohmann::json::array();
    for (const auto& item : retrieved)
        retrieval_meta.push_back({{"app_id", item.entry.app_id},
                                  {"category", item.entry.category},
                                  {"summary", item.entry.summary},
                                  {"score", item.score}});
    nlohmann::json outcomes = nlohmann::json::array();
    for (const StepOutcome outcome : report.outcomes) outcomes.push_back(to_string(outcome));
    const nlohmann::json meta{
        {"requirement", config.requirement},
        {"category", config.category},
        {"exclude_app", config.exclude_app ? nlohmann::json(*config.exclude_app)
                                           : nlohmann::json()},
        {"top_sim", config.top_sim},
        {"step_num", config.step_num},
        {"attempt_limit", config.attempt_limit},
        {"call_budget_multiplier", config.call_budget_multiplier},
        {"no_retrieval", config.no_retrieval},
        {"llm", config.llm_spec},
        {"provider", provider->id()},
        {"sampling", "provider default (most deterministic)"},
        {"embedder", config.embedder_spec.empty() ? "store default" : config.embedder_spec},
        {"backend", config.app_model.empty() ? "adb:" + config.adb_serial
                                             : "sim:" + config.app_model},
        {"app_id", app_id},
        {"retrieval", std::move(retrieval_meta)},
        {"provider_calls", report.provider_calls},
        {"outcomes", std::move(outcomes)},
        {"status", result.status == PipelineStatus::perfect ? "perfect"
                                                            : "completed_with_skips"}};
    write_file(config.run_dir / "run.meta.json", meta.dump(2) + "\n");

    return result;
}

}  // namespace logidroid
