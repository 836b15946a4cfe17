#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "logidroid/decision.hpp"
#include "logidroid/errors.hpp"
#include "logidroid/fusion.hpp"
#include "logidroid/knowledge_store.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

struct RunConfig {
    std::string store_dir;
    std::string requirement;
    std::string category;
    std::optional<std::string> exclude_app;
    int top_sim = 3;
    int step_num = 2;
    int attempt_limit = 3;
    std::string llm_spec;                 // scripted:<file> | http:<url>
    std::string embedder_spec;            // empty: use the store's embedder
    std::string app_model;                // simulator backend (app model JSON path)
    std::string adb_serial;               // real backend (device serial)
    std::filesystem::path run_dir = "logidroid-run";
    int call_budget_multiplier = 10;
    bool no_retrieval = false;
};

enum class PipelineStatus { perfect, completed_with_skips };

struct PipelineResult {
    PipelineStatus status = PipelineStatus::perfect;
    TestCase test_case;
    BusinessLogic logic;
    DecisionReport report;
    std::filesystem::path run_dir;
};

// Any stage failure, wrapped with the pipeline phase that raised it.
struct PipelineError : Error {
    PipelineError(std::string phase_in, const std::string& what)
        : Error("[" + phase_in + "] " + what), phase(std::move(phase_in)) {}
    std::string phase;
};

// Retrieval -> fusion -> decision loop -> synthesis. Writes logic.json,
// trace.jsonl, transcript.jsonl, case.json, run.meta.json, and states/ under
// run_dir. The meta file records every provider parameter and the retrieval
// provenance (app ids and scores) for reproducibility.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace logidroid
