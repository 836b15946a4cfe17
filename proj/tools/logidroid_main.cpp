// logidroid command line: build-db, query, fuse, generate, eval.
//
// Exit codes for `generate`: 0 when every logic step completed, 2 when the
// pipeline finished with skipped or unmatched steps, 1 on abort or bad usage.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "logidroid/adb.hpp"
#include "logidroid/decision.hpp"
#include "logidroid/device.hpp"
#include "logidroid/errors.hpp"
#include "logidroid/evaluation.hpp"
#include "logidroid/fusion.hpp"
#include "logidroid/knowledge_store.hpp"
#include "logidroid/llm.hpp"
#include "logidroid/model.hpp"
#include "logidroid/pipeline.hpp"
#include "logidroid/simulator.hpp"

namespace fs = std::filesystem;
using namespace logidroid;

namespace {

bool g_verbose = false;

void log_verbose(const std::string& message) {
    if (g_verbose) std::cerr << message << '\n';
}

void write_output_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

TestCase load_case(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    TestCase test_case = j.get<TestCase>();
    if (auto why = validate(test_case)) throw Error(path.string() + ": " + *why);
    return test_case;
}

std::vector<fs::path> case_files(const fs::path& target) {
    std::vector<fs::path> files;
    if (fs::is_directory(target)) {
        for (const auto& entry : fs::directory_iterator(target))
            if (entry.is_regular_file() && entry.path().extension() == ".json")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(target);
    }
    return files;
}

int cmd_build_db(const std::string& cases_dir, const std::string& out_dir,
                 const std::string& embedder_spec, const std::string& llm_spec) {
    auto embedder = std::shared_ptr<Embedder>(make_embedder(embedder_spec));
    KnowledgeStore store = KnowledgeStore::create(out_dir, std::move(embedder));
    const auto provider = make_provider(llm_spec);
    LlmSession session(*provider, "build-db");

    int ingested = 0;
    for (const fs::path& file : case_files(cases_dir)) {
        const TestCase test_case = load_case(file);
        const KnowledgeEntry entry = store.ingest(test_case, session);
        log_verbose("ingested " + file.filename().string() + " -> \"" + entry.summary + "\"");
        ++ingested;
    }
    std::cout << "ingested " << ingested << " cases into " << out_dir << '\n';
    for (const auto& [category, count] : store.category_counts())
        std::cout << "  " << category << ": " << count << '\n';
    return 0;
}

int cmd_query(const std::string& db_dir, const std::string& category,
              const std::string& requirement, int top,
              const std::string& exclude_app) {
    KnowledgeStore store = KnowledgeStore::open(db_dir);
    std::optional<std::string> exclude;
    if (!exclude_app.empty()) exclude = exclude_app;
    std::vector<RetrievalResult> results;
    try {
        results = store.retrieve(requirement, category, exclude, top);
    } catch (const UnknownCategory&) {
        log_verbose("category \"" + category + "\" not in store, searching all categories");
        results = store.retrieve_any_category(requirement, exclude, top);
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& result : results)
        out.push_back({{"app_id", result.entry.app_id},
                       {"category", result.entry.category},
                       {"summary", result.entry.summary},
                       {"score", result.score}});
    std::cout << out.dump(2) << '\n';
    return 0;
}

int cmd_fuse(const std::string& db_dir, const std::string& category,
             const std::string& requirement, int top, const std::string& exclude_app,
             const std::string& llm_spec, const std::string& out_file,
             const fs::path& run_dir) {
    KnowledgeStore store = KnowledgeStore::open(db_dir);
    std::optional<std::string> exclude;
    if (!exclude_app.empty()) exclude = exclude_app;
    std::vector<RetrievalResult> results;
    try {
        results = store.retrieve(requirement, category, exclude, top);
    } catch (const UnknownCategory&) {
        results = store.retrieve_any_category(requirement, exclude, top);
    }
    std::vector<TestCase> related;
    for (const auto& result : results) related.push_back(result.entry.test_case);

    const auto provider = make_provider(llm_spec);
    std::optional<fs::path> transcript;
    if (!run_dir.empty()) transcript = run_dir / "transcript.jsonl";
    LlmSession session(*provider, "fuse", transcript);
    const BusinessLogic logic = fuse(requirement, related, category, session);

    write_output_file(out_file, nlohmann::json(logic).dump(2) + "\n");
    std::cout << "fused " << logic.steps.size() << " logic steps -> " << out_file << '\n';
    return 0;
}

int cmd_generate(const RunConfig& config, const std::string& out_file) {
    const PipelineResult result = run_pipeline(config);
    if (!out_file.empty())
        write_output_file(out_file, nlohmann::json(result.test_case).dump(2) + "\n");
    std::cout << "generated " << result.test_case.steps.size() << " steps ("
              << (result.status == PipelineStatus::perfect ? "all logic steps completed"
                                                           : "completed with skips")
              << "), artifacts in " << result.run_dir.string() << '\n';
    return result.status == PipelineStatus::perfect ? 0 : 2;
}

int cmd_eval(const std::string& generated, const std::string& ground_truth,
             const std::string& annotations_file, const std::string& out_file) {
    const std::vector<fs::path> generated_files = case_files(generated);
    const std::vector<fs::path> truth_files = case_files(ground_truth);
    std::map<std::string, fs::path> truth_by_id;
    for (const fs::path& file : truth_files) truth_by_id[file.stem().string()] = file;

    nlohmann::json annotations = nlohmann::json::object();
    if (!annotations_file.empty()) {
        std::ifstream in(annotations_file);
        if (!in) throw Error("cannot open " + annotations_file);
        in >> annotations;
    }

    std::vector<EvalPair> pairs;
    for (const fs::path& file : generated_files) {
        const std::string case_id = file.stem().string();
        const auto truth = truth_by_id.find(case_id);
        if (truth == truth_by_id.end())
            throw Error("no ground-truth case for " + case_id);
        EvalPair pair;
        pair.case_id = case_id;
        pair.generated = load_case(file);
        pair.ground_truth = load_case(truth->second);
        if (annotations.contains(case_id))
            pair.annotation =
                annotations.at(case_id).at("essential").get<std::vector<int>>();
        pairs.push_back(std::move(pair));
    }

    const EvalReport report = evaluate_corpus(pairs);
    const nlohmann::json doc = report_to_json(report);
    if (!out_file.empty()) write_output_file(out_file, doc.dump(2) + "\n");
    std::cout << doc.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functional GUI test generation from retrieved test knowledge"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string run_dir = "logidroid-run";
    app.add_option("--run-dir", run_dir, "Directory for run artifacts");
    app.add_flag("--verbose", g_verbose, "Verbose progress output");

    // build-db
    auto* build_db = app.add_subcommand("build-db", "Ingest test cases into a knowledge store");
    std::string cases_dir, out_dir, embedder_spec = "deterministic", llm_spec;
    build_db->add_option("--cases", cases_dir, "Directory of test-case JSON files")
        ->required();
    build_db->add_option("--out", out_dir, "Store directory to create")->required();
    build_db->add_option("--embedder", embedder_spec, "deterministic | http:<url>");
    build_db->add_option("--llm", llm_spec, "scripted:<file> | http:<url>")->required();

    // query
    auto* query = app.add_subcommand("query", "Retrieve similar cases from a store");
    std::string db_dir, category, requirement, exclude_app;
    int top = 3;
    query->add_option("--db", db_dir, "Store directory")->required();
    query->add_option("--category", category, "Application category")->required();
    query->add_option("--requirement", requirement, "Requirement text")->required();
    query->add_option("--top", top, "Number of results");
    query->add_option("--exclude-app", exclude_app, "App id to exclude");

    // fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse retrieved cases into business logic");
    std::string fuse_db, fuse_category, fuse_requirement, fuse_exclude, fuse_llm,
        fuse_out = "logic.json";
    int fuse_top = 3;
    fuse_cmd->add_option("--db", fuse_db, "Store directory")->required();
    fuse_cmd->add_option("--category", fuse_category, "Application category")->required();
    fuse_cmd->add_option("--requirement", fuse_requirement, "Requirement text")->required();
    fuse_cmd->add_option("--top", fuse_top, "Number of retrieved cases");
    fuse_cmd->add_option("--exclude-app", fuse_exclude, "App id to exclude");
    fuse_cmd->add_option("--llm", fuse_llm, "scripted:<file> | http:<url>")->required();
    fuse_cmd->add_option("--out", fuse_out, "Logic output file");

    // generate
    auto* generate = app.add_subcommand("generate", "Run the full generation pipeline");
    RunConfig config;
    std::string gen_exclude, gen_out = "case.json", device_spec;
    generate->add_option("--db", config.store_dir, "Store directory");
    generate->add_option("--requirement", config.requirement, "Requirement text")
        ->required();
    generate->add_option("--category", config.category, "Application category")->required();
    generate->add_option("--app-model", config.app_model, "Simulated app model JSON");
    generate->add_option("--device", device_spec, "adb:<serial> for a real device");
    generate->add_option("--llm", config.llm_spec, "scripted:<file> | http:<url>")
        ->required();
    generate->add_option("--out", gen_out, "Synthesized case output file");
    generate->add_option("--step-num", config.step_num, "Sliding window size");
    generate->add_option("--top", config.top_sim, "Number of retrieved cases");
    generate->add_option("--attempt-limit", config.attempt_limit,
                         "Consecutive failed judgments before a skip");
    generate->add_option("--exclude-app", gen_exclude, "App id to exclude from retrieval");
    generate->add_option("--embedder", config.embedder_spec, "deterministic | http:<url>");
    generate->add_option("--budget-multiplier", config.call_budget_multiplier,
                         "Provider-call budget per logic step");
    generate->add_flag("--no-retrieval", config.no_retrieval,
                       "Fuse from the requirement alone, without a store");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Compare generated cases to ground truth");
    std::string eval_generated, eval_truth, eval_annotations, eval_out = "report.json";
    eval_cmd->add_option("--generated", eval_generated, "Generated case file or directory")
        ->required();
    eval_cmd->add_option("--ground-truth", eval_truth, "Ground-truth file or directory")
        ->required();
    eval_cmd->add_option("--annotations", eval_annotations,
                         "Essential-step annotation JSON");
    eval_cmd->add_option("--out", eval_out, "Report output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build_db) return cmd_build_db(cases_dir, out_dir, embedder_spec, llm_spec);
        if (*query) return cmd_query(db_dir, category, requirement, top, exclude_app);
        if (*fuse_cmd)
            return cmd_fuse(fuse_db, fuse_category, fuse_requirement, fuse_top, fuse_exclude,
                            fuse_llm, fuse_out, run_dir);
        if (*generate) {
            if (!gen_exclude.empty()) config.exclude_app = gen_exclude;
            if (!device_spec.empty()) {
                if (device_spec.rfind("adb:", 0) != 0)
                    throw Error("--device expects adb:<serial>");
                config.adb_serial = device_spec.substr(4);
            }
            config.run_dir = run_dir;
            return cmd_generate(config, gen_out);
        }
        if (*eval_cmd) return cmd_eval(eval_generated, eval_truth, eval_annotations, eval_out);
    } catch (const PipelineError& e) {
        std::cerr << "aborted: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
