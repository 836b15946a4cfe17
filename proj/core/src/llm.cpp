#include "logidroid/llm.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "logidroid/errors.hpp"

namespace logidroid {

std::string to_string(PromptRole role) {
    switch (role) {
        case PromptRole::summary_generation: return "summary_generation";
        case PromptRole::knowledge_fusion: return "knowledge_fusion";
        case PromptRole::step_selection: return "step_selection";
        case PromptRole::instruction_generation: return "instruction_generation";
        case PromptRole::completion_judgment: return "completion_judgment";
    }
    return "summary_generation";
}

std::optional<PromptRole> prompt_role_from_string(const std::string& name) {
    if (name == "summary_generation") return PromptRole::summary_generation;
    if (name == "knowledge_fusion") return PromptRole::knowledge_fusion;
    if (name == "step_selection") return PromptRole::step_selection;
    if (name == "instruction_generation") return PromptRole::instruction_generation;
    if (name == "completion_judgment") return PromptRole::completion_judgment;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Scripted provider
// ---------------------------------------------------------------------------

ScriptedProvider::ScriptedProvider(std::vector<ScriptEntry> entries)
    : entries_(std::move(entries)), used_(entries_.size(), false) {}

namespace {

ScriptEntry entry_from_json(const nlohmann::json& j) {
    ScriptEntry entry;
    const nlohmann::json& match = j.contains("match") ? j.at("match") : j;
    const std::string role_name = match.at("role").get<std::string>();
    const auto role = prompt_role_from_string(role_name);
    if (!role) throw Error("unknown prompt role in script: " + role_name);
    entry.role = *role;
    if (match.contains("turn")) entry.turn = match.at("turn").get<int>();
    if (match.contains("contains")) entry.contains = match.at("contains").get<std::string>();
    entry.reply = j.at("reply").get<std::string>();
    return entry;
}

}  // namespace

ScriptedProvider ScriptedProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open script file: " + path.string());
    std::vector<ScriptEntry> entries;
    // A file starting with '[' is a JSON array; otherwise one object per line.
    char first = '\0';
    in >> std::ws;
    first = static_cast<char>(in.peek());
    if (first == '[') {
        nlohmann::json doc;
        in >> doc;
        for (const auto& item : doc) entries.push_back(entry_from_json(item));
    } else {
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            entries.push_back(entry_from_json(nlohmann::json::parse(line)));
        }
    }
    return ScriptedProvider(std::move(entries));
}

ChatResponse ScriptedProvider::complete(const ChatRequest& request) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (used_[i]) continue;
        const ScriptEntry& entry = entries_[i];
        if (entry.role != request.role) continue;
        if (entry.turn && *entry.turn != request.turn) continue;
        if (entry.contains &&
            request.rendered_prompt.find(*entry.contains) == std::string::npos)
            continue;
        used_[i] = true;
        return {entry.reply, id()};
    }
    throw ScriptExhausted("no scripted reply for role " + to_string(request.role) +
                          " at turn " + std::to_string(request.turn));
}

int ScriptedProvider::consumed() const {
    int n = 0;
    for (bool u : used_) n += u ? 1 : 0;
    return n;
}

int ScriptedProvider::remaining() const { return static_cast<int>(used_.size()) - consumed(); }

// ---------------------------------------------------------------------------
// Remote provider
// ---------------------------------------------------------------------------

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpProvider::HttpProvider(std::string url) : url_(std::move(url)) {}

ChatResponse HttpProvider::complete(const ChatRequest& request) {
    const auto [base, path] = split_url(url_);
    httplib::Client client(base);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* token = std::getenv("LOGIDROID_LLM_TOKEN"); token && *token)
        headers.emplace("Authorization", std::string("Bearer ") + token);
    const nlohmann::json body{{"prompt", request.rendered_prompt}};
    std::string last_error;
    for (int attempt = 0; attempt <= kRetries; ++attempt) {
        auto res = client.Post(path, headers, body.dump(), "application/json");
        if (res && res->status == 200) {
            std::string text = res->body;
            auto parsed = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
            if (parsed.is_object() && parsed.contains("text") && parsed["text"].is_string())
                text = parsed["text"].get<std::string>();
            return {text, id()};
        }
        last_error = res ? "status " + std::to_string(res->status)
                         : "transport error " + httplib::to_string(res.error());
    }
    throw ProviderUnavailable("provider " + url_ + " unavailable after " +
                              std::to_string(kRetries + 1) + " attempts: " + last_error);
}

std::unique_ptr<LlmProvider> make_provider(const std::string& spec) {
    if (spec.rfind("scripted:", 0) == 0)
        return std::make_unique<ScriptedProvider>(
            ScriptedProvider::from_file(spec.substr(9)));
    if (spec.rfind("http:", 0) == 0) {
        std::string url = spec.substr(5);
        if (url.rfind("//", 0) == 0) url = "http:" + url;
        if (url.rfind("http", 0) != 0) url = "http://" + url;
        return std::make_unique<HttpProvider>(url);
    }
    throw Error("unknown llm spec: " + spec + " (expected scripted:<file> or http:<url>)");
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

LlmSession::LlmSession(LlmProvider& provider, std::string session_id,
                       std::optional<std::filesystem::path> transcript_path)
    : provider_(provider),
      session_id_(std::move(session_id)),
      transcript_path_(std::move(transcript_path)) {
    if (transcript_path_) {
        if (transcript_path_->has_parent_path())
            std::filesystem::create_directories(transcript_path_->parent_path());
        std::ofstream(*transcript_path_, std::ios::trunc).flush();  // fresh log per session
    }
}

std::string LlmSession::complete(PromptRole role, const std::string& prompt) {
    if (prompt.empty()) throw MissingContextField("rendered prompt is empty");
    ChatRequest request{role, prompt, session_id_, ++turn_};
    ChatResponse response = provider_.complete(request);
    // Log before returning so a crash downstream still leaves the exchange.
    transcript_.emplace_back(request, response);
    if (transcript_path_) {
        std::ofstream out(*transcript_path_, std::ios::app);
        const nlohmann::json record{{"session", request.session_id},
                                    {"turn", request.turn},
                                    {"role", to_string(request.role)},
                                    {"prompt", request.rendered_prompt},
                                    {"reply", response.text},
                                    {"provider", response.provider_id}};
        out << record.dump() << '\n';
    }
    return response.text;
}

std::string BudgetedCompleter::complete(PromptRole role, const std::string& prompt) {
    if (used_ >= budget_)
        throw SessionAborted("provider call budget of " + std::to_string(budget_) +
                             " exhausted");
    ++used_;
    return inner_.complete(role, prompt);
}

}  // namespace logidroid
