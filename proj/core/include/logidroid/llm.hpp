#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace logidroid {

// The five prompt structures used by the pipeline. Every outbound request
// carries exactly one role.
enum class PromptRole {
    summary_generation,
    knowledge_fusion,
    step_selection,
    instruction_generation,
    completion_judgment,
};

std::string to_string(PromptRole role);
std::optional<PromptRole> prompt_role_from_string(const std::string& name);

struct ChatRequest {
    PromptRole role = PromptRole::summary_generation;
    std::string rendered_prompt;
    std::string session_id;
    int turn = 0;  // strictly increasing within a session
};

struct ChatResponse {
    std::string text;
    std::string provider_id;
};

class LlmProvider {
public:
    virtual ~LlmProvider() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual std::string id() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted provider
// ---------------------------------------------------------------------------

// One scripted reply. A request matches when the roles are equal and, when
// set, turn equals and the rendered prompt contains `contains`. Entries are
// consumed at most once, first unconsumed match wins.
struct ScriptEntry {
    PromptRole role = PromptRole::summary_generation;
    std::optional<int> turn;
    std::optional<std::string> contains;
    std::string reply;
};

// Deterministic provider replaying a fixed transcript. An unmatched request
// raises ScriptExhausted naming the role and turn.
class ScriptedProvider : public LlmProvider {
public:
    explicit ScriptedProvider(std::vector<ScriptEntry> entries);

    // Accepts either a JSON array of {"match": {"role", "turn"?, "contains"?},
    // "reply"} objects, or a recorded transcript.jsonl (one {"role", "turn",
    // "reply", ...} object per line).
    static ScriptedProvider from_file(const std::filesystem::path& path);

    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "scripted"; }

    int consumed() const;
    int remaining() const;

private:
    std::vector<ScriptEntry> entries_;
    std::vector<bool> used_;
};

// ---------------------------------------------------------------------------
// Remote provider
// ---------------------------------------------------------------------------

// POSTs {"prompt": ...} to the endpoint with bearer-token auth taken from the
// LOGIDROID_LLM_TOKEN environment variable. The reply body is either
// {"text": ...} or raw text. Transport failures are retried.
class HttpProvider : public LlmProvider {
public:
    static constexpr int kRetries = 2;  // attempts = 1 + kRetries

    explicit HttpProvider(std::string url);

    ChatResponse complete(const ChatRequest& request) override;
    std::string id() const override { return "http:" + url_; }

private:
    std::string url_;
};

// spec is "scripted:<transcript.json>" or "http:<url>".
std::unique_ptr<LlmProvider> make_provider(const std::string& spec);

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

// Minimal completion surface; lets callers interpose budgets or counters.
class Completer {
public:
    virtual ~Completer() = default;
    virtual std::string complete(PromptRole role, const std::string& prompt) = 0;
};

// One conversation with a provider. Owns the turn counter and appends every
// request/response pair to the transcript log before returning the reply.
class LlmSession : public Completer {
public:
    LlmSession(LlmProvider& provider, std::string session_id,
               std::optional<std::filesystem::path> transcript_path = std::nullopt);

    std::string complete(PromptRole role, const std::string& prompt) override;

    int calls() const { return turn_; }
    const std::string& session_id() const { return session_id_; }
    const std::vector<std::pair<ChatRequest, ChatResponse>>& transcript() const {
        return transcript_;
    }

private:
    LlmProvider& provider_;
    std::string session_id_;
    std::optional<std::filesystem::path> transcript_path_;
    std::vector<std::pair<ChatRequest, ChatResponse>> transcript_;
    int turn_ = 0;
};

// Caps the number of completions; throws SessionAborted once spent.
class BudgetedCompleter : public Completer {
public:
    BudgetedCompleter(Completer& inner, int budget) : inner_(inner), budget_(budget) {}

    std::string complete(PromptRole role, const std::string& prompt) override;

    int used() const { return used_; }
    int budget() const { return budget_; }

private:
    Completer& inner_;
    int budget_;
    int used_ = 0;
};

}  // namespace logidroid
