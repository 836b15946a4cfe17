#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "logidroid/embedding.hpp"
#include "logidroid/llm.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

// One record of the functional test dataset. The category is the primary
// index, the summary embedding the secondary index, the test case the value.
struct KnowledgeEntry {
    std::string category;
    std::string summary;
    std::vector<double> embedding;  // L2-normalized, store dimension
    std::string app_id;
    TestCase test_case;

    bool operator==(const KnowledgeEntry&) const = default;
};

struct RetrievalResult {
    KnowledgeEntry entry;
    double score = 0.0;  // cosine similarity, in [-1, 1]
};

// ---------------------------------------------------------------------------
// Functional summaries
// ---------------------------------------------------------------------------

enum class SummaryViolation { empty, multi_sentence, too_long, technical_terms };

std::string to_string(SummaryViolation violation);

// Checks the acceptance criteria for a functional summary: exactly one
// sentence (a single terminal punctuation mark, or none), at most
// `kSummaryWordLimit` words, and no code fences, XPath, or widget-attribute
// key names. Returns the empty vector when the summary is acceptable.
inline constexpr int kSummaryWordLimit = 20;
std::vector<SummaryViolation> summary_violations(const std::string& summary);

// Generates a one-sentence summary for a test case, re-prompting with
// corrective feedback while the validator rejects the reply. Throws
// SummaryRejected after `max_rounds` provider calls.
std::string generate_functional_summary(const TestCase& test_case,
                                        const std::string& category, Completer& llm,
                                        int max_rounds = 3);

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

// Persisted corpus of knowledge entries with category-filtered top-k
// retrieval by cosine similarity. Layout on disk:
//   <dir>/entries.jsonl    one entry per line
//   <dir>/store.meta.json  {"dimension": int, "embedder": text, "categories": [...]}
//
// Concurrency: retrieval and counts take a shared lock, ingestion an
// exclusive one. Retrieval is pure given a loaded snapshot.
class KnowledgeStore {
public:
    // Creates an empty store directory. Fails if entries already exist.
    static KnowledgeStore create(const std::filesystem::path& dir,
                                 std::shared_ptr<Embedder> embedder);

    // Opens an existing store; the embedder is reconstructed from the meta
    // file unless an override is supplied.
    static KnowledgeStore open(const std::filesystem::path& dir,
                               std::shared_ptr<Embedder> embedder_override = nullptr);

    // Validates the case, generates its functional summary, embeds it, then
    // appends and persists the entry. The case is rejected before any
    // provider call if it violates its invariants.
    KnowledgeEntry ingest(const TestCase& test_case, Completer& summary_llm);

    // Appends a pre-built entry (used when replicating a store); enforces the
    // dimension and normalization invariants.
    void insert(KnowledgeEntry entry);

    // Top `top_sim` entries of the category by cosine similarity against the
    // embedded requirement, excluding `exclude_app`, in non-increasing score
    // order (ties by insertion order). Throws UnknownCategory for categories
    // the store has never seen.
    std::vector<RetrievalResult> retrieve(const std::string& requirement,
                                          const std::string& category,
                                          const std::optional<std::string>& exclude_app,
                                          int top_sim) const;

    // Like retrieve, but an unknown category falls back to searching every
    // category instead of failing.
    std::vector<RetrievalResult> retrieve_any_category(
        const std::string& requirement, const std::optional<std::string>& exclude_app,
        int top_sim) const;

    std::size_t size() const;
    int dimension() const;
    std::vector<std::string> categories() const;
    std::map<std::string, int> category_counts() const;
    std::vector<KnowledgeEntry> entries() const;
    const std::filesystem::path& dir() const { return dir_; }
    Embedder& embedder() { return *embedder_; }

private:
    KnowledgeStore(std::filesystem::path dir, std::shared_ptr<Embedder> embedder);

    std::vector<RetrievalResult> rank(const std::string& requirement,
                                      const std::optional<std::string>& category,
                                      const std::optional<std::string>& exclude_app,
                                      int top_sim) const;
    void persist_meta() const;

    std::filesystem::path dir_;
    std::shared_ptr<Embedder> embedder_;
    std::string embedder_id_;
    int dimension_ = 0;  // 0 until the first embedding fixes it
    std::vector<std::string> categories_;
    std::vector<KnowledgeEntry> entries_;
    mutable std::unique_ptr<std::shared_mutex> mutex_;
};

}  // namespace logidroid
