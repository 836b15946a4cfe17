#include "logidroid/knowledge_store.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "logidroid/errors.hpp"
#include "logidroid/prompts.hpp"

namespace logidroid {

// ---------------------------------------------------------------------------
// Summary validation
// ---------------------------------------------------------------------------

std::string to_string(SummaryViolation violation) {
    switch (violation) {
        case SummaryViolation::empty: return "empty";
        case SummaryViolation::multi_sentence: return "multi-sentence";
        case SummaryViolation::too_long: return "too-long";
        case SummaryViolation::technical_terms: return "technical-terms";
    }
    return "empty";
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lowered(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) out.push_back(static_cast<char>(std::tolower(c)));
    return out;
}

bool contains_ci(const std::string& haystack, const std::string& lowercase_needle) {
    return lowered(haystack).find(lowercase_needle) != std::string::npos;
}

int word_count(const std::string& s) {
    std::istringstream in(s);
    std::string word;
    int n = 0;
    while (in >> word) ++n;
    return n;
}

}  // namespace

std::vector<SummaryViolation> summary_violations(const std::string& summary) {
    std::vector<SummaryViolation> out;
    const std::string text = trimmed(summary);
    if (text.empty()) {
        out.push_back(SummaryViolation::empty);
        return out;
    }

    int terminators = 0;
    for (char c : text)
        if (c == '.' || c == '!' || c == '?') ++terminators;
    const bool one_at_end =
        terminators == 1 && (text.back() == '.' || text.back() == '!' || text.back() == '?');
    if (terminators > 0 && !one_at_end) out.push_back(SummaryViolation::multi_sentence);

    if (word_count(text) > kSummaryWordLimit) out.push_back(SummaryViolation::too_long);

    const bool technical = text.find("```") != std::string::npos ||
                           contains_ci(text, "xpath") || text.find("//") != std::string::npos ||
                           contains_ci(text, "resource-id") || contains_ci(text, "resource_id") ||
                           contains_ci(text, "content-desc") || contains_ci(text, "content_desc") ||
                           contains_ci(text, "text=");
    if (technical) out.push_back(SummaryViolation::technical_terms);

    return out;
}

std::string generate_functional_summary(const TestCase& test_case,
                                        const std::string& category, Completer& llm,
                                        int max_rounds) {
    const std::string base = render_summary_prompt(test_case, category);
    std::string prompt = base;
    std::vector<SummaryViolation> last;
    for (int round = 0; round < max_rounds; ++round) {
        const std::string summary = trimmed(llm.complete(PromptRole::summary_generation, prompt));
        last = summary_violations(summary);
        if (last.empty()) return summary;
        std::ostringstream feedback;
        feedback << base << "\nFeedback: the previous summary was rejected because it was";
        for (std::size_t i = 0; i < last.size(); ++i)
            feedback << (i ? ", " : " ") << to_string(last[i]);
        feedback << ". Please answer with a single short sentence in natural English.\n";
        prompt = feedback.str();
    }
    std::ostringstream why;
    why << "summary rejected after " << max_rounds << " rounds:";
    for (const auto violation : last) why << ' ' << to_string(violation);
    throw SummaryRejected(why.str());
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kEntriesFile = "entries.jsonl";
constexpr const char* kMetaFile = "store.meta.json";
constexpr double kNormTolerance = 1e-6;

nlohmann::json entry_to_json(const KnowledgeEntry& entry) {
    return nlohmann::json{{"category", entry.category},
                          {"summary", entry.summary},
                          {"embedding", entry.embedding},
                          {"app_id", entry.app_id},
                          {"case", entry.test_case}};
}

KnowledgeEntry entry_from_json(const nlohmann::json& j) {
    KnowledgeEntry entry;
    entry.category = j.at("category").get<std::string>();
    entry.summary = j.at("summary").get<std::string>();
    entry.embedding = j.at("embedding").get<std::vector<double>>();
    entry.app_id = j.at("app_id").get<std::string>();
    entry.test_case = j.at("case").get<TestCase>();
    return entry;
}

}  // namespace

KnowledgeStore::KnowledgeStore(std::filesystem::path dir, std::shared_ptr<Embedder> embedder)
    : dir_(std::move(dir)),
      embedder_(std::move(embedder)),
      mutex_(std::make_unique<std::shared_mutex>()) {}

KnowledgeStore KnowledgeStore::create(const std::filesystem::path& dir,
                                      std::shared_ptr<Embedder> embedder) {
    if (!embedder) throw StoreError("store creation requires an embedder");
    if (std::filesystem::exists(dir / kEntriesFile))
        throw StoreError("store already exists at " + dir.string());
    std::filesystem::create_directories(dir);
    KnowledgeStore store(dir, std::move(embedder));
    store.embedder_id_ = store.embedder_->id();
    store.dimension_ = store.embedder_->dimension();
    std::ofstream(dir / kEntriesFile).flush();
    store.persist_meta();
    return store;
}

KnowledgeStore KnowledgeStore::open(const std::filesystem::path& dir,
                                    std::shared_ptr<Embedder> embedder_override) {
    std::ifstream meta_in(dir / kMetaFile);
    if (!meta_in) throw StoreError("no store at " + dir.string());
    nlohmann::json meta;
    meta_in >> meta;

    const std::string embedder_id = meta.at("embedder").get<std::string>();
    const int dimension = meta.at("dimension").get<int>();
    std::shared_ptr<Embedder> embedder = std::move(embedder_override);
    if (!embedder) {
        if (embedder_id == "deterministic" && dimension > 0)
            embedder = std::make_shared<DeterministicEmbedder>(dimension);
        else
            embedder = std::shared_ptr<Embedder>(make_embedder(embedder_id));
    }

    KnowledgeStore store(dir, std::move(embedder));
    store.embedder_id_ = embedder_id;
    store.dimension_ = dimension;
    store.categories_ = meta.value("categories", std::vector<std::string>{});

    std::ifstream in(dir / kEntriesFile);
    if (in) {
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                store.entries_.push_back(entry_from_json(nlohmann::json::parse(line)));
            } catch (const std::exception& e) {
                throw StoreError("bad entry at line " + std::to_string(line_no) + ": " +
                                 e.what());
            }
        }
    }
    return store;
}

KnowledgeEntry KnowledgeStore::ingest(const TestCase& test_case, Completer& summary_llm) {
    if (auto why = validate(test_case)) throw Error("invalid test case: " + *why);

    KnowledgeEntry entry;
    entry.category = test_case.category;
    entry.app_id = test_case.app_id;
    entry.test_case = test_case;
    entry.summary = generate_functional_summary(test_case, test_case.category, summary_llm);
    entry.embedding = embedder_->embed(entry.summary);
    insert(std::move(entry));
    return entries_.back();
}

void KnowledgeStore::insert(KnowledgeEntry entry) {
    std::unique_lock lock(*mutex_);
    if (dimension_ == 0) {
        dimension_ = static_cast<int>(entry.embedding.size());
    } else if (static_cast<int>(entry.embedding.size()) != dimension_) {
        throw EmbeddingDimensionMismatch(
            "entry embedding has dimension " + std::to_string(entry.embedding.size()) +
            ", store declares " + std::to_string(dimension_));
    }
    if (std::abs(l2_norm(entry.embedding) - 1.0) > kNormTolerance)
        throw Error("entry embedding is not L2-normalized");

    if (std::find(categories_.begin(), categories_.end(), entry.category) ==
        categories_.end())
        categories_.push_back(entry.category);

    std::ofstream out(dir_ / kEntriesFile, std::ios::app);
    if (!out) throw StoreError("cannot append to " + (dir_ / kEntriesFile).string());
    out << entry_to_json(entry).dump() << '\n';
    entries_.push_back(std::move(entry));
    persist_meta();
}

std::vector<RetrievalResult> KnowledgeStore::rank(
    const std::string& requirement, const std::optional<std::string>& category,
    const std::optional<std::string>& exclude_app, int top_sim) const {
    if (top_sim < 1) throw Error("top_sim must be >= 1");
    if (entries_.empty()) return {};

    const std::vector<double> query = embedder_->embed(requirement);
    std::vector<std::pair<double, std::size_t>> scored;  // (score, insertion index)
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const KnowledgeEntry& entry = entries_[i];
        if (category && entry.category != *category) continue;
        if (exclude_app && entry.app_id == *exclude_app) continue;
        scored.emplace_back(cosine_similarity(query, entry.embedding), i);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // equal scores: insertion order
    });
    if (scored.size() > static_cast<std::size_t>(top_sim)) scored.resize(top_sim);

    std::vector<RetrievalResult> out;
    out.reserve(scored.size());
    for (const auto& [score, index] : scored) out.push_back({entries_[index], score});
    return out;
}

std::vector<RetrievalResult> KnowledgeStore::retrieve(
    const std::string& requirement, const std::string& category,
    const std::optional<std::string>& exclude_app, int top_sim) const {
    std::shared_lock lock(*mutex_);
    if (std::find(categories_.begin(), categories_.end(), category) == categories_.end())
        throw UnknownCategory("category not in store: " + category);
    return rank(requirement, category, exclude_app, top_sim);
}

std::vector<RetrievalResult> KnowledgeStore::retrieve_any_category(
    const std::string& requirement, const std::optional<std::string>& exclude_app,
    int top_sim) const {
    std::shared_lock lock(*mutex_);
    return rank(requirement, std::nullopt, exclude_app, top_sim);
}

std::size_t KnowledgeStore::size() const {
    std::shared_lock lock(*mutex_);
    return entries_.size();
}

int KnowledgeStore::dimension() const {
    std::shared_lock lock(*mutex_);
    return dimension_;
}

std::vector<std::string> KnowledgeStore::categories() const {
    std::shared_lock lock(*mutex_);
    return categories_;
}

std::map<std::string, int> KnowledgeStore::category_counts() const {
    std::shared_lock lock(*mutex_);
    std::map<std::string, int> counts;
    for (const auto& entry : entries_) ++counts[entry.category];
    return counts;
}

std::vector<KnowledgeEntry> KnowledgeStore::entries() const {
    std::shared_lock lock(*mutex_);
    return entries_;
}

void KnowledgeStore::persist_meta() const {
    const nlohmann::json meta{{"dimension", dimension_},
                              {"embedder", embedder_id_.empty() ? embedder_->id() : embedder_id_},
                              {"categories", categories_}};
    std::ofstream out(dir_ / kMetaFile, std::ios::trunc);
    if (!out) throw StoreError("cannot write " + (dir_ / kMetaFile).string());
    out << meta.dump(2) << '\n';
}

}  // namespace logidroid
