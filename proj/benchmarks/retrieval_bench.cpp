#include <benchmark/benchmark.h>

#include <random>

#include "logidroid/embedding.hpp"
#include "logidroid/knowledge_store.hpp"
#include "support.hpp"

using namespace logidroid;
namespace ts = logidroid::testsupport;

namespace {

// A store at the scale of the full functional test dataset.
KnowledgeStore build_store(const std::filesystem::path& dir, int entries) {
    KnowledgeStore store =
        KnowledgeStore::create(dir, std::make_shared<DeterministicEmbedder>());
    DeterministicEmbedder embedder;
    std::mt19937 rng(97);
    const std::vector<std::string> categories = {"News", "Shopping", "Browser", "To-do"};
    for (int i = 0; i < entries; ++i) {
        const std::string summary =
            "Test " + ts::random_phrase(rng, 2, 6) + " " + std::to_string(i);
        const std::string app = "app" + std::to_string(i % 23);
        const std::string category = categories[i % categories.size()];
        store.insert({category, summary, embedder.embed(summary), app,
                      ts::make_case(app, category, {ts::click(ts::by_text("open"))})});
    }
    return store;
}

}  // namespace

static void BM_Embed(benchmark::State& state) {
    DeterministicEmbedder embedder;
    std::mt19937 rng(3);
    const std::string text = "Test " + ts::random_phrase(rng, 4, 8);
    for (auto _ : state) benchmark::DoNotOptimize(embedder.embed(text));
}
BENCHMARK(BM_Embed);

static void BM_RetrieveTop3(benchmark::State& state) {
    ts::TempDir dir("bench-store");
    KnowledgeStore store = build_store(dir.path(), static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            store.retrieve("Test adding and removing an item", "To-do",
                           std::string("app7"), 3));
}
BENCHMARK(BM_RetrieveTop3)->Arg(300)->Arg(1000);

static void BM_CosineSimilarity(benchmark::State& state) {
    DeterministicEmbedder embedder;
    const auto a = embedder.embed("Test adding an item to the list");
    const auto b = embedder.embed("Test removing an entry from the cart");
    for (auto _ : state) benchmark::DoNotOptimize(cosine_similarity(a, b));
}
BENCHMARK(BM_CosineSimilarity);
