#pragma once

#include <memory>
#include <string>
#include <vector>

namespace logidroid {

// Text embedding provider. Implementations return L2-normalized vectors.
class Embedder {
public:
    virtual ~Embedder() = default;

    // Throws EmptyText for empty or token-free input.
    virtual std::vector<double> embed(const std::string& text) = 0;

    // 0 means not yet known (remote embedders discover it on first call).
    virtual int dimension() const = 0;

    virtual std::string id() const = 0;
};

// Deterministic hashed bag-of-words: lowercase word tokens are hashed into
// a fixed number of buckets, counts accumulated, then L2-normalized. Needs
// no network and is the default in tests.
class DeterministicEmbedder : public Embedder {
public:
    static constexpr int kDefaultDimension = 256;

    explicit DeterministicEmbedder(int dimension = kDefaultDimension);

    std::vector<double> embed(const std::string& text) override;
    int dimension() const override { return dimension_; }
    std::string id() const override { return "deterministic"; }

private:
    int dimension_;
};

// Remote sentence-embedding service: POST {"text": ...} to the endpoint,
// expects {"embedding": [...]}. The vector is re-normalized locally and the
// dimension is fixed by the first response.
class HttpEmbedder : public Embedder {
public:
    explicit HttpEmbedder(std::string url);

    std::vector<double> embed(const std::string& text) override;
    int dimension() const override { return dimension_; }
    std::string id() const override { return "http:" + url_; }

private:
    std::string url_;
    int dimension_ = 0;
};

// spec is "deterministic" or "http:<url>".
std::unique_ptr<Embedder> make_embedder(const std::string& spec);

double l2_norm(const std::vector<double>& v);
std::vector<double> l2_normalized(std::vector<double> v);

// dot(a,b) / (|a||b|). Throws DimensionMismatch and ZeroVector.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace logidroid
