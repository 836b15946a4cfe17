#include "logidroid/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "logidroid/errors.hpp"
#include "logidroid/model.hpp"

namespace logidroid {

namespace {

std::uint64_t fnv1a_64(const std::string& s) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

// Splits "http://host:port/path" into client base and request path.
std::pair<std::string, std::string> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

DeterministicEmbedder::DeterministicEmbedder(int dimension) : dimension_(dimension) {
    if (dimension_ <= 0) throw Error("embedder dimension must be positive");
}

std::vector<double> DeterministicEmbedder::embed(const std::string& text) {
    if (text.empty()) throw EmptyText("cannot embed empty text");
    const auto tokens = word_tokens(text);
    if (tokens.empty()) throw EmptyText("text contains no word tokens");
    std::vector<double> counts(static_cast<std::size_t>(dimension_), 0.0);
    for (const auto& token : tokens)
        counts[fnv1a_64(token) % static_cast<std::uint64_t>(dimension_)] += 1.0;
    return l2_normalized(std::move(counts));
}

HttpEmbedder::HttpEmbedder(std::string url) : url_(std::move(url)) {}

std::vector<double> HttpEmbedder::embed(const std::string& text) {
    if (text.empty()) throw EmptyText("cannot embed empty text");
    const auto [base, path] = split_url(url_);
    httplib::Client client(base);
    client.set_read_timeout(30, 0);
    const nlohmann::json body{{"text", text}};
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200)
        throw ProviderUnavailable("embedding endpoint " + url_ + " unavailable" +
                                  (res ? " (status " + std::to_string(res->status) + ")" : ""));
    std::vector<double> vec;
    try {
        vec = nlohmann::json::parse(res->body).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderUnavailable(std::string("malformed embedding response: ") + e.what());
    }
    if (vec.empty()) throw ProviderUnavailable("embedding response is empty");
    if (dimension_ == 0) dimension_ = static_cast<int>(vec.size());
    if (static_cast<int>(vec.size()) != dimension_)
        throw EmbeddingDimensionMismatch("embedding dimension changed from " +
                                         std::to_string(dimension_) + " to " +
                                         std::to_string(vec.size()));
    return l2_normalized(std::move(vec));
}

std::unique_ptr<Embedder> make_embedder(const std::string& spec) {
    if (spec == "deterministic" || spec.empty())
        return std::make_unique<DeterministicEmbedder>();
    if (spec.rfind("http:", 0) == 0) {
        std::string url = spec.substr(5);
        if (url.rfind("//", 0) == 0) url = "http:" + url;  // accept http:http://... and http://...
        if (url.rfind("http", 0) != 0) url = "http://" + url;
        return std::make_unique<HttpEmbedder>(url);
    }
    throw Error("unknown embedder spec: " + spec);
}

double l2_norm(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

std::vector<double> l2_normalized(std::vector<double> v) {
    const double norm = l2_norm(v);
    if (norm == 0.0) throw ZeroVector("cannot normalize the zero vector");
    for (double& x : v) x /= norm;
    return v;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("cosine_similarity: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine_similarity of a zero vector");
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot / (na * nb);
}

}  // namespace logidroid
