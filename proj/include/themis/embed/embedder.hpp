#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace themis::embed {

struct Embedding {
    std::vector<float> vector;
    std::string model_id;
    std::string source_sha256;
};

class EmbedBackend {
public:
    virtual ~EmbedBackend() = default;
    virtual std::vector<float> embed_raw(const std::string& text) = 0;
    virtual std::size_t dim() const = 0;
    virtual std::string model_id() const = 0;
};

// Seeded token-hash bag-of-words projected to `dim` dimensions and
// L2-normalized: deterministic and similarity-preserving enough for offline
// runs and tests.
std::unique_ptr<EmbedBackend> make_mock_embed_backend(std::size_t dim = 384);

struct HttpEmbedConfig {
    std::string base_url = "http://localhost:8000";
    std::string model = "text-embedding-3-small";
    std::string api_key_env = "OPENAI_API_KEY";
    std::size_t dim = 384;
    int timeout_ms = 60000;
};

std::unique_ptr<EmbedBackend> make_http_embed_backend(HttpEmbedConfig config);

// Front door with a per-run cache keyed by the sha256 of the text.
class Embedder {
public:
    explicit Embedder(std::unique_ptr<EmbedBackend> backend);

    // Throws EmptyText on whitespace-only input.
    Embedding embed(const std::string& text);

    std::size_t dim() const { return backend_->dim(); }
    std::string model_id() const { return backend_->model_id(); }
    std::size_t cache_size() const;

private:
    std::unique_ptr<EmbedBackend> backend_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Embedding> cache_;
};

// Cosine over embeddings; throws DimensionMismatch / ZeroVector.
double cosine(const Embedding& a, const Embedding& b);

} // namespace themis::embed
