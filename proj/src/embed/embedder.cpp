#include "themis/embed/embedder.hpp"

#include "themis/errors.hpp"
#include "themis/simd/kernels.hpp"
#include "themis/util/misc.hpp"
#include "themis/util/rng.hpp"
#include "themis/util/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>

namespace themis::embed {

namespace {

// Fixed salt so the mock embedding space is stable across runs, exactly like
// a pinned embedding model would be.
constexpr std::uint64_t kMockEmbedSalt = 0x7E151D0DD15EA5EDULL;

class MockEmbedBackend final : public EmbedBackend {
public:
    explicit MockEmbedBackend(std::size_t dim) : dim_(dim) {}

    std::vector<float> embed_raw(const std::string& text) override {
        std::vector<float> v(dim_, 0.0f);
        for (const auto& tok : content_tokens(text)) {
            SplitMix64 rng(fnv1a64(tok) ^ kMockEmbedSalt);
            // each token spreads over four signed dimensions
            for (int j = 0; j < 4; ++j) {
                std::uint64_t h = rng.next();
                std::size_t d = static_cast<std::size_t>(h % dim_);
                float sign = (h >> 63) ? -1.0f : 1.0f;
                v[d] += sign / static_cast<float>(1 + j);
            }
        }
        double norm = std::sqrt(themis::simd::dot(v, v));
        if (norm > 0.0) {
            themis::simd::scale_in_place(v, static_cast<float>(1.0 / norm));
        } else {
            v[0] = 1.0f; // degenerate input: deterministic unit basis vector
        }
        return v;
    }

    std::size_t dim() const override { return dim_; }
    std::string model_id() const override {
        return "mock-hash-" + std::to_string(dim_) + "d";
    }

private:
    std::size_t dim_;
};

class HttpEmbedBackend final : public EmbedBackend {
public:
    explicit HttpEmbedBackend(HttpEmbedConfig config) : config_(std::move(config)) {}

    std::vector<float> embed_raw(const std::string& text) override {
        nlohmann::json body;
        body["model"] = config_.model;
        body["input"] = nlohmann::json::array({text});
        httplib::Client client(config_.base_url);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto res = client.Post("/v1/embeddings", headers, body.dump(), "application/json");
        if (!res || res->status == 429 || res->status >= 500) {
            raise(Errc::backend_unavailable, "embeddings endpoint unavailable");
        }
        if (res->status != 200) {
            raise(Errc::malformed_response,
                  "embeddings endpoint status " + std::to_string(res->status));
        }
        try {
            auto parsed = nlohmann::json::parse(res->body);
            std::vector<float> v = parsed.at("data").at(0).at("embedding").get<std::vector<float>>();
            if (v.size() != config_.dim) {
                raise(Errc::dimension_mismatch,
                      "embedding dim " + std::to_string(v.size()) + " != configured " +
                          std::to_string(config_.dim));
            }
            return v;
        } catch (const nlohmann::json::exception& ex) {
            raise(Errc::malformed_response, std::string("bad embeddings body: ") + ex.what());
        }
    }

    std::size_t dim() const override { return config_.dim; }
    std::string model_id() const override { return config_.model; }

private:
    HttpEmbedConfig config_;
};

} // namespace

std::unique_ptr<EmbedBackend> make_mock_embed_backend(std::size_t dim) {
    return std::make_unique<MockEmbedBackend>(dim);
}

std::unique_ptr<EmbedBackend> make_http_embed_backend(HttpEmbedConfig config) {
    return std::make_unique<HttpEmbedBackend>(std::move(config));
}

Embedder::Embedder(std::unique_ptr<EmbedBackend> backend) : backend_(std::move(backend)) {}

Embedding Embedder::embed(const std::string& text) {
    if (trim_view(text).empty()) {
        raise(Errc::empty_text, "cannot embed empty text");
    }
    std::string key = sha256_hex(text);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    Embedding e;
    e.vector = backend_->embed_raw(text);
    e.model_id = backend_->model_id();
    e.source_sha256 = key;
    for (float f : e.vector) {
        if (!std::isfinite(f)) raise(Errc::malformed_response, "non-finite embedding component");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(std::move(key), std::move(e)).first->second;
}

std::size_t Embedder::cache_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

double cosine(const Embedding& a, const Embedding& b) {
    return themis::simd::cosine(a.vector, b.vector);
}

} // namespace themis::embed
