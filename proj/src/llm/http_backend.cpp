#include "themis/llm/gateway.hpp"

#include "themis/errors.hpp"

#include <httplib.h>

#include <cstdlib>

namespace themis::llm {

namespace {

// OpenAI-style /v1/chat/completions client.
class HttpChatBackend final : public ChatBackend {
public:
    explicit HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {}

    CompletionResult complete(const CompletionRequest& request) override {
        json body;
        body["model"] = config_.model;
        body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
        body["temperature"] = request.temperature;
        body["max_tokens"] = request.max_tokens;
        if (request.seed_hint) body["seed"] = *request.seed_hint;

        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
        auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
        if (!res) {
            raise(Errc::backend_unavailable,
                  "no response from " + config_.base_url + " (transport error)");
        }
        if (res->status == 429 || res->status >= 500) {
            raise(Errc::backend_unavailable,
                  "backend returned status " + std::to_string(res->status));
        }
        if (res->status != 200) {
            raise(Errc::malformed_response, "backend returned status " +
                                                std::to_string(res->status) + ": " + res->body);
        }
        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::exception& ex) {
            raise(Errc::malformed_response, std::string("unparseable completion body: ") + ex.what());
        }
        CompletionResult result;
        try {
            result.text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception&) {
            raise(Errc::malformed_response, "completion body missing choices[0].message.content");
        }
        if (parsed.contains("usage")) {
            result.usage.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
            result.usage.completion_tokens = parsed["usage"].value("completion_tokens", 0);
        }
        result.backend_id = id();
        return result;
    }

    std::string id() const override { return "http:" + config_.base_url + "#" + config_.model; }

private:
    HttpBackendConfig config_;
};

} // namespace

std::unique_ptr<ChatBackend> make_http_backend(HttpBackendConfig config) {
    return std::make_unique<HttpChatBackend>(std::move(config));
}

} // namespace themis::llm
