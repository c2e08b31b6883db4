#pragma once

#include "themis/core/artifacts.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace themis::llm {

enum class RoleTag {
    coder,
    relation_classifier,
    subtheme_synthesizer,
    theme_synthesizer,
    reviewer,
    deductive_coder,
    judge_fitness,
    judge_coverage,
};

const char* role_name(RoleTag role);
bool is_judge_role(RoleTag role);

struct CompletionRequest {
    RoleTag role = RoleTag::coder;
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 4096;
    std::optional<std::uint64_t> seed_hint;
};

struct TokenUsage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

struct CompletionResult {
    std::string text;
    std::string backend_id;
    int attempt_count = 1;
    TokenUsage usage;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // May throw BackendUnavailable for transient failures; the gateway
    // retries those.
    virtual CompletionResult complete(const CompletionRequest& request) = 0;
    virtual std::string id() const = 0;
};

// Deterministic offline backend: the response is a pure function of
// (role, prompt, seed_hint) and always parses under the role's schema.
std::unique_ptr<ChatBackend> make_mock_backend();

struct HttpBackendConfig {
    std::string base_url = "http://localhost:8000";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_ms = 60000;
};

std::unique_ptr<ChatBackend> make_http_backend(HttpBackendConfig config);

// --------------------------------------------------------------------------
// Structured output
// --------------------------------------------------------------------------

enum class SchemaTag {
    code_list,
    relation_label,
    subtheme_list,
    theme_list,
    edit_list,
    assignment_list,
    judge_score,
};

// Pulls the first JSON object/array out of the text (stripping code fences)
// and validates it against the tagged schema. judge_score must be an integer
// in 1..10 and is returned as {"score": n}. Throws MalformedResponse.
json parse_structured(const std::string& text, SchemaTag tag);

// --------------------------------------------------------------------------
// Prompt templates
// --------------------------------------------------------------------------

// Templates are versioned text files, one per role, with {placeholder}
// substitution. Their hashes go into the run manifest.
class PromptLibrary {
public:
    // Loads <role>.txt for every role from `dir`; falls back to
    // $THEMIS_PROMPT_DIR, ./prompts, then the build-time source directory.
    static PromptLibrary load(const std::filesystem::path& dir = {});

    std::string render(RoleTag role, const std::map<std::string, std::string>& vars) const;
    const std::string& raw(RoleTag role) const;
    std::map<std::string, std::string> hashes() const; // role name -> sha256

private:
    std::map<RoleTag, std::string> templates_;
};

// --------------------------------------------------------------------------
// Gateway
// --------------------------------------------------------------------------

struct RetryPolicy {
    int max_attempts = 5;
    int base_delay_ms = 1000;
    double factor = 2.0;
};

struct GatewayOptions {
    RetryPolicy retry;
    std::filesystem::path trace_path; // empty = no request tracing
    int inflight_limit = 4;
    std::function<void(int)> sleeper; // injectable for tests (ms)
};

// Uniform chat-completion front door: request validation, retry with
// exponential backoff, serialized trace logging, and structured parsing with
// a single repair re-prompt.
class Gateway {
public:
    Gateway(ChatBackend& backend, GatewayOptions options = {});

    CompletionResult complete(const CompletionRequest& request);

    // complete + parse_structured; on a parse failure re-prompts once with a
    // schema reminder, then throws MalformedResponse.
    json complete_parsed(const CompletionRequest& request, SchemaTag tag);

    int inflight_limit() const { return options_.inflight_limit; }
    const std::string& backend_id() const { return backend_id_; }

private:
    ChatBackend& backend_;
    GatewayOptions options_;
    std::string backend_id_;
    std::mutex trace_mutex_;

    void trace(const CompletionRequest& request, const CompletionResult& result);
};

} // namespace themis::llm
