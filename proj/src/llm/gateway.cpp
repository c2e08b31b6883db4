#include "themis/llm/gateway.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

namespace themis::llm {

Gateway::Gateway(ChatBackend& backend, GatewayOptions options)
    : backend_(backend), options_(std::move(options)), backend_id_(backend.id()) {
    if (!options_.sleeper) {
        options_.sleeper = [](int ms) {
            std::this_thread::sleep_for(std::chrono::milliseconds(ms));
        };
    }
}

CompletionResult Gateway::complete(const CompletionRequest& request) {
    if (request.temperature < 0.0) {
        raise(Errc::invalid_request, "temperature must be >= 0");
    }
    if (request.max_tokens <= 0) {
        raise(Errc::invalid_request, "max_tokens must be positive");
    }
    int attempt = 0;
    for (;;) {
        ++attempt;
        try {
            CompletionResult result = backend_.complete(request);
            result.attempt_count = attempt;
            trace(request, result);
            return result;
        } catch (const Error& err) {
            if (err.code() != Errc::backend_unavailable || attempt >= options_.retry.max_attempts) {
                throw;
            }
            int delay = static_cast<int>(
                options_.retry.base_delay_ms *
                std::pow(options_.retry.factor, static_cast<double>(attempt - 1)));
            options_.sleeper(delay);
        }
    }
}

json Gateway::complete_parsed(const CompletionRequest& request, SchemaTag tag) {
    CompletionResult first = complete(request);
    try {
        return parse_structured(first.text, tag);
    } catch (const Error& err) {
        if (err.code() != Errc::malformed_response) throw;
    }
    // one repair re-prompt, then hard error
    CompletionRequest repair = request;
    repair.prompt += "\n\nReturn only valid JSON matching the schema.";
    CompletionResult second = complete(repair);
    return parse_structured(second.text, tag);
}

void Gateway::trace(const CompletionRequest& request, const CompletionResult& result) {
    if (options_.trace_path.empty()) return;
    std::lock_guard<std::mutex> lock(trace_mutex_);
    ojson line;
    line["prompt_sha256"] = sha256_hex(request.prompt);
    line["role"] = role_name(request.role);
    line["temperature"] = request.temperature;
    line["seed_hint"] = request.seed_hint ? json(*request.seed_hint) : json(nullptr);
    line["backend"] = result.backend_id;
    line["attempts"] = result.attempt_count;
    line["response"] = result.text;
    std::ofstream out(options_.trace_path, std::ios::app);
    if (out) out << line.dump() << "\n";
}

} // namespace themis::llm
