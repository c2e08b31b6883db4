#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "themis/errors.hpp"
#include "themis/llm/gateway.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <thread>
#include "themis/util/rng.hpp"

using namespace themis;
using namespace themis::llm;

namespace {

// Canned backend for retry/repair paths.
class ScriptedBackend final : public ChatBackend {
public:
    std::vector<std::string> script;
    int failures_before_success = 0;
    int calls = 0;

    CompletionResult complete(const CompletionRequest&) override {
        ++calls;
        if (failures_before_success > 0) {
            --failures_before_success;
            raise(Errc::backend_unavailable, "scripted outage");
        }
        CompletionResult r;
        r.text = script.empty() ? "{}" : script[std::min<std::size_t>(calls - 1, script.size() - 1)];
        r.backend_id = id();
        return r;
    }
    std::string id() const override { return "scripted"; }
};

GatewayOptions fast_options() {
    GatewayOptions o;
    o.retry.base_delay_ms = 1;
    o.sleeper = [](int) {};
    return o;
}

} // namespace

TEST_CASE("parse_structured: judge scores") {
    CHECK(parse_structured("{\"score\": 7}", SchemaTag::judge_score)["score"] == 7);
    CHECK(parse_structured("Sure! ```json {\"score\": 10}```", SchemaTag::judge_score)["score"] ==
          10);
    CHECK_THROWS_AS(parse_structured("{\"score\": 11}", SchemaTag::judge_score), Error);
    CHECK_THROWS_AS(parse_structured("{\"score\": 0}", SchemaTag::judge_score), Error);
    CHECK_THROWS_AS(parse_structured("{\"score\": 6.5}", SchemaTag::judge_score), Error);
    CHECK_THROWS_AS(parse_structured("no json at all", SchemaTag::judge_score), Error);
}

TEST_CASE("parse_structured: lists and relations") {
    std::string codes = R"(prefix [{"label":"l","description":"d","quotes":["q"]}] suffix)";
    auto arr = parse_structured(codes, SchemaTag::code_list);
    CHECK(arr.size() == 1);
    CHECK_THROWS_AS(parse_structured("[]", SchemaTag::code_list), Error);
    CHECK_THROWS_AS(
        parse_structured(R"([{"label":"l","description":"d","quotes":[]}])", SchemaTag::code_list),
        Error);
    CHECK(parse_structured(R"({"relation":"subordinate"})", SchemaTag::relation_label)["relation"] ==
          "subordinate");
    CHECK_THROWS_AS(parse_structured(R"({"relation":"sibling"})", SchemaTag::relation_label),
                    Error);
    CHECK(parse_structured(R"(["cid_000001"])", SchemaTag::assignment_list).size() == 1);
    CHECK(parse_structured("[]", SchemaTag::edit_list).empty());
}

TEST_CASE("parse_structured handles nested braces inside strings") {
    std::string tricky = R"(note {"score": 3} trailing)";
    CHECK(parse_structured(tricky, SchemaTag::judge_score)["score"] == 3);
    std::string nested = R"([{"label":"a {weird} label","description":"d","quotes":["q{"]}])";
    CHECK(parse_structured(nested, SchemaTag::code_list).size() == 1);
}

TEST_CASE("gateway validates requests before dispatch") {
    ScriptedBackend backend;
    Gateway gw(backend, fast_options());
    CompletionRequest bad;
    bad.prompt = "x";
    bad.temperature = -1.0;
    CHECK_THROWS_AS(gw.complete(bad), Error);
    CHECK(backend.calls == 0);
    bad.temperature = 0.0;
    bad.max_tokens = 0;
    CHECK_THROWS_AS(gw.complete(bad), Error);
    CHECK(backend.calls == 0);
}

TEST_CASE("gateway retries transient failures with bounded attempts") {
    ScriptedBackend backend;
    backend.failures_before_success = 3;
    backend.script = {"{\"score\": 5}"};
    Gateway gw(backend, fast_options());
    CompletionRequest req;
    req.role = RoleTag::judge_fitness;
    req.prompt = "rate";
    req.temperature = 0.3;
    auto result = gw.complete(req);
    CHECK(result.attempt_count == 4);
    CHECK(result.attempt_count <= 5);

    ScriptedBackend dead;
    dead.failures_before_success = 99;
    Gateway gw2(dead, fast_options());
    bool unavailable = false;
    try {
        gw2.complete(req);
    } catch (const Error& err) {
        unavailable = err.code() == Errc::backend_unavailable;
    }
    CHECK(unavailable);
    CHECK(dead.calls == 5);
}

TEST_CASE("complete_parsed repairs once then fails hard") {
    ScriptedBackend backend;
    backend.script = {"not json, sorry", "{\"score\": 9}"};
    Gateway gw(backend, fast_options());
    CompletionRequest req;
    req.role = RoleTag::judge_fitness;
    req.prompt = "rate";
    auto parsed = gw.complete_parsed(req, SchemaTag::judge_score);
    CHECK(parsed["score"] == 9);
    CHECK(backend.calls == 2);

    ScriptedBackend hopeless;
    hopeless.script = {"junk", "more junk"};
    Gateway gw2(hopeless, fast_options());
    bool malformed = false;
    try {
        gw2.complete_parsed(req, SchemaTag::judge_score);
    } catch (const Error& err) {
        malformed = err.code() == Errc::malformed_response;
    }
    CHECK(malformed);
    CHECK(hopeless.calls == 2);
}

TEST_CASE("mock backend is deterministic in (role, prompt, seed_hint)") {
    auto mock = make_mock_backend();
    CompletionRequest req;
    req.role = RoleTag::judge_fitness;
    req.prompt = "### CODES\ncid_000001 :: budget\n### END CODES\n### TEXT\nshared budget\n### END TEXT";
    req.seed_hint = 11;
    auto a = mock->complete(req);
    auto b = mock->complete(req);
    CHECK(a.text == b.text);
    req.seed_hint = 12;
    auto c = mock->complete(req);
    req.prompt += " ";
    auto d = mock->complete(req);
    bool varies = a.text != c.text || c.text != d.text;
    CHECK(varies);
}

TEST_CASE("mock coder emits the requested number of parsable drafts") {
    auto mock = make_mock_backend();
    PromptLibrary prompts = PromptLibrary::load();
    CompletionRequest req;
    req.role = RoleTag::coder;
    req.prompt = prompts.render(
        RoleTag::coder,
        {{"n_codes", "20"},
         {"min_quote_chars", "20"},
         {"chunk_text",
          "Members organized water storage and compost rotas through the dry summer. "
          "The committee debated rotation fairness for two seasons. Shared tools broke "
          "and the budget question kept returning at every monthly meeting."}});
    auto result = mock->complete(req);
    auto parsed = parse_structured(result.text, SchemaTag::code_list);
    CHECK(parsed.size() == 20);
    for (const auto& item : parsed) {
        CHECK(item["quotes"].size() >= 1);
    }
}

TEST_CASE("every mock role emits schema-valid output even for arbitrary prompts") {
    auto mock = make_mock_backend();
    SplitMix64 rng(5);
    auto schema_for = [](RoleTag role) {
        switch (role) {
            case RoleTag::coder: return SchemaTag::code_list;
            case RoleTag::relation_classifier: return SchemaTag::relation_label;
            case RoleTag::subtheme_synthesizer: return SchemaTag::subtheme_list;
            case RoleTag::theme_synthesizer: return SchemaTag::theme_list;
            case RoleTag::reviewer: return SchemaTag::edit_list;
            case RoleTag::deductive_coder: return SchemaTag::assignment_list;
            default: return SchemaTag::judge_score;
        }
    };
    const RoleTag roles[] = {RoleTag::coder,          RoleTag::relation_classifier,
                             RoleTag::subtheme_synthesizer, RoleTag::theme_synthesizer,
                             RoleTag::reviewer,       RoleTag::deductive_coder,
                             RoleTag::judge_fitness,  RoleTag::judge_coverage};
    for (RoleTag role : roles) {
        for (int trial = 0; trial < 10; ++trial) {
            CompletionRequest req;
            req.role = role;
            req.seed_hint = rng.next();
            std::size_t len = 1 + rng.bounded(200);
            for (std::size_t i = 0; i < len; ++i) {
                req.prompt.push_back(static_cast<char>('a' + rng.bounded(26)));
                if (rng.bounded(6) == 0) req.prompt.push_back(' ');
            }
            auto result = mock->complete(req);
            CHECK_NOTHROW(parse_structured(result.text, schema_for(role)));
        }
    }
}

TEST_CASE("prompt library loads all roles and hashes them") {
    PromptLibrary prompts = PromptLibrary::load();
    auto hashes = prompts.hashes();
    CHECK(hashes.size() == 8);
    for (const auto& [role, hash] : hashes) {
        CHECK(hash.size() == 64);
    }
    std::string rendered = prompts.render(RoleTag::coder, {{"n_codes", "20"},
                                                           {"min_quote_chars", "20"},
                                                           {"chunk_text", "hello"}});
    CHECK(rendered.find("{n_codes}") == std::string::npos);
    CHECK(rendered.find("hello") != std::string::npos);
    // JSON braces in the template survive rendering
    CHECK(rendered.find("{\"label\"") != std::string::npos);
}

TEST_CASE("judge role default temperature") {
    CHECK(is_judge_role(RoleTag::judge_fitness));
    CHECK(is_judge_role(RoleTag::judge_coverage));
    CHECK_FALSE(is_judge_role(RoleTag::coder));
}

TEST_CASE("http backend speaks the chat-completions wire format") {
    httplib::Server server;
    int hits = 0;
    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    ++hits;
                    auto body = themis::json::parse(req.body);
                    CHECK(body["model"] == "test-model");
                    CHECK(body["messages"][0]["content"] == "say hi");
                    if (hits == 1) {
                        res.status = 503; // transient: the gateway must retry
                        return;
                    }
                    themis::json out;
                    out["choices"] =
                        themis::json::array({themis::json{{"message", {{"role", "assistant"},
                                                                       {"content", "hi"}}}}});
                    out["usage"] = {{"prompt_tokens", 3}, {"completion_tokens", 1}};
                    res.set_content(out.dump(), "application/json");
                });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.model = "test-model";
    auto backend = make_http_backend(cfg);
    Gateway gw(*backend, fast_options());
    CompletionRequest req;
    req.role = RoleTag::coder;
    req.prompt = "say hi";
    auto result = gw.complete(req);
    CHECK(result.text == "hi");
    CHECK(result.attempt_count == 2);
    CHECK(result.usage.prompt_tokens == 3);
    server.stop();
    t.join();
}

TEST_CASE("request tracing writes hash-keyed JSONL lines") {
    auto dir = std::filesystem::temp_directory_path() / "themis_trace_test";
    std::filesystem::create_directories(dir);
    auto path = dir / "trace.jsonl";
    std::filesystem::remove(path);
    auto mock = make_mock_backend();
    GatewayOptions options = fast_options();
    options.trace_path = path;
    Gateway gw(*mock, options);
    CompletionRequest req;
    req.role = RoleTag::judge_fitness;
    req.prompt = "rate this";
    req.temperature = 0.3;
    req.seed_hint = 5;
    gw.complete(req);
    gw.complete(req);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = themis::json::parse(line);
        CHECK(j.at("prompt_sha256").get<std::string>().size() == 64);
        CHECK(j.at("role") == "judge_fitness");
        CHECK(j.contains("response"));
        ++lines;
    }
    CHECK(lines == 2);
    std::filesystem::remove_all(dir);
}
