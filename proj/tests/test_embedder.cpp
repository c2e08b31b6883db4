#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "themis/errors.hpp"
#include "themis/embed/embedder.hpp"
#include "themis/simd/kernels.hpp"

#include <cmath>

using namespace themis;
using namespace themis::embed;

TEST_CASE("mock embedder is deterministic and cached") {
    Embedder e(make_mock_embed_backend(384));
    auto a = e.embed("shared tools and budget pressure");
    auto b = e.embed("shared tools and budget pressure");
    CHECK(a.vector == b.vector);
    CHECK(e.cache_size() == 1);
    CHECK(a.model_id == b.model_id);
    CHECK(a.source_sha256.size() == 64);
}

TEST_CASE("mock embeddings are unit-norm with the configured dimension") {
    Embedder e(make_mock_embed_backend(384));
    auto v = e.embed("water storage tanks for the dry summer");
    CHECK(v.vector.size() == 384);
    double norm = std::sqrt(simd::dot(v.vector, v.vector));
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("unrelated texts stay dissimilar, related texts stay similar") {
    Embedder e(make_mock_embed_backend(384));
    auto a = e.embed("protected cycle lane on the harbor road junction");
    auto b = e.embed("compost rota fairness argument at the committee");
    CHECK(cosine(a, b) < 0.5);
    auto c = e.embed("protected cycle lane near the harbor road junction");
    CHECK(cosine(a, c) > 0.5);
    CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embed rejects empty text") {
    Embedder e(make_mock_embed_backend(64));
    CHECK_THROWS_AS(e.embed("   \n"), Error);
}

TEST_CASE("cosine error paths surface through the embedding wrapper") {
    Embedder e64(make_mock_embed_backend(64));
    Embedder e32(make_mock_embed_backend(32));
    auto a = e64.embed("alpha beta");
    auto b = e32.embed("alpha beta");
    CHECK_THROWS_AS(cosine(a, b), Error);
}

TEST_CASE("cache transparency: cached equals fresh backend output") {
    auto backend = make_mock_embed_backend(128);
    auto fresh = backend->embed_raw("rotation fairness debate");
    Embedder e(make_mock_embed_backend(128));
    auto first = e.embed("rotation fairness debate");
    auto second = e.embed("rotation fairness debate");
    CHECK(first.vector == fresh);
    CHECK(second.vector == fresh);
}

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

TEST_CASE("http embed backend parses the embeddings wire format") {
    httplib::Server server;
    server.Post("/v1/embeddings", [](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body);
        CHECK(body["input"][0] == "hello world");
        nlohmann::json out;
        std::vector<float> v(8, 0.0f);
        v[0] = 1.0f;
        out["data"] = nlohmann::json::array({nlohmann::json{{"embedding", v}}});
        res.set_content(out.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpEmbedConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.dim = 8;
    Embedder e(make_http_embed_backend(cfg));
    auto emb = e.embed("hello world");
    CHECK(emb.vector.size() == 8);
    CHECK(emb.vector[0] == doctest::Approx(1.0f));
    server.stop();
    t.join();
}
