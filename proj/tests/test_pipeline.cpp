#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "themis/errors.hpp"
#include "themis/run/manifest.hpp"
#include "themis/run/replicates.hpp"
#include "themis/util/misc.hpp"

#include <filesystem>

using namespace themis;
using namespace themis::run;

namespace {

Config toy_config() {
    Config c = Config::load(std::filesystem::path(THEMIS_CONFIG_DIR) / "toy.json");
    return c;
}

// Ledger text with timestamps blanked, for determinism comparisons.
std::string timeless(const Ledger& ledger) {
    std::string out;
    for (const auto& e : ledger.entries()) {
        auto j = e.to_json();
        j["timestamp"] = "";
        out += j.dump();
        out.push_back('\n');
    }
    return out;
}

PipelineContext run_through_synthesis(const Config& config) {
    PipelineContext ctx = make_context(config);
    stage_ingest(ctx, THEMIS_TOY_CORPUS_DIR);
    stage_code(ctx);
    stage_synthesize(ctx);
    return ctx;
}

} // namespace

TEST_CASE("toy corpus run: ledger, hierarchy and codebook are well-formed") {
    auto ctx = run_through_synthesis(toy_config());
    CHECK(ctx.state.ledger.size() > 0);
    CHECK(!ctx.codebook.codes.empty());
    auto problems = ctx.state.hierarchy.verify(&ctx.state.corpus);
    for (const auto& p : problems) {
        INFO(p);
    }
    CHECK(problems.empty());

    // grounding: every live code has a quote that slices its source turn
    for (const auto& c : ctx.codebook.codes) {
        REQUIRE(!c.quote_ids.empty());
        for (const auto& qid : c.quote_ids) {
            const Quote* q = ctx.state.hierarchy.quote(qid);
            REQUIRE(q != nullptr);
            const Turn* turn = ctx.state.corpus.turn(q->turn_id);
            REQUIRE(turn != nullptr);
            CHECK(turn->text.substr(q->span_begin, q->span_end - q->span_begin) == q->text);
        }
    }
}

TEST_CASE("replay reconstructs the pipeline state bit-identically") {
    auto ctx = run_through_synthesis(toy_config());
    auto result = replay(ctx.state.ledger.entries());
    CHECK(result.hierarchy.canonical_dump() == ctx.state.hierarchy.canonical_dump());
}

TEST_CASE("every hierarchy artifact is introduced by exactly one creating entry") {
    auto ctx = run_through_synthesis(toy_config());
    std::map<std::string, int> introductions;
    std::set<std::string> seen;
    for (const auto& e : ctx.state.ledger.entries()) {
        for (const auto& out : e.outputs) {
            if (!seen.count(out.str())) {
                seen.insert(out.str());
                introductions[out.str()] += 1;
                bool creating = e.action_type == ActionType::generate ||
                                e.action_type == ActionType::merge ||
                                e.action_type == ActionType::split;
                CHECK(creating);
            }
        }
    }
    auto check_all = [&](const auto& m) {
        for (const auto& [id, a] : m) {
            CHECK(introductions[id.str()] == 1);
        }
    };
    check_all(ctx.state.hierarchy.quotes());
    check_all(ctx.state.hierarchy.codes());
    check_all(ctx.state.hierarchy.subthemes());
    check_all(ctx.state.hierarchy.themes());
}

TEST_CASE("two runs with identical config and seed produce identical ledgers") {
    auto a = run_through_synthesis(toy_config());
    auto b = run_through_synthesis(toy_config());
    CHECK(timeless(a.state.ledger) == timeless(b.state.ledger));

    Config other = toy_config();
    other.seed = 43;
    auto c = run_through_synthesis(other);
    CHECK(timeless(a.state.ledger) != timeless(c.state.ledger));
}

TEST_CASE("refine_loop with max_rounds 1 yields exactly one record") {
    auto ctx = run_through_synthesis(toy_config());
    auto records = synth::refine_loop(ctx, 1);
    REQUIRE(records.size() == 1);
    CHECK(records[0].iteration == 1);
    CHECK(records[0].jaccard_vs_prev == doctest::Approx(0.0));
}

TEST_CASE("refine_loop records are contiguous, bounded and consistent") {
    Config config = toy_config();
    auto ctx = run_through_synthesis(config);
    auto records = synth::refine_loop(ctx, config.max_rounds);
    REQUIRE(!records.empty());
    CHECK(records.size() <= static_cast<std::size_t>(config.max_rounds));
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].iteration == static_cast<int>(i) + 1);
        CHECK(records[i].jaccard_vs_prev >= 0.0);
        CHECK(records[i].jaccard_vs_prev <= 1.0);
        CHECK(records[i].report.composite >= 0.0);
        CHECK(records[i].report.composite <= 1.0);
    }
    // stopping rule fired iff the last record carries its reason (or the cap hit)
    const auto& last = records.back();
    if (records.size() < static_cast<std::size_t>(config.max_rounds)) {
        CHECK(!last.stop_reason.empty());
    }
    // edit/ledger bijection per refinement round
    for (const auto& rec : records) {
        if (rec.iteration == 1) continue;
        int reviewer_entries = 0;
        for (const auto& e : ctx.state.ledger.entries()) {
            if (e.aid >= rec.round_aid_begin && e.aid <= rec.round_aid_end &&
                e.agent_role == "reviewer") {
                ++reviewer_entries;
            }
        }
        CHECK(reviewer_entries == rec.applied_edits);
    }
    // the refined state is still structurally sound and replays exactly
    auto problems = ctx.state.hierarchy.verify(&ctx.state.corpus);
    for (const auto& p : problems) {
        INFO(p);
    }
    CHECK(problems.empty());
    auto result = replay(ctx.state.ledger.entries());
    CHECK(result.hierarchy.canonical_dump() == ctx.state.hierarchy.canonical_dump());
    // best iteration is the argmax of composite
    auto best = synth::best_iteration_index(records);
    for (const auto& r : records) {
        CHECK(records[best].report.composite >= r.report.composite);
    }
}

TEST_CASE("manifest fingerprints follow corpus and prompt content") {
    Config config = toy_config();
    PipelineContext ctx = make_context(config);
    auto m1 = build_manifest(config, config.seed, THEMIS_TOY_CORPUS_DIR, ctx.prompts.hashes(),
                             ctx.gateway->backend_id(), ctx.embedder->model_id());
    auto m2 = build_manifest(config, config.seed, THEMIS_TOY_CORPUS_DIR, ctx.prompts.hashes(),
                             ctx.gateway->backend_id(), ctx.embedder->model_id());
    CHECK(m1.run_id == m2.run_id);
    CHECK(m1.dataset_sha256.size() == 3);
    Config other = toy_config();
    other.seed = 99;
    auto m3 = build_manifest(other, other.seed, THEMIS_TOY_CORPUS_DIR, ctx.prompts.hashes(),
                             ctx.gateway->backend_id(), ctx.embedder->model_id());
    CHECK(m1.run_id != m3.run_id);
}

TEST_CASE("trajectory CSV round-trips through the resume path") {
    auto dir = std::filesystem::temp_directory_path() / "themis_traj_test";
    std::filesystem::create_directories(dir);
    std::vector<synth::IterationRecord> records(3);
    for (int i = 0; i < 3; ++i) {
        records[i].iteration = i + 1;
        records[i].report.reusability = 0.1 * (i + 1);
        records[i].report.fitness = 0.5;
        records[i].report.coverage = 0.6;
        records[i].report.parsimony = 0.7;
        records[i].report.consistency = 0.4;
        records[i].report.composite = 0.46 + 0.02 * i;
        records[i].jaccard_vs_prev = i == 0 ? 0.0 : 0.5;
    }
    records[2].stop_reason = "reviewer proposed no substantive edits";
    auto path = dir / "trajectory_seed42.csv";
    write_trajectory_csv(path, records);
    auto loaded = read_trajectory_csv(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[1].report.reusability == doctest::Approx(0.2));
    CHECK(loaded[2].stop_reason == "reviewer proposed no substantive edits");
    std::filesystem::remove_all(dir);
}

TEST_CASE("config loading rejects unknown keys by name") {
    auto dir = std::filesystem::temp_directory_path() / "themis_cfg_test";
    std::filesystem::create_directories(dir);
    write_file(dir / "bad.json", R"({"chunking": {"unit": "words", "wordz": 100}})");
    bool named = false;
    try {
        Config::load(dir / "bad.json");
    } catch (const Error& err) {
        named = std::string(err.what()).find("wordz") != std::string::npos &&
                err.code() == Errc::unknown_config_key;
    }
    CHECK(named);
    write_file(dir / "bad2.json", R"({"chunkin": {}})");
    CHECK_THROWS_AS(Config::load(dir / "bad2.json"), Error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("missing corpus directory raises a corpus error") {
    Config config = toy_config();
    PipelineContext ctx = make_context(config);
    bool corpus_error = false;
    try {
        stage_ingest(ctx, "/nonexistent/corpus/dir");
    } catch (const Error& err) {
        corpus_error = err.code() == Errc::corpus_error;
    }
    CHECK(corpus_error);
}

TEST_CASE("replicates resume from existing trajectory checkpoints") {
    auto out_dir = std::filesystem::temp_directory_path() / "themis_resume_test";
    std::filesystem::remove_all(out_dir);
    std::filesystem::create_directories(out_dir);
    // plant a sentinel trajectory for seed 42: resume must trust it instead
    // of recomputing
    std::vector<synth::IterationRecord> sentinel(1);
    sentinel[0].iteration = 1;
    sentinel[0].report.reusability = 0.123456789;
    sentinel[0].report.composite = 0.987;
    write_trajectory_csv(out_dir / "trajectory_seed42.csv", sentinel);

    Config config = toy_config();
    config.max_rounds = 2;
    auto result = run_replicates(THEMIS_TOY_CORPUS_DIR, config, {42, 43}, out_dir,
                                 config.max_rounds);
    REQUIRE(result.outcomes.size() == 2);
    CHECK(result.outcomes[0].records.size() == 1);
    CHECK(result.outcomes[0].records[0].report.reusability == doctest::Approx(0.123456789));
    CHECK(result.outcomes[1].records.size() >= 1);
    // seed 43 actually ran: its run directory exists, seed 42's does not
    CHECK(std::filesystem::exists(out_dir / "seed43" / "ledger.jsonl"));
    CHECK_FALSE(std::filesystem::exists(out_dir / "seed42" / "ledger.jsonl"));
    std::filesystem::remove_all(out_dir);
}

TEST_CASE("character-window chunking drives the pipeline end to end") {
    Config config = toy_config();
    config.chunk_unit = "chars";
    config.chunk_chars = 700;
    config.chunk_char_overlap = 80;
    config.max_rounds = 3;
    PipelineContext ctx = make_context(config);
    stage_ingest(ctx, THEMIS_TOY_CORPUS_DIR);
    CHECK(ctx.all_chunks.size() >= 6);
    CHECK(ctx.all_chunks[0].unit == ChunkUnit::chars);
    stage_code(ctx);
    stage_synthesize(ctx);
    auto records = synth::refine_loop(ctx, config.max_rounds);
    CHECK(!records.empty());
    auto problems = ctx.state.hierarchy.verify(&ctx.state.corpus);
    for (const auto& p : problems) {
        INFO(p);
    }
    CHECK(problems.empty());
    auto result = replay(ctx.state.ledger.entries());
    CHECK(result.hierarchy.canonical_dump() == ctx.state.hierarchy.canonical_dump());
}
