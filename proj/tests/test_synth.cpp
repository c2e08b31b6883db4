#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "themis/coder/coder.hpp"

using namespace themis;
using namespace themis::synth;

namespace {

class ScriptedBackend final : public llm::ChatBackend {
public:
    std::vector<std::string> script;
    std::size_t at = 0;
    llm::CompletionResult complete(const llm::CompletionRequest&) override {
        llm::CompletionResult r;
        r.text = script[std::min(at, script.size() - 1)];
        ++at;
        r.backend_id = id();
        return r;
    }
    std::string id() const override { return "scripted"; }
};

llm::GatewayOptions fast_options() {
    llm::GatewayOptions o;
    o.retry.base_delay_ms = 1;
    o.sleeper = [](int) {};
    return o;
}

coder::Codebook toy_codebook(const tfx::Toy& toy) {
    coder::Codebook book;
    for (const auto& id : toy.code_ids) {
        book.codes.push_back(*toy.state.hierarchy.code(id));
    }
    return book;
}

} // namespace

TEST_CASE("synthesize_subthemes covers every code under the mock backend") {
    auto backend = llm::make_mock_backend();
    llm::Gateway gw(*backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    coder::Codebook book;
    for (std::uint64_t i = 1; i <= 12; ++i) {
        book.codes.push_back(tfx::make_code(i, "Account " + std::to_string(i) +
                                                   " topic" + std::to_string(i % 4) +
                                                   " with further detail words", 2));
    }
    SynthConfig cfg;
    auto drafts = synthesize_subthemes(gw, prompts, book, cfg);
    std::set<ArtifactId> covered;
    for (const auto& d : drafts) {
        for (const auto& id : d.code_ids) covered.insert(id);
    }
    CHECK(covered.size() == 12);
    std::set<std::string> labels;
    for (const auto& d : drafts) CHECK(labels.insert(normalize_label(d.label)).second);
}

TEST_CASE("single-code codebook becomes exactly one subtheme containing it") {
    auto backend = llm::make_mock_backend();
    llm::Gateway gw(*backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    coder::Codebook book;
    book.codes.push_back(tfx::make_code(1, "Lone account about garden budgets", 2));
    SynthConfig cfg;
    auto drafts = synthesize_subthemes(gw, prompts, book, cfg);
    REQUIRE(drafts.size() == 1);
    CHECK(drafts[0].code_ids.count(book.codes[0].id) == 1);
}

TEST_CASE("codes omitted by the model land in the fallback subtheme") {
    ScriptedBackend backend;
    backend.script = {R"([{"label":"Partial grouping","description":"Only covers the first code","code_ids":["cid_000001"]}])"};
    llm::Gateway gw(backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    coder::Codebook book;
    book.codes.push_back(tfx::make_code(1, "Account one about garden budgets", 2));
    book.codes.push_back(tfx::make_code(2, "Account two about cycle lanes", 2));
    SynthConfig cfg;
    std::vector<std::string> warnings;
    auto drafts = synthesize_subthemes(gw, prompts, book, cfg, &warnings);
    REQUIRE(drafts.size() == 2);
    CHECK(drafts.back().fallback);
    CHECK(drafts.back().label == "Unassigned (review)");
    CHECK(drafts.back().code_ids.count(book.codes[1].id) == 1);
    CHECK(!warnings.empty());
}

TEST_CASE("unknown code ids in subtheme drafts are dropped with warnings") {
    ScriptedBackend backend;
    backend.script = {R"([{"label":"Grouping","description":"d","code_ids":["cid_000001","cid_999999"]}])"};
    llm::Gateway gw(backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    coder::Codebook book;
    book.codes.push_back(tfx::make_code(1, "Account one about garden budgets", 2));
    SynthConfig cfg;
    std::vector<std::string> warnings;
    auto drafts = synthesize_subthemes(gw, prompts, book, cfg, &warnings);
    REQUIRE(drafts.size() == 1);
    CHECK(drafts[0].code_ids.size() == 1);
    CHECK(!warnings.empty());
}

TEST_CASE("synthesize_themes covers every subtheme and enforces word limits") {
    auto backend = llm::make_mock_backend();
    llm::Gateway gw(*backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    std::vector<Subtheme> subs;
    for (std::uint64_t i = 1; i <= 7; ++i) {
        Subtheme s;
        s.id = ArtifactId{ArtifactKind::subtheme, i};
        s.label = "Accounts centered on topic" + std::to_string(i % 3);
        s.description = "Scripted subtheme.";
        s.code_ids.insert(ArtifactId{ArtifactKind::code, i});
        subs.push_back(s);
    }
    SynthConfig cfg;
    auto themes = synthesize_themes(gw, prompts, subs, cfg);
    std::set<ArtifactId> covered;
    for (const auto& t : themes) {
        CHECK(theme_label_ok(t.label));
        CHECK(theme_description_ok(t.description));
        for (const auto& id : t.subtheme_ids) covered.insert(id);
    }
    CHECK(covered.size() == 7);
}

TEST_CASE("single subtheme yields one theme containing it") {
    auto backend = llm::make_mock_backend();
    llm::Gateway gw(*backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    std::vector<Subtheme> subs(1);
    subs[0].id = ArtifactId{ArtifactKind::subtheme, 1};
    subs[0].label = "Accounts centered on budgets";
    subs[0].description = "d";
    subs[0].code_ids.insert(ArtifactId{ArtifactKind::code, 1});
    SynthConfig cfg;
    auto themes = synthesize_themes(gw, prompts, subs, cfg);
    REQUIRE(themes.size() == 1);
    CHECK(themes[0].subtheme_ids.count(subs[0].id) == 1);
}

TEST_CASE("theme word-limit violations are repaired, never persisted") {
    // scripted: a 12-word label, twice (so the re-prompt also fails) ->
    // mechanical repair must kick in
    std::string bad = R"([{"label":"one two three four five six seven eight nine ten eleven twelve",)"
                      R"("description":"too short","subtheme_ids":["sid_000001"]}])";
    ScriptedBackend backend;
    backend.script = {bad, bad};
    llm::Gateway gw(backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    std::vector<Subtheme> subs(1);
    subs[0].id = ArtifactId{ArtifactKind::subtheme, 1};
    subs[0].label = "Accounts centered on budgets";
    subs[0].description = "d";
    subs[0].code_ids.insert(ArtifactId{ArtifactKind::code, 1});
    SynthConfig cfg;
    std::vector<std::string> warnings;
    auto themes = synthesize_themes(gw, prompts, subs, cfg, &warnings);
    REQUIRE(themes.size() == 1);
    CHECK(theme_label_ok(themes[0].label));
    CHECK(theme_description_ok(themes[0].description));
    bool repaired_note = false;
    for (const auto& w : warnings) {
        if (w.find("mechanically repaired") != std::string::npos) repaired_note = true;
    }
    CHECK(repaired_note);
}

TEST_CASE("apply_edit: merge unions children and tombstones targets") {
    auto toy = tfx::make_toy(5, 3); // subthemes {c0,c1,c2}, {c3,c4}
    auto& st = toy.state;
    EditProposal p;
    p.action = ActionType::merge;
    p.targets = {toy.subtheme_ids[0], toy.subtheme_ids[1]};
    p.label = "Merged toy subtheme";
    p.description = "Union of both groups.";
    p.justification = "test";
    apply_edit(st, p, "reviewer");
    auto live = st.hierarchy.live_ids(ArtifactKind::subtheme);
    REQUIRE(live.size() == 1);
    const Subtheme* merged = st.hierarchy.subtheme(live[0]);
    CHECK(merged->code_ids.size() == 5);
    CHECK(st.hierarchy.is_deleted(toy.subtheme_ids[0]));
    CHECK(st.hierarchy.is_deleted(toy.subtheme_ids[1]));
    // the theme now links the merged subtheme instead of the tombstoned pair
    const Theme* theme = st.hierarchy.theme(toy.theme_id);
    CHECK(theme->subtheme_ids.count(live[0]) == 1);
    CHECK(theme->subtheme_ids.count(toy.subtheme_ids[0]) == 0);
    CHECK(st.hierarchy.verify(&st.corpus).empty());
}

TEST_CASE("apply_edit: split rejects a one-child partition, accepts a real one") {
    auto toy = tfx::make_toy(4, 4);
    auto& st = toy.state;
    // subtheme with one code cannot split
    EditProposal gen;
    gen.action = ActionType::generate;
    gen.kind = ArtifactKind::subtheme;
    gen.label = "Tiny grouping";
    gen.description = "One code only.";
    gen.children = {toy.code_ids[0]};
    gen.assign_to = toy.theme_id;
    apply_edit(st, gen, "reviewer");
    auto live = st.hierarchy.live_ids(ArtifactKind::subtheme);
    ArtifactId tiny;
    for (const auto& id : live) {
        if (st.hierarchy.subtheme(id)->label == "Tiny grouping") tiny = id;
    }
    EditProposal bad;
    bad.action = ActionType::split;
    bad.targets = {tiny};
    bad.parts.push_back({"Part one", "d", {toy.code_ids[0]}});
    bad.parts.push_back({"Part two", "d", {}});
    CHECK_THROWS_AS(apply_edit(st, bad, "reviewer"), Error);

    EditProposal good;
    good.action = ActionType::split;
    good.targets = {toy.subtheme_ids[0]};
    good.parts.push_back({"Part one", "d", {toy.code_ids[0], toy.code_ids[1]}});
    good.parts.push_back({"Part two", "d", {toy.code_ids[2], toy.code_ids[3]}});
    apply_edit(st, good, "reviewer");
    CHECK(st.hierarchy.is_deleted(toy.subtheme_ids[0]));
    CHECK(st.hierarchy.verify(&st.corpus).empty());
}

TEST_CASE("apply_edit: moving the last code out of a subtheme is invalid") {
    auto toy = tfx::make_toy(4, 3); // subthemes {c0,c1,c2}, {c3}
    auto& st = toy.state;
    EditProposal p;
    p.action = ActionType::move;
    p.targets = {toy.code_ids[3]};
    p.move_from = toy.subtheme_ids[1];
    p.move_to = toy.subtheme_ids[0];
    std::string before = st.hierarchy.canonical_dump();
    CHECK_THROWS_AS(apply_edit(st, p, "reviewer"), Error);
    CHECK(st.hierarchy.canonical_dump() == before); // state unchanged

    EditProposal ok;
    ok.action = ActionType::move;
    ok.targets = {toy.code_ids[0]};
    ok.move_from = toy.subtheme_ids[0];
    ok.move_to = toy.subtheme_ids[1];
    apply_edit(st, ok, "reviewer");
    CHECK(st.hierarchy.subtheme(toy.subtheme_ids[1])->code_ids.count(toy.code_ids[0]) == 1);
    CHECK(st.hierarchy.subtheme(toy.subtheme_ids[0])->code_ids.count(toy.code_ids[0]) == 0);
    CHECK(st.hierarchy.verify(&st.corpus).empty());
}

TEST_CASE("apply_edit: deleting a parent's only child is invalid") {
    auto toy = tfx::make_toy(3, 3); // one subtheme under one theme
    auto& st = toy.state;
    EditProposal p;
    p.action = ActionType::del;
    p.targets = {toy.subtheme_ids[0]};
    std::string before = st.hierarchy.canonical_dump();
    CHECK_THROWS_AS(apply_edit(st, p, "reviewer"), Error);
    CHECK(st.hierarchy.canonical_dump() == before);
}

TEST_CASE("apply_edit: delete with explicit re-home keeps codes covered") {
    auto toy = tfx::make_toy(6, 2); // three subthemes of two codes
    auto& st = toy.state;
    EditProposal p;
    p.action = ActionType::del;
    p.targets = {toy.subtheme_ids[2]};
    p.assign_to = toy.subtheme_ids[0];
    apply_edit(st, p, "reviewer");
    CHECK(st.hierarchy.is_deleted(toy.subtheme_ids[2]));
    CHECK(st.hierarchy.subtheme(toy.subtheme_ids[0])->code_ids.size() == 4);
    CHECK(st.hierarchy.verify(&st.corpus).empty());
}

TEST_CASE("apply_edit: revise swaps label and description in place") {
    auto toy = tfx::make_toy(3, 3);
    auto& st = toy.state;
    EditProposal p;
    p.action = ActionType::revise;
    p.targets = {toy.code_ids[0]};
    p.label = "Revised toy code about shared resources";
    p.description = tfx::valid_code_description(55);
    apply_edit(st, p, "reviewer");
    CHECK(st.hierarchy.code(toy.code_ids[0])->label ==
          "Revised toy code about shared resources");
    // code word limits enforced on revise
    EditProposal bad;
    bad.action = ActionType::revise;
    bad.targets = {toy.code_ids[1]};
    bad.label = "Too short";
    CHECK_THROWS_AS(apply_edit(st, bad, "reviewer"), Error);
}

TEST_CASE("every applied edit appends exactly one reviewer ledger entry") {
    auto toy = tfx::make_toy(6, 2);
    auto& st = toy.state;
    std::size_t before = st.ledger.size();
    EditProposal m;
    m.action = ActionType::merge;
    m.targets = {toy.subtheme_ids[0], toy.subtheme_ids[1]};
    m.label = "Merged grouping one";
    m.description = "d";
    apply_edit(st, m, "reviewer");
    EditProposal mv;
    mv.action = ActionType::move;
    mv.targets = {toy.code_ids[4]};
    mv.move_from = toy.subtheme_ids[2];
    mv.move_to = st.hierarchy.live_ids(ArtifactKind::subtheme)[0] == toy.subtheme_ids[2]
                     ? st.hierarchy.live_ids(ArtifactKind::subtheme)[1]
                     : st.hierarchy.live_ids(ArtifactKind::subtheme)[0];
    apply_edit(st, mv, "reviewer");
    int reviewer_entries = 0;
    for (std::size_t i = before; i < st.ledger.size(); ++i) {
        if (st.ledger.entries()[i].agent_role == "reviewer") ++reviewer_entries;
    }
    CHECK(reviewer_entries == 2);
    // replay equality after edits
    auto result = replay(st.ledger.entries());
    CHECK(result.hierarchy.canonical_dump() == st.hierarchy.canonical_dump());
}

TEST_CASE("mock reviewer proposes merges for near-duplicate subthemes") {
    auto toy = tfx::make_toy(6, 3);
    auto& st = toy.state;
    // craft two near-duplicate subtheme labels (token jaccard >= 0.8)
    EditProposal r1;
    r1.action = ActionType::revise;
    r1.targets = {toy.subtheme_ids[0]};
    r1.label = "Accounts about shared garden budget";
    apply_edit(st, r1, "reviewer");
    EditProposal r2;
    r2.action = ActionType::revise;
    r2.targets = {toy.subtheme_ids[1]};
    r2.label = "Accounts about shared garden budget matters";
    apply_edit(st, r2, "reviewer");

    auto backend = llm::make_mock_backend();
    llm::Gateway gw(*backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    SynthConfig cfg;
    auto book = toy_codebook(toy);
    auto proposals = review(gw, prompts, st, book, "sample", cfg);
    bool merge_of_dups = false;
    for (const auto& p : proposals) {
        if (p.action == ActionType::merge && p.targets.size() == 2 &&
            p.targets[0].kind == ArtifactKind::subtheme) {
            merge_of_dups = true;
            CHECK(p.justification.find("duplicated") != std::string::npos);
        }
    }
    CHECK(merge_of_dups);
}

TEST_CASE("mock reviewer flags weak grounding on a thin theme") {
    auto toy = tfx::make_toy(5, 3); // subthemes {c0..c2}, {c3,c4}
    auto& st = toy.state;
    EditProposal split;
    split.action = ActionType::split;
    split.targets = {toy.theme_id};
    split.parts.push_back({tfx::fit_word_count("Toy theme covering the first grouped subtheme", 5, 10),
                           tfx::valid_theme_description(),
                           {toy.subtheme_ids[0]}});
    split.parts.push_back({tfx::fit_word_count("Toy theme covering the second grouped subtheme", 5, 10),
                           tfx::valid_theme_description(),
                           {toy.subtheme_ids[1]}});
    apply_edit(st, split, "reviewer");

    auto backend = llm::make_mock_backend();
    llm::Gateway gw(*backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    SynthConfig cfg;
    cfg.min_quotes_per_theme = 3; // second theme holds only 2 quotes
    auto book = toy_codebook(toy);
    auto proposals = review(gw, prompts, st, book, "", cfg);
    bool weak = false;
    for (const auto& p : proposals) {
        if (p.justification.find("weak grounding") != std::string::npos) weak = true;
    }
    CHECK(weak);
}

TEST_CASE("mock reviewer returns no proposals for a clean hierarchy") {
    auto toy = tfx::make_toy(4, 2);
    auto backend = llm::make_mock_backend();
    llm::Gateway gw(*backend, fast_options());
    auto prompts = llm::PromptLibrary::load();
    SynthConfig cfg;
    auto book = toy_codebook(toy);
    auto proposals = review(gw, prompts, toy.state, book, "", cfg);
    CHECK(proposals.empty());
}

TEST_CASE("codebook_jaccard fixtures") {
    auto book = [](std::vector<std::string> labels) {
        coder::Codebook b;
        std::uint64_t serial = 1;
        for (auto& l : labels) b.codes.push_back(tfx::make_code(serial++, l, 1));
        return b;
    };
    CHECK(codebook_jaccard(book({"a a a a a", "b b b b b"}), book({"a a a a a", "b b b b b"})) ==
          doctest::Approx(1.0));
    CHECK(codebook_jaccard(book({"a a a a a"}), book({"b b b b b"})) == doctest::Approx(0.0));
    CHECK(codebook_jaccard(book({"alpha one", "beta two", "gamma three"}),
                           book({"beta two", "gamma three", "delta four"})) ==
          doctest::Approx(0.5));
    CHECK(codebook_jaccard(book({}), book({})) == doctest::Approx(1.0));
}
