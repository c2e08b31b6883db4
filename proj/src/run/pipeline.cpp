#include "themis/run/pipeline.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"
#include "themis/util/rng.hpp"
#include "themis/util/text.hpp"

#include <algorithm>
#include <future>

namespace themis::run {

PipelineContext make_context(const Config& config, std::optional<std::uint64_t> replicate_seed) {
    PipelineContext ctx;
    ctx.config = config;
    ctx.replicate_seed = replicate_seed.value_or(config.seed);
    if (config.backend == "http") {
        llm::HttpBackendConfig hc;
        hc.base_url = config.base_url;
        hc.model = config.model;
        hc.api_key_env = config.api_key_env;
        hc.timeout_ms = config.timeout_ms;
        ctx.chat = llm::make_http_backend(hc);
    } else {
        ctx.chat = llm::make_mock_backend();
    }
    llm::GatewayOptions options;
    options.retry.max_attempts = config.max_retries;
    options.retry.base_delay_ms = config.backoff_base_ms;
    options.inflight_limit = config.inflight;
    if (!config.trace_log.empty()) options.trace_path = config.trace_log;
    ctx.gateway = std::make_unique<llm::Gateway>(*ctx.chat, options);
    ctx.prompts = llm::PromptLibrary::load(std::filesystem::path(config.prompt_dir));
    if (config.backend == "http" && !config.embed_base_url.empty()) {
        embed::HttpEmbedConfig ec;
        ec.base_url = config.embed_base_url;
        ec.model = config.embed_model;
        ec.api_key_env = config.api_key_env;
        ec.dim = config.embed_dim;
        ec.timeout_ms = config.timeout_ms;
        ctx.embedder = std::make_unique<embed::Embedder>(embed::make_http_embed_backend(ec));
    } else {
        ctx.embedder =
            std::make_unique<embed::Embedder>(embed::make_mock_embed_backend(config.embed_dim));
    }
    return ctx;
}

void stage_ingest(PipelineContext& ctx, const std::filesystem::path& corpus_dir) {
    auto corpus = ingest::load_corpus(corpus_dir, ctx.state.ids);
    for (const auto& doc : corpus.docs) {
        EntryDraft draft;
        draft.agent_role = "ingest";
        draft.action_type = ActionType::generate;
        draft.justification = "parsed " + std::to_string(doc.turns.size()) +
                              " speaker turns from document " + doc.doc_id;
        for (const auto& t : doc.turns) {
            draft.outputs.push_back(t.id);
            draft.payload[t.id.str()] = to_json(t);
        }
        ctx.state.record(std::move(draft));

        std::vector<Chunk> chunks;
        if (ctx.config.chunk_unit == "chars") {
            chunks = ingest::chunk_chars(doc, ctx.state.ids, ctx.config.chunk_chars,
                                         ctx.config.chunk_char_overlap);
        } else {
            chunks = ingest::chunk_words(doc, ctx.state.ids, ctx.config.chunk_words,
                                         ctx.config.chunk_word_overlap);
        }
        EntryDraft cdraft;
        cdraft.agent_role = "ingest";
        cdraft.action_type = ActionType::generate;
        cdraft.justification = "chunked document " + doc.doc_id + " into " +
                               std::to_string(chunks.size()) + " " + ctx.config.chunk_unit +
                               "-unit chunks";
        for (const auto& t : doc.turns) cdraft.inputs.push_back(t.id);
        for (const auto& c : chunks) {
            cdraft.outputs.push_back(c.id);
            cdraft.payload[c.id.str()] = to_json(c);
        }
        ctx.state.record(std::move(cdraft));
        ctx.all_chunks.insert(ctx.all_chunks.end(), chunks.begin(), chunks.end());
    }
    auto split = ingest::split_train_test(ctx.all_chunks, ctx.config.train_ratio,
                                          substream_seed(ctx.config.seed, "split"));
    ctx.train_chunks = std::move(split.train);
    ctx.test_chunks = std::move(split.test);
    if (ctx.test_chunks.empty()) {
        ctx.warn("test split is empty; evaluation will be skipped");
    }
}

namespace {

// Incrementally applies one cleanup event against the live hierarchy,
// returning the ledger entry draft that captures it.
EntryDraft cleanup_entry(synth::RunState& state, const coder::ConsolidationEvent& event) {
    Hierarchy& h = state.hierarchy;
    EntryDraft draft;
    draft.agent_role = "coder";
    draft.action_type = event.action;
    draft.justification = event.note;
    if (event.kind == coder::CleanupKind::drop) {
        for (const auto& id : event.removed) {
            draft.inputs.push_back(id);
            Code dead = *h.code(id);
            dead.deleted = true;
            for (const auto& qid : dead.quote_ids) {
                Quote q = *h.quote(qid);
                q.deleted = true;
                draft.outputs.push_back(qid);
                draft.payload[qid.str()] = to_json(q);
            }
            draft.outputs.push_back(id);
            draft.payload[id.str()] = to_json(dead);
        }
        return draft;
    }
    Code survivor = *h.code(event.survivor);
    draft.inputs.push_back(event.survivor);
    for (const auto& id : event.removed) {
        draft.inputs.push_back(id);
        Code dead = *h.code(id);
        for (const auto& q : dead.quote_ids) survivor.quote_ids.insert(q);
        if (event.kind == coder::CleanupKind::class_merge) {
            for (const auto& s : dead.source_chunk_ids) survivor.source_chunk_ids.insert(s);
        }
        dead.deleted = true;
        draft.outputs.push_back(id);
        draft.payload[id.str()] = to_json(dead);
    }
    if (event.kind == coder::CleanupKind::class_merge) {
        survivor.frequency = survivor.source_chunk_ids.size();
    }
    draft.outputs.push_back(event.survivor);
    draft.payload[event.survivor.str()] = to_json(survivor);
    return draft;
}

} // namespace

void stage_code(PipelineContext& ctx) {
    if (ctx.train_chunks.empty()) {
        raise(Errc::too_few_chunks, "no train chunks to code");
    }
    std::uint64_t coder_seed = substream_seed(ctx.config.seed, "coder");
    std::uint64_t first_aid = ctx.state.ledger.next_aid();

    coder::CoderConfig cc;
    cc.codes_per_chunk = ctx.config.codes_per_chunk;
    cc.min_quote_chars = ctx.config.min_quote_chars;
    cc.max_quote_chars = ctx.config.max_quote_chars;
    cc.temperature = ctx.config.coder_temperature;

    // per-chunk coding may run concurrently up to the gateway's in-flight
    // limit; results are collected in chunk order so ledgers stay identical
    // regardless of scheduling
    const std::size_t n_chunks = ctx.train_chunks.size();
    std::vector<std::vector<coder::CodeDraft>> per_chunk(n_chunks);
    std::vector<std::vector<std::string>> per_chunk_warnings(n_chunks);
    auto code_one = [&](std::size_t i) {
        coder::CoderConfig local = cc;
        local.seed_hint = coder_seed ^ ctx.train_chunks[i].id.serial;
        per_chunk[i] = coder::code_chunk(*ctx.gateway, ctx.prompts, ctx.train_chunks[i], local,
                                         &per_chunk_warnings[i]);
    };
    const std::size_t limit =
        static_cast<std::size_t>(std::max(1, ctx.gateway->inflight_limit()));
    if (ctx.config.backend == "http" && limit > 1) {
        for (std::size_t base = 0; base < n_chunks; base += limit) {
            std::vector<std::future<void>> batch;
            for (std::size_t i = base; i < std::min(base + limit, n_chunks); ++i) {
                batch.push_back(std::async(std::launch::async, code_one, i));
            }
            for (auto& f : batch) f.get();
        }
    } else {
        for (std::size_t i = 0; i < n_chunks; ++i) code_one(i);
    }
    std::vector<coder::CodeDraft> drafts;
    for (std::size_t i = 0; i < n_chunks; ++i) {
        drafts.insert(drafts.end(), per_chunk[i].begin(), per_chunk[i].end());
        ctx.warnings.insert(ctx.warnings.end(), per_chunk_warnings[i].begin(),
                            per_chunk_warnings[i].end());
    }
    if (drafts.empty()) {
        raise(Errc::grounding_failure, "coding produced no grounded drafts");
    }
    auto normalized = coder::normalize_codes(drafts);

    // materialize codes + quotes with one generate entry per code
    std::vector<Code> codes;
    for (const auto& nc : normalized) {
        EntryDraft draft;
        draft.agent_role = "coder";
        draft.action_type = ActionType::generate;
        Code code;
        code.id = ctx.state.ids.fresh(ArtifactKind::code);
        code.label = nc.label;
        code.description = nc.description;
        code.source_chunk_ids = nc.source_chunk_ids;
        code.frequency = nc.source_chunk_ids.size();
        for (const auto& [chunk_id, q] : nc.quotes) {
            Quote quote;
            quote.id = ctx.state.ids.fresh(ArtifactKind::quote);
            quote.chunk_id = chunk_id;
            quote.turn_id = q.turn_id;
            quote.span_begin = q.turn_begin;
            quote.span_end = q.turn_end;
            quote.text = q.text;
            code.quote_ids.insert(quote.id);
            draft.outputs.push_back(quote.id);
            draft.payload[quote.id.str()] = to_json(quote);
        }
        for (const auto& cid : code.source_chunk_ids) draft.inputs.push_back(cid);
        draft.outputs.push_back(code.id);
        draft.payload[code.id.str()] = to_json(code);
        draft.justification = "code grounded in " + std::to_string(code.frequency) +
                              " chunk(s): " + code.label;
        ctx.state.record(std::move(draft));
        codes.push_back(std::move(code));
    }

    // pair screening + relation classification between class representatives
    std::vector<embed::Embedding> reps;
    reps.reserve(codes.size());
    for (const auto& c : codes) {
        reps.push_back(ctx.embedder->embed(coder::code_representation(c.label, c.description)));
    }
    auto pairs = coder::candidate_pairs(codes, reps, ctx.config.sim_threshold);

    std::map<ArtifactId, const Code*> by_id;
    for (const auto& c : codes) by_id[c.id] = &c;
    std::map<ArtifactId, ArtifactId> uf;
    for (const auto& c : codes) uf[c.id] = c.id;
    std::function<ArtifactId(ArtifactId)> find = [&](ArtifactId x) {
        while (uf[x] != x) {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        return x;
    };
    std::uint64_t relation_seed = substream_seed(ctx.config.seed, "relation");
    std::set<std::pair<ArtifactId, ArtifactId>> seen;
    std::vector<coder::CodeRelation> relations;
    for (const auto& [a, b] : pairs) {
        ArtifactId ra = find(a);
        ArtifactId rb = find(b);
        if (ra == rb) continue;
        auto key = std::minmax(ra, rb);
        if (!seen.insert({key.first, key.second}).second) continue;
        auto rel = coder::classify_relation(*ctx.gateway, ctx.prompts, *by_id[ra], *by_id[rb],
                                            0.0, relation_seed, &ctx.warnings);
        if (rel.kind == coder::RelationKind::equivalent) {
            uf[find(ra)] = find(rb);
        }
        relations.push_back(rel);
    }

    std::vector<ArtifactId> node_ids;
    for (const auto& c : codes) node_ids.push_back(c.id);
    auto graph = coder::CodeGraph::build(node_ids, relations);
    for (const auto& repair : graph.repairs()) ctx.warn(repair);

    coder::ConsolidateConfig cfg;
    cfg.low_freq = ctx.config.low_freq_threshold;
    cfg.w_freq = ctx.config.merge_w_freq;
    cfg.w_indeg = ctx.config.merge_w_indeg;
    auto outcome = coder::consolidate(codes, graph, cfg);
    for (const auto& event : outcome.events) {
        ctx.state.record(cleanup_entry(ctx.state, event));
    }

    ctx.codebook.codes = outcome.codes;
    ctx.codebook.parent_edges = outcome.edges;
    ctx.codebook.aid_begin = first_aid;
    ctx.codebook.aid_end = ctx.state.ledger.next_aid() - 1;
}

void stage_synthesize(PipelineContext& ctx) {
    synth::SynthConfig sc;
    sc.temperature = ctx.config.synth_temperature;
    sc.min_quotes_per_theme = ctx.config.min_quotes_per_theme;
    sc.seed_hint = substream_seed(ctx.config.seed, "synthesis");

    auto sub_drafts =
        synth::synthesize_subthemes(*ctx.gateway, ctx.prompts, ctx.codebook, sc, &ctx.warnings);
    std::vector<Subtheme> subthemes;
    for (const auto& d : sub_drafts) {
        Subtheme s;
        s.id = ctx.state.ids.fresh(ArtifactKind::subtheme);
        s.label = d.label;
        s.description = d.description;
        s.code_ids = d.code_ids;
        EntryDraft draft;
        draft.agent_role = "synthesizer";
        draft.action_type = ActionType::generate;
        for (const auto& cid : s.code_ids) draft.inputs.push_back(cid);
        draft.outputs.push_back(s.id);
        draft.payload[s.id.str()] = to_json(s);
        draft.justification = d.fallback ? "fallback subtheme for codes the model omitted"
                                         : "subtheme grouping " +
                                               std::to_string(s.code_ids.size()) + " codes";
        ctx.state.record(std::move(draft));
        subthemes.push_back(std::move(s));
    }

    auto theme_drafts =
        synth::synthesize_themes(*ctx.gateway, ctx.prompts, subthemes, sc, &ctx.warnings);
    for (const auto& d : theme_drafts) {
        Theme t;
        t.id = ctx.state.ids.fresh(ArtifactKind::theme);
        t.label = d.label;
        t.description = d.description;
        t.subtheme_ids = d.subtheme_ids;
        EntryDraft draft;
        draft.agent_role = "synthesizer";
        draft.action_type = ActionType::generate;
        for (const auto& sid : t.subtheme_ids) draft.inputs.push_back(sid);
        draft.outputs.push_back(t.id);
        draft.payload[t.id.str()] = to_json(t);
        draft.justification =
            "theme aggregating " + std::to_string(t.subtheme_ids.size()) + " subthemes";
        ctx.state.record(std::move(draft));
    }
}

void refresh_codebook(PipelineContext& ctx) {
    std::vector<Code> live;
    for (const auto& [id, c] : ctx.state.hierarchy.codes()) {
        if (!c.deleted) live.push_back(c);
    }
    std::set<std::pair<ArtifactId, ArtifactId>> edges;
    std::set<ArtifactId> alive;
    for (const auto& c : live) alive.insert(c.id);
    for (const auto& [a, b] : ctx.codebook.parent_edges) {
        if (alive.count(a) && alive.count(b)) edges.insert({a, b});
    }
    ctx.codebook.codes = std::move(live);
    ctx.codebook.parent_edges = std::move(edges);
    ctx.codebook.aid_end = ctx.state.ledger.next_aid() - 1;
}

std::vector<embed::Embedding> codebook_representations(PipelineContext& ctx) {
    std::vector<embed::Embedding> reps;
    reps.reserve(ctx.codebook.codes.size());
    for (const auto& c : ctx.codebook.codes) {
        reps.push_back(ctx.embedder->embed(coder::code_representation(c.label, c.description)));
    }
    return reps;
}

eval::MetricReport stage_evaluate(PipelineContext& ctx, int iteration) {
    eval::MetricReport report;
    if (ctx.codebook.codes.empty()) {
        raise(Errc::empty_codebook, "evaluation requires a codebook");
    }
    if (ctx.test_chunks.empty()) {
        ctx.warn("no test chunks; metrics default to zero");
        return report;
    }
    eval::DeductiveConfig dc;
    dc.max_codes = ctx.config.max_codes_per_assignment;
    dc.temperature = ctx.config.judge_temperature;
    std::uint64_t deductive_seed = substream_seed(ctx.replicate_seed, "deductive") ^
                                   static_cast<std::uint64_t>(iteration);

    std::vector<eval::Assignment> train_assignments;
    std::vector<eval::Assignment> test_assignments;
    for (const auto& chunk : ctx.train_chunks) {
        dc.seed_hint = deductive_seed ^ chunk.id.serial;
        train_assignments.push_back(
            eval::deductive_code(*ctx.gateway, ctx.prompts, ctx.codebook, chunk, dc,
                                 &ctx.warnings));
    }
    for (const auto& chunk : ctx.test_chunks) {
        dc.seed_hint = deductive_seed ^ chunk.id.serial;
        test_assignments.push_back(
            eval::deductive_code(*ctx.gateway, ctx.prompts, ctx.codebook, chunk, dc,
                                 &ctx.warnings));
    }

    report.reusability = eval::reusability(ctx.codebook, test_assignments);

    SplitMix64 judge_rng(substream_seed(ctx.replicate_seed, "judge-sample") ^
                         static_cast<std::uint64_t>(iteration));
    report.judge_sample_size = ctx.config.judge_sample_size;
    report.fitness = eval::judge_dataset(*ctx.gateway, ctx.prompts, ctx.codebook,
                                         ctx.test_chunks, test_assignments,
                                         eval::JudgeKind::fitness, ctx.config.judge_sample_size,
                                         judge_rng, ctx.config.judge_temperature, &ctx.warnings);
    report.coverage = eval::judge_dataset(*ctx.gateway, ctx.prompts, ctx.codebook,
                                          ctx.test_chunks, test_assignments,
                                          eval::JudgeKind::coverage, ctx.config.judge_sample_size,
                                          judge_rng, ctx.config.judge_temperature, &ctx.warnings);

    auto reps = codebook_representations(ctx);
    report.parsimony = eval::parsimony(reps, &ctx.warnings);
    try {
        report.consistency = eval::consistency(train_assignments, test_assignments);
    } catch (const Error& err) {
        if (err.code() != Errc::empty_distribution) throw;
        ctx.warn("consistency undefined (a split had no assignments); recorded as 0");
        report.consistency = 0.0;
    }
    report.composite = eval::composite(report.values(), ctx.config.metric_weights);
    return report;
}

void write_run_dir(PipelineContext& ctx, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "ledger.jsonl", ctx.state.ledger.to_jsonl());
    write_file(out_dir / "hierarchy.json", ctx.state.hierarchy.canonical_dump() + "\n");
    write_file(out_dir / "codebook.json", ctx.codebook.to_json().dump(2) + "\n");
    write_file(out_dir / "chunk_manifest.json",
               ingest::chunk_manifest_json(ctx.all_chunks).dump(2) + "\n");
    ojson turns = ojson::array();
    for (const auto& [id, t] : ctx.state.corpus.turns()) turns.push_back(to_json(t));
    write_file(out_dir / "turns.json", turns.dump(2) + "\n");
    if (!ctx.warnings.empty()) {
        std::string w;
        for (const auto& line : ctx.warnings) w += line + "\n";
        write_file(out_dir / "warnings.log", w);
    }
}

} // namespace themis::run
