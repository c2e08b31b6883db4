#include "themis/synth/refine.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"
#include "themis/util/rng.hpp"
#include "themis/util/text.hpp"

#include <algorithm>

namespace themis::synth {

namespace {

std::string snapshot_name(int iteration) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "iter_%03d", iteration);
    return buf;
}

// Replaces the live subtheme/theme level after code-level edits: new groups
// are generated first so coverage never breaks, then the old ones tombstone
// in one delete entry.
void resynthesize(run::PipelineContext& ctx, int round) {
    std::vector<ArtifactId> old_subthemes = ctx.state.hierarchy.live_ids(ArtifactKind::subtheme);
    std::vector<ArtifactId> old_themes = ctx.state.hierarchy.live_ids(ArtifactKind::theme);

    SynthConfig sc;
    sc.temperature = ctx.config.synth_temperature;
    sc.min_quotes_per_theme = ctx.config.min_quotes_per_theme;
    sc.seed_hint = substream_seed(ctx.replicate_seed, "resynthesis") ^
                   static_cast<std::uint64_t>(round);

    auto sub_drafts =
        synthesize_subthemes(*ctx.gateway, ctx.prompts, ctx.codebook, sc, &ctx.warnings);
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
        draft.justification = "round " + std::to_string(round) + " re-synthesis subtheme";
        ctx.state.record(std::move(draft));
        subthemes.push_back(std::move(s));
    }
    auto theme_drafts =
        synthesize_themes(*ctx.gateway, ctx.prompts, subthemes, sc, &ctx.warnings);
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
        draft.justification = "round " + std::to_string(round) + " re-synthesis theme";
        ctx.state.record(std::move(draft));
    }

    if (!old_subthemes.empty() || !old_themes.empty()) {
        EntryDraft drop;
        drop.agent_role = "synthesizer";
        drop.action_type = ActionType::del;
        drop.justification =
            "round " + std::to_string(round) + " re-synthesis retired the previous grouping";
        for (const auto& id : old_themes) {
            Theme t = *ctx.state.hierarchy.theme(id);
            t.deleted = true;
            t.subtheme_ids.clear();
            drop.inputs.push_back(id);
            drop.outputs.push_back(id);
            drop.payload[id.str()] = to_json(t);
        }
        for (const auto& id : old_subthemes) {
            Subtheme s = *ctx.state.hierarchy.subtheme(id);
            s.deleted = true;
            s.code_ids.clear();
            drop.inputs.push_back(id);
            drop.outputs.push_back(id);
            drop.payload[id.str()] = to_json(s);
        }
        ctx.state.record(std::move(drop));
    }
}

std::string sample_excerpts(run::PipelineContext& ctx, int round) {
    SplitMix64 rng(substream_seed(ctx.replicate_seed, "refine-sample") ^
                   static_cast<std::uint64_t>(round));
    std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(1, ctx.config.refine_sample_size)),
        ctx.train_chunks.size());
    auto picks = sample_indices(ctx.train_chunks.size(), k, rng);
    std::string out;
    for (std::size_t idx : picks) {
        const Chunk& c = ctx.train_chunks[idx];
        std::string excerpt = c.text.substr(0, 400);
        out += "[" + c.id.str() + "] " + collapse_whitespace(excerpt) + "\n";
    }
    return out;
}

} // namespace

std::vector<IterationRecord> refine_loop(run::PipelineContext& ctx, int max_rounds,
                                         const SnapshotSink& snapshot) {
    if (max_rounds < 1) raise(Errc::invalid_config, "max_rounds must be >= 1");
    std::vector<IterationRecord> records;

    IterationRecord first;
    first.iteration = 1;
    first.snapshot_id = snapshot_name(1);
    first.report = run::stage_evaluate(ctx, 1);
    first.jaccard_vs_prev = 0.0;
    records.push_back(first);
    if (snapshot) snapshot(1, ctx);

    coder::Codebook prev_book = ctx.codebook;
    for (int round = 2; round <= max_rounds; ++round) {
        std::uint64_t round_aid_begin = ctx.state.ledger.next_aid();
        SynthConfig sc;
        sc.temperature = ctx.config.synth_temperature;
        sc.min_quotes_per_theme = ctx.config.min_quotes_per_theme;
        sc.seed_hint = substream_seed(ctx.replicate_seed, "review") ^
                       static_cast<std::uint64_t>(round);
        auto proposals = review(*ctx.gateway, ctx.prompts, ctx.state, ctx.codebook,
                                sample_excerpts(ctx, round), sc, &ctx.warnings);
        bool substantive = false;
        for (const auto& p : proposals) {
            if (p.action != ActionType::revise) substantive = true;
        }
        bool code_level_change = false;
        int applied = 0;
        for (const auto& p : proposals) {
            try {
                apply_edit(ctx.state, p, "reviewer");
                ++applied;
                if (p.action != ActionType::revise) {
                    for (const auto& t : p.targets) {
                        if (t.kind == ArtifactKind::code) code_level_change = true;
                    }
                    if (p.action == ActionType::generate && p.kind == ArtifactKind::code) {
                        code_level_change = true;
                    }
                }
            } catch (const Error& err) {
                if (err.code() != Errc::invalid_edit) throw;
                ctx.warn("round " + std::to_string(round) + ": proposal rejected (" +
                         err.what() + ")");
            }
        }
        refresh_codebook(ctx);
        if (code_level_change) {
            resynthesize(ctx, round);
        }

        IterationRecord rec;
        rec.iteration = round;
        rec.snapshot_id = snapshot_name(round);
        rec.applied_edits = applied;
        rec.round_aid_begin = round_aid_begin;
        rec.round_aid_end = ctx.state.ledger.next_aid() - 1;
        rec.report = run::stage_evaluate(ctx, round);
        rec.jaccard_vs_prev = codebook_jaccard(prev_book, ctx.codebook);
        prev_book = ctx.codebook;

        bool stop = false;
        if (!substantive) {
            rec.stop_reason = "reviewer proposed no substantive edits";
            stop = true;
        } else if (rec.jaccard_vs_prev > ctx.config.jaccard_stop) {
            rec.stop_reason = "codebook jaccard " + canon_real(rec.jaccard_vs_prev) +
                              " exceeded " + canon_real(ctx.config.jaccard_stop);
            stop = true;
        }
        records.push_back(rec);
        if (snapshot) snapshot(round, ctx);
        if (stop) break;
    }
    return records;
}

std::size_t best_iteration_index(const std::vector<IterationRecord>& records) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].report.composite > records[best].report.composite) best = i;
    }
    return best;
}

} // namespace themis::synth
