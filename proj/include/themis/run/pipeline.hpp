#pragma once

#include "themis/coder/consolidate.hpp"
#include "themis/embed/embedder.hpp"
#include "themis/eval/judge.hpp"
#include "themis/eval/metrics.hpp"
#include "themis/ingest/ingest.hpp"
#include "themis/run/config.hpp"
#include "themis/synth/synthesizer.hpp"

#include <filesystem>
#include <memory>

namespace themis::run {

// Everything one run carries between stages.
struct PipelineContext {
    Config config;
    std::uint64_t replicate_seed = 0; // governs refinement + judge sampling

    std::unique_ptr<llm::ChatBackend> chat;
    std::unique_ptr<llm::Gateway> gateway;
    llm::PromptLibrary prompts;
    std::unique_ptr<embed::Embedder> embedder;

    synth::RunState state;
    std::vector<Chunk> all_chunks;
    std::vector<Chunk> train_chunks;
    std::vector<Chunk> test_chunks;
    coder::Codebook codebook;

    std::vector<std::string> warnings;

    void warn(std::string msg) { warnings.push_back(std::move(msg)); }
};

// Builds backend, prompts and embedder from the config. replicate_seed
// defaults to config.seed.
PipelineContext make_context(const Config& config,
                             std::optional<std::uint64_t> replicate_seed = std::nullopt);

// Stage 0-1: parse every transcript, chunk per config, record ingest entries,
// split train/test with the config seed.
void stage_ingest(PipelineContext& ctx, const std::filesystem::path& corpus_dir);

// Stage 2: grounded coding over the train chunks -> consolidated codebook.
void stage_code(PipelineContext& ctx);

// Stages 3-4: subtheme and theme synthesis over the current codebook.
void stage_synthesize(PipelineContext& ctx);

// Rebuilds the codebook view from the hierarchy's live codes (used after
// reviewer edits touched the code level).
void refresh_codebook(PipelineContext& ctx);

// Deductive coding on both splits + the five metrics for this iteration.
eval::MetricReport stage_evaluate(PipelineContext& ctx, int iteration);

// Representations of the current codebook, in codebook order.
std::vector<embed::Embedding> codebook_representations(PipelineContext& ctx);

// Persistence helpers for a run directory.
void write_run_dir(PipelineContext& ctx, const std::filesystem::path& out_dir);

} // namespace themis::run
