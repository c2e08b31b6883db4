#pragma once

#include "themis/eval/metrics.hpp"

namespace themis::eval {

enum class JudgeKind { fitness, coverage };

// One judge call at the configured temperature; the integer 1..10 verdict is
// rescaled to [0,1] as (score - 1) / 9. Throws MalformedResponse when the
// repair re-prompt also fails.
double judge_score(llm::Gateway& gateway, const llm::PromptLibrary& prompts, const Chunk& chunk,
                   const std::vector<const Code*>& assigned_codes, JudgeKind kind,
                   double temperature = 0.3,
                   std::optional<std::uint64_t> seed_hint = std::nullopt);

// Dataset-level judge value: the mean over a seeded sample of test chunks
// (default 5). Chunks whose judge response stays unparseable are excluded
// and the sample refilled when more chunks are available.
double judge_dataset(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                     const coder::Codebook& codebook, const std::vector<Chunk>& test_chunks,
                     const std::vector<Assignment>& assignments, JudgeKind kind,
                     int sample_size, SplitMix64& rng, double temperature = 0.3,
                     std::vector<std::string>* warnings = nullptr);

} // namespace themis::eval
