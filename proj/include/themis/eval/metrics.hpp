#pragma once

#include "themis/coder/coder.hpp"
#include "themis/embed/embedder.hpp"
#include "themis/llm/gateway.hpp"
#include "themis/util/rng.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace themis::eval {

// Deductive-coding result for one test chunk: at most `max_codes` distinct
// code ids, all drawn from the evaluated codebook.
struct Assignment {
    ArtifactId chunk_id;
    std::vector<ArtifactId> code_ids;
};

struct DeductiveConfig {
    int max_codes = 20;
    double temperature = 0.3;
    std::optional<std::uint64_t> seed_hint;
};

// Presents the codebook as a menu and keeps only selections that resolve by
// id (or normalized label); unknown mentions are dropped with a warning.
// An empty selection is valid.
Assignment deductive_code(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                          const coder::Codebook& codebook, const Chunk& chunk,
                          const DeductiveConfig& config,
                          std::vector<std::string>* warnings = nullptr);

// (#codes assigned at least once) / (#all codes). Throws EmptyCodebook.
double reusability(const coder::Codebook& codebook, const std::vector<Assignment>& assignments);

// 1 - mean pairwise cosine over code representations; clamped to [0, 1] with
// a log line when clamping fires. A single code scores 1.0 by convention.
double parsimony(const std::vector<embed::Embedding>& representations,
                 std::vector<std::string>* log = nullptr);

// 1 - JSD(P || Q) with base-2 logs over the train/test code-frequency
// distributions (one increment per (chunk, code) assignment, no smoothing).
double consistency(const std::vector<Assignment>& train_assignments,
                   const std::vector<Assignment>& test_assignments);

// Weighted sum of the five metric values; weights must sum to 1.
double composite(const std::array<double, 5>& values,
                 const std::array<double, 5>& weights = {0.2, 0.2, 0.2, 0.2, 0.2});

struct MetricReport {
    double reusability = 0.0;
    double fitness = 0.0;
    double coverage = 0.0;
    double parsimony = 0.0;
    double consistency = 0.0;
    double composite = 0.0;
    int judge_sample_size = 0;

    std::array<double, 5> values() const {
        return {reusability, fitness, coverage, parsimony, consistency};
    }
    ojson to_json() const;
};

inline const std::array<const char*, 5> kMetricNames = {"reusability", "fitness", "coverage",
                                                        "parsimony", "consistency"};

} // namespace themis::eval
