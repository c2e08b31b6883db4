#pragma once

#include "themis/eval/stats.hpp"
#include "themis/run/pipeline.hpp"
#include "themis/synth/refine.hpp"

#include <filesystem>
#include <vector>

namespace themis::run {

struct ReplicateOutcome {
    std::uint64_t seed = 0;
    std::vector<synth::IterationRecord> records;
    std::size_t best_index = 0;
};

struct ReplicatesResult {
    std::vector<ReplicateOutcome> outcomes;
    std::vector<eval::StatRow> stats;              // best-composite-iteration reading
    std::vector<eval::StatRow> stats_permetric;    // per-metric maxima reading
};

// trajectory CSV: iteration, five metrics, composite, jaccard_vs_prev
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<synth::IterationRecord>& records);
std::vector<synth::IterationRecord> read_trajectory_csv(const std::filesystem::path& path);

// stats CSV: metric, iter1, best, delta, t, p, sig, d, effect
void write_stats_csv(const std::filesystem::path& path, const std::vector<eval::StatRow>& rows);

// Runs the full pipeline + refinement once per seed with the train/test
// split held fixed (config.seed drives the split and initial codebook; the
// replicate seed drives refinement and judge sampling). A seed whose
// trajectory file already exists is skipped, which is what makes interrupted
// invocations resumable.
ReplicatesResult run_replicates(const std::filesystem::path& corpus_dir, const Config& config,
                                const std::vector<std::uint64_t>& seeds,
                                const std::filesystem::path& out_dir, int max_rounds);

// Aggregates Iter-1 vs Best across replicates into Table-shaped stat rows
// (five metrics + overall).
std::vector<eval::StatRow> aggregate_stats(const std::vector<ReplicateOutcome>& outcomes,
                                           bool per_metric_max);

} // namespace themis::run
