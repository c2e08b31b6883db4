#pragma once

#include "themis/eval/metrics.hpp"
#include "themis/run/pipeline.hpp"

#include <functional>
#include <string>
#include <vector>

namespace themis::synth {

struct IterationRecord {
    int iteration = 1; // 1-based, contiguous; iteration 1 is the initial output
    std::string snapshot_id;
    eval::MetricReport report;
    double jaccard_vs_prev = 0.0; // 0 for the first iteration
    std::string stop_reason;      // set on the final record when a rule fired
    int applied_edits = 0;        // reviewer edits applied this round
    std::uint64_t round_aid_begin = 0; // ledger aid range of this round
    std::uint64_t round_aid_end = 0;
};

using SnapshotSink = std::function<void(int iteration, const run::PipelineContext& ctx)>;

// Iterative refinement: iteration 1 evaluates the initial pipeline output;
// each later round samples train chunks, runs the reviewer, applies its
// edits, re-synthesizes subthemes/themes when the code level changed, and
// re-evaluates. Stops early when the reviewer proposes no substantive edit
// (anything but revise counts as substantive) or when the label-set Jaccard
// of successive codebooks exceeds the configured threshold.
std::vector<IterationRecord> refine_loop(run::PipelineContext& ctx, int max_rounds,
                                         const SnapshotSink& snapshot = {});

// Index (0-based) of the best record by composite score, earliest on ties.
std::size_t best_iteration_index(const std::vector<IterationRecord>& records);

} // namespace themis::synth
