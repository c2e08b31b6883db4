#pragma once

#include "themis/coder/code_graph.hpp"
#include "themis/core/ledger.hpp"

#include <cstdint>

namespace themis::coder {

struct ConsolidateConfig {
    std::uint64_t low_freq = 2; // frequency below this is "low"
    double w_freq = 1.0;        // merge score weights
    double w_indeg = 1.0;
};

enum class CleanupKind {
    class_merge, // equivalence-class dedup: survivor absorbs chunks + quotes
    subsume,     // low-frequency child folded into its parent: quotes only
    drop,        // low-frequency orphan removed, quotes tombstoned
};

// One cleanup operation, later turned into a ledger entry by the pipeline.
struct ConsolidationEvent {
    CleanupKind kind = CleanupKind::class_merge;
    ActionType action = ActionType::merge; // merge for dedup/subsume, delete for drops
    ArtifactId survivor;                   // invalid for drops
    std::vector<ArtifactId> removed;
    std::string note;
};

struct ConsolidationResult {
    std::vector<Code> codes;      // surviving codes, updated, ascending id
    std::vector<Code> tombstoned; // removed codes with deleted=true
    std::vector<ArtifactId> orphan_quote_ids; // quotes tombstoned with dropped orphans
    std::set<std::pair<ArtifactId, ArtifactId>> edges; // closed edges among survivors
    std::vector<ConsolidationEvent> events;
};

// Three-step cleanup:
//  1. each equivalence class keeps the member with the highest merge score
//     (w_freq*frequency + w_indeg*raw_in_degree, ties to the lower id) and
//     absorbs the others' chunks and quotes;
//  2. low-frequency codes with a parent are subsumed into their nearest
//     direct parent (lowest id among direct parents), quotes transferred;
//  3. remaining low-frequency orphans are dropped, their quotes tombstoned.
ConsolidationResult consolidate(const std::vector<Code>& codes, const CodeGraph& graph,
                                const ConsolidateConfig& config = {});

} // namespace themis::coder
