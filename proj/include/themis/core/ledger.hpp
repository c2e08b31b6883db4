#pragma once

#include "themis/core/hierarchy.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace themis {

enum class ActionType { generate, merge, split, revise, move, del };

const char* action_type_name(ActionType t);
std::optional<ActionType> action_type_from_name(std::string_view name);

// One auditable agent operation. `payload` maps each output id to the full
// post-state of that artifact, which is what makes the ledger replayable
// without re-running any model call. Tombstoning appears as an output whose
// payload carries deleted=true.
struct ActionEntry {
    std::uint64_t aid = 0;
    std::string agent_role;
    ActionType action_type = ActionType::generate;
    std::vector<ArtifactId> inputs;
    std::vector<ArtifactId> outputs;
    std::string justification;
    std::string timestamp; // RFC 3339, excluded from replay equality
    json payload;          // id string -> artifact json

    ojson to_json() const;
    static ActionEntry from_json(const json& j); // throws CorruptLedger
};

// Draft for append: everything except aid and timestamp.
struct EntryDraft {
    std::string agent_role;
    ActionType action_type = ActionType::generate;
    std::vector<ArtifactId> inputs;
    std::vector<ArtifactId> outputs;
    std::string justification;
    json payload = json::object();
};

// Append-only action ledger. Earlier entries are never mutated; aids are
// contiguous from 1.
class Ledger {
public:
    using Resolver = std::function<bool(const ArtifactId&)>;

    // Validates inputs against `resolves`, assigns the next aid and the
    // current timestamp. Throws UnknownArtifact / LedgerSealed.
    std::uint64_t append(EntryDraft draft, const Resolver& resolves);

    void seal() { sealed_ = true; }
    bool sealed() const { return sealed_; }

    const std::vector<ActionEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::uint64_t next_aid() const { return static_cast<std::uint64_t>(entries_.size()) + 1; }

    std::string to_jsonl() const;
    static Ledger from_jsonl(const std::string& text); // throws CorruptLedger

private:
    std::vector<ActionEntry> entries_;
    bool sealed_ = false;
};

// Applies one entry's payload to the stores (shared by live recording and
// replay, so both paths produce identical state).
void apply_entry(const ActionEntry& entry, CorpusStore& corpus, Hierarchy& hierarchy);

struct ReplayResult {
    CorpusStore corpus;
    Hierarchy hierarchy;
};

// Rebuilds the final state from the ledger alone. Throws CorruptLedger on
// aid gaps, unknown action types, inputs that are not yet generated, missing
// payloads, or artifacts introduced by a non-creating action.
ReplayResult replay(const std::vector<ActionEntry>& entries);

// --------------------------------------------------------------------------
// Provenance traversal
// --------------------------------------------------------------------------

struct TraceNode {
    ArtifactId id;
    std::string display;
    bool deleted = false;
    std::optional<ArtifactId> turn_ref; // quotes: originating turn
    std::optional<std::string> speaker; // quotes: speaker if corpus given
    std::vector<TraceNode> children;
};

struct ProvenanceChain {
    TraceNode root;
    std::vector<ArtifactId> tree_ids;  // hierarchy artifacts on the tree
    std::vector<ActionEntry> entries;  // touching entries, in aid order
};

ProvenanceChain trace(const Hierarchy& hierarchy, const CorpusStore* corpus,
                      const Ledger& ledger, const ArtifactId& id);

std::string render_trace(const ProvenanceChain& chain);

} // namespace themis
