#pragma once

#include "themis/coder/coder.hpp"
#include "themis/core/ledger.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace themis::synth {

// Mutable run context shared by the pipeline stages.
struct RunState {
    CorpusStore corpus;
    Hierarchy hierarchy;
    Ledger ledger;
    IdAllocator ids;

    bool resolves(const ArtifactId& id) const {
        return hierarchy.contains(id) || corpus.contains(id);
    }

    Ledger::Resolver resolver() const {
        return [this](const ArtifactId& id) { return resolves(id); };
    }

    // Appends the entry and applies its payload, so live state and replayed
    // state are produced by the same code path.
    std::uint64_t record(EntryDraft draft) {
        std::uint64_t aid = ledger.append(std::move(draft), resolver());
        apply_entry(ledger.entries().back(), corpus, hierarchy);
        return aid;
    }
};

struct SynthConfig {
    double temperature = 0.5;
    std::optional<std::uint64_t> seed_hint;
    int min_quotes_per_theme = 3; // weak-grounding threshold for review
};

// Subtheme drafts from the model, validated: unknown code ids dropped,
// duplicate labels merged, omitted codes appended to an "Unassigned (review)"
// fallback group (logged via the returned flag).
struct SubthemeDraft {
    std::string label;
    std::string description;
    std::set<ArtifactId> code_ids;
    bool fallback = false;
};

std::vector<SubthemeDraft> synthesize_subthemes(llm::Gateway& gateway,
                                                const llm::PromptLibrary& prompts,
                                                const coder::Codebook& codebook,
                                                const SynthConfig& config,
                                                std::vector<std::string>* warnings = nullptr);

bool theme_label_ok(const std::string& label);             // 5-10 words
bool theme_description_ok(const std::string& description); // 60-80 words

struct ThemeDraft {
    std::string label;
    std::string description;
    std::set<ArtifactId> subtheme_ids;
};

// Theme drafts with coverage guarantee (every subtheme under >= 1 theme) and
// word limits enforced: one re-prompt, then a mechanical repair (logged).
std::vector<ThemeDraft> synthesize_themes(llm::Gateway& gateway,
                                          const llm::PromptLibrary& prompts,
                                          const std::vector<Subtheme>& subthemes,
                                          const SynthConfig& config,
                                          std::vector<std::string>* warnings = nullptr);

// --------------------------------------------------------------------------
// Reviewer pass + constrained edits
// --------------------------------------------------------------------------

struct EditPart {
    std::string label;
    std::string description;
    std::vector<ArtifactId> children;
};

struct EditProposal {
    ActionType action = ActionType::revise;
    std::vector<ArtifactId> targets;
    std::optional<std::string> label;
    std::optional<std::string> description;
    std::vector<ArtifactId> children;   // generate
    std::vector<EditPart> parts;        // split
    std::optional<ArtifactId> move_to;  // move
    std::optional<ArtifactId> move_from;
    std::optional<ArtifactId> assign_to; // delete re-homing
    ArtifactKind kind = ArtifactKind::subtheme; // generate
    std::string justification;
};

// Compact hierarchy summary handed to the reviewer role.
std::string review_context_json(const Hierarchy& hierarchy, const coder::Codebook& codebook);

// Asks the reviewer role for edits against the four failure modes; schema-
// invalid or dangling proposals are dropped with warnings.
std::vector<EditProposal> review(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                                 const RunState& state, const coder::Codebook& codebook,
                                 const std::string& sample_text, const SynthConfig& config,
                                 std::vector<std::string>* warnings = nullptr);

// Applies one validated proposal: mutates the hierarchy and appends exactly
// one ledger entry. Throws InvalidEdit leaving the state unchanged.
std::uint64_t apply_edit(RunState& state, const EditProposal& proposal,
                         const std::string& agent_role);

// Label-set Jaccard between two codebooks (normalized labels); 1.0 when both
// are empty.
double codebook_jaccard(const coder::Codebook& a, const coder::Codebook& b);

} // namespace themis::synth
