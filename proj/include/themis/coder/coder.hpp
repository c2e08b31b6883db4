#pragma once

#include "themis/core/hierarchy.hpp"
#include "themis/embed/embedder.hpp"
#include "themis/llm/gateway.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace themis::coder {

struct CoderConfig {
    int codes_per_chunk = 20;
    std::size_t min_quote_chars = 20;
    std::size_t max_quote_chars = 1000;
    double temperature = 0.7;
    std::optional<std::uint64_t> seed_hint;
};

// A grounded quote candidate resolved back to its source turn.
struct QuoteDraft {
    ArtifactId turn_id;
    std::size_t turn_begin = 0;
    std::size_t turn_end = 0;
    std::string text; // equals the turn text sliced by [turn_begin, turn_end)
};

struct CodeDraft {
    std::string label;
    std::string description;
    ArtifactId source_chunk_id;
    std::vector<QuoteDraft> quotes; // never empty for a kept draft
};

// Generates `codes_per_chunk` drafts for one chunk. Word-limit violations get
// one repair re-prompt and are dropped if still invalid; quotes must match
// the chunk verbatim (whitespace-normalized search) and are segmented to at
// most max_quote_chars at sentence boundaries; quotes shorter than
// min_quote_chars are dropped and the draft is re-grounded or discarded.
std::vector<CodeDraft> code_chunk(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                                  const Chunk& chunk, const CoderConfig& config,
                                  std::vector<std::string>* warnings = nullptr);

// Label and description word-count validity for codes.
bool code_label_ok(const std::string& label);
bool code_description_ok(const std::string& description);

// Cross-chunk dedup: equal normalized labels merge into one entry whose
// frequency is the number of distinct source chunks; the first occurrence's
// label and description are kept.
struct NormalizedCode {
    std::string label;
    std::string description;
    std::set<ArtifactId> source_chunk_ids;
    std::vector<std::pair<ArtifactId, QuoteDraft>> quotes; // (chunk_id, quote)
};

std::vector<NormalizedCode> normalize_codes(const std::vector<CodeDraft>& drafts);

// Embedding text for a code ("label. description").
std::string code_representation(const std::string& label, const std::string& description);

// Unordered pairs whose representation cosine exceeds the threshold,
// in ascending (id, id) order.
std::vector<std::pair<ArtifactId, ArtifactId>> candidate_pairs(
    const std::vector<Code>& codes,
    const std::vector<embed::Embedding>& representations, double sim_threshold = 0.5);

enum class RelationKind { equivalent, subordinate, reverse, orthogonal };

const char* relation_kind_name(RelationKind k);

// One stored relation per unordered pair; a != b. "reverse" never survives
// classification: it is stored as subordinate with the operands swapped, so
// kind==subordinate always reads "a is a subcategory of b".
struct CodeRelation {
    ArtifactId a;
    ArtifactId b;
    RelationKind kind = RelationKind::orthogonal;
};

// Classifies one candidate pair via the relation_classifier role. A response
// that fails to parse (after the repair re-prompt) degrades to orthogonal
// with a logged warning.
CodeRelation classify_relation(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                               const Code& a, const Code& b, double temperature = 0.0,
                               std::optional<std::uint64_t> seed_hint = std::nullopt,
                               std::vector<std::string>* warnings = nullptr);

// Consolidated code set with hierarchy metadata.
struct Codebook {
    std::vector<Code> codes; // live codes, ascending id
    std::set<std::pair<ArtifactId, ArtifactId>> parent_edges; // child -> parent, closed
    std::uint64_t aid_begin = 0;
    std::uint64_t aid_end = 0;

    const Code* find(const ArtifactId& id) const;
    const Code* find_label(const std::string& normalized) const;
    std::vector<std::string> normalized_labels() const;

    ojson to_json() const;
    // Also accepts externally produced codebooks (quote ids optional there).
    static Codebook from_json(const json& doc);
};

} // namespace themis::coder
