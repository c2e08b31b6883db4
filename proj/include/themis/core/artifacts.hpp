#pragma once

#include "themis/core/ids.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace themis {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// --------------------------------------------------------------------------
// Source-side artifacts (not part of the thematic hierarchy document)
// --------------------------------------------------------------------------

struct Turn {
    ArtifactId id;
    std::string doc_id;
    std::string speaker; // "UNKNOWN" when the transcript carries no label
    std::string text;
    int index = 0; // 0-based position within the document
};

enum class ChunkUnit { chars, words };

const char* chunk_unit_name(ChunkUnit u);

// Maps a region of the chunk text back to its source turn.
struct TurnSegment {
    ArtifactId turn_id;
    std::size_t chunk_begin = 0;
    std::size_t chunk_end = 0;
    std::size_t turn_begin = 0; // offset of chunk_begin within the turn text
};

struct Chunk {
    ArtifactId id;
    std::string doc_id;
    ChunkUnit unit = ChunkUnit::chars;
    int turn_begin = 0; // inclusive turn index range covered
    int turn_end = 0;   // inclusive
    std::string text;
    std::size_t overlap_with_prev = 0; // in `unit`
    std::size_t offset_begin = 0;      // in `unit`, within the document
    std::size_t offset_end = 0;
    std::vector<TurnSegment> segments;
};

// --------------------------------------------------------------------------
// Hierarchy artifacts
// --------------------------------------------------------------------------

struct Quote {
    ArtifactId id;
    ArtifactId chunk_id;
    ArtifactId turn_id;
    std::size_t span_begin = 0; // offsets into the turn text
    std::size_t span_end = 0;
    std::string text;
    bool deleted = false;
};

struct Code {
    ArtifactId id;
    std::string label;       // 5-12 words
    std::string description; // 40-80 words
    std::uint64_t frequency = 0;
    std::set<ArtifactId> source_chunk_ids;
    std::set<ArtifactId> quote_ids;
    bool deleted = false;
};

struct Subtheme {
    ArtifactId id;
    std::string label;
    std::string description;
    std::set<ArtifactId> code_ids;
    bool deleted = false;
};

struct Theme {
    ArtifactId id;
    std::string label;       // 5-10 words
    std::string description; // 60-80 words
    std::set<ArtifactId> subtheme_ids;
    bool deleted = false;
};

// JSON (canonical field order; ids rendered as strings)
ojson to_json(const Turn& t);
ojson to_json(const Chunk& c);
ojson to_json(const Quote& q);
ojson to_json(const Code& c);
ojson to_json(const Subtheme& s);
ojson to_json(const Theme& t);

Turn turn_from_json(const json& j);
Chunk chunk_from_json(const json& j);
Quote quote_from_json(const json& j);
Code code_from_json(const json& j);
Subtheme subtheme_from_json(const json& j);
Theme theme_from_json(const json& j);

ArtifactId id_from_json_field(const json& j, const char* field);

} // namespace themis
