#pragma once

#include "themis/core/artifacts.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace themis::ingest {

// A parsed document: speaker turns plus the joined text the chunkers cut.
// joined_text is the turn texts concatenated with single "\n" separators;
// turn_offsets[i] is the offset of turn i's text within joined_text.
struct ParsedDoc {
    std::string doc_id;
    std::vector<Turn> turns;
    std::string joined_text;
    std::vector<std::size_t> turn_offsets;
};

// Splits raw transcript text into speaker turns. Lines of the form
// "SPEAKER: text" (speaker = the run of tokens before the first colon, at
// most 5 words) open a new turn; any other line appends to the current turn;
// text before the first speaker line becomes one turn with speaker
// "UNKNOWN". Throws EmptyDocument when there is no non-whitespace content.
std::vector<Turn> parse_turns(std::string_view raw, const std::string& doc_id,
                              IdAllocator& ids);

ParsedDoc parse_document(std::string_view raw, const std::string& doc_id, IdAllocator& ids);

// Character-window chunking that respects natural boundaries: each cut lands
// on the latest turn boundary that fits max_chars; a single over-long turn is
// cut at the latest sentence terminator; otherwise hard-cut. Every chunk
// after the first starts with the trailing `overlap_chars` of its
// predecessor. De-overlapped concatenation reproduces joined_text exactly.
std::vector<Chunk> chunk_chars(const ParsedDoc& doc, IdAllocator& ids,
                               std::size_t max_chars = 8000, std::size_t overlap_chars = 400);

// Whitespace-token windows of exactly `words` tokens (final chunk may be
// shorter), stepping by words - overlap.
std::vector<Chunk> chunk_words(const ParsedDoc& doc, IdAllocator& ids,
                               std::size_t words = 2048, std::size_t overlap = 200);

// Deterministic seeded split: Fisher-Yates shuffle driven by splitmix64,
// first ceil(ratio*n) shuffled chunks are train.
struct Split {
    std::vector<Chunk> train;
    std::vector<Chunk> test;
};
Split split_train_test(const std::vector<Chunk>& chunks, double ratio = 0.8,
                       std::uint64_t seed = 42);

// Loads every *.txt under dir (sorted by filename) as one document.
struct Corpus {
    std::vector<ParsedDoc> docs;
};
Corpus load_corpus(const std::filesystem::path& dir, IdAllocator& ids);

// Chunk manifest entry for the persisted manifest JSON.
ojson chunk_manifest_json(const std::vector<Chunk>& chunks);

} // namespace themis::ingest
