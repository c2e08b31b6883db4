#include "themis/ingest/ingest.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"
#include "themis/util/rng.hpp"
#include "themis/util/text.hpp"

#include <algorithm>
#include <cmath>

namespace themis::ingest {

namespace {

// "SPEAKER:" prefix if the line opens a turn: non-empty, at most 5 words.
std::optional<std::pair<std::string, std::string>> speaker_split(std::string_view line) {
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    std::string speaker = trim(line.substr(0, colon));
    if (speaker.empty() || word_count(speaker) > 5) return std::nullopt;
    std::string rest = trim(line.substr(colon + 1));
    return std::make_pair(std::move(speaker), std::move(rest));
}

} // namespace

std::vector<Turn> parse_turns(std::string_view raw, const std::string& doc_id,
                              IdAllocator& ids) {
    if (trim_view(raw).empty()) {
        raise(Errc::empty_document, "no non-whitespace content in " + doc_id);
    }
    struct Pending {
        std::string speaker;
        std::string text;
    };
    std::vector<Pending> pending;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        std::size_t nl = raw.find('\n', pos);
        std::string_view line = raw.substr(pos, nl == std::string_view::npos ? raw.size() - pos
                                                                             : nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (auto sp = speaker_split(line)) {
            pending.push_back({sp->first, sp->second});
        } else {
            if (pending.empty()) pending.push_back({"UNKNOWN", ""});
            auto& cur = pending.back();
            if (!cur.text.empty()) cur.text.push_back('\n');
            cur.text.append(line.begin(), line.end());
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    std::vector<Turn> turns;
    int index = 0;
    for (auto& p : pending) {
        std::string text = trim(p.text);
        if (text.empty()) continue; // a label with no content is not a turn
        Turn t;
        t.id = ids.fresh(ArtifactKind::turn);
        t.doc_id = doc_id;
        t.speaker = p.speaker;
        t.text = std::move(text);
        t.index = index++;
        turns.push_back(std::move(t));
    }
    if (turns.empty()) {
        raise(Errc::empty_document, "no turns with content in " + doc_id);
    }
    return turns;
}

ParsedDoc parse_document(std::string_view raw, const std::string& doc_id, IdAllocator& ids) {
    ParsedDoc doc;
    doc.doc_id = doc_id;
    doc.turns = parse_turns(raw, doc_id, ids);
    for (std::size_t i = 0; i < doc.turns.size(); ++i) {
        if (i) doc.joined_text.push_back('\n');
        doc.turn_offsets.push_back(doc.joined_text.size());
        doc.joined_text += doc.turns[i].text;
    }
    return doc;
}

namespace {

// Fills turn_span and segments for a chunk covering [begin, end) of
// joined_text.
void attach_segments(Chunk& chunk, const ParsedDoc& doc, std::size_t begin, std::size_t end) {
    chunk.turn_begin = -1;
    for (std::size_t i = 0; i < doc.turns.size(); ++i) {
        std::size_t t_begin = doc.turn_offsets[i];
        std::size_t t_end = t_begin + doc.turns[i].text.size();
        std::size_t lo = std::max(begin, t_begin);
        std::size_t hi = std::min(end, t_end);
        if (lo >= hi) continue;
        if (chunk.turn_begin < 0) chunk.turn_begin = static_cast<int>(i);
        chunk.turn_end = static_cast<int>(i);
        TurnSegment seg;
        seg.turn_id = doc.turns[i].id;
        seg.chunk_begin = lo - begin;
        seg.chunk_end = hi - begin;
        seg.turn_begin = lo - t_begin;
        chunk.segments.push_back(seg);
    }
    if (chunk.turn_begin < 0) {
        chunk.turn_begin = 0;
        chunk.turn_end = 0;
    }
}

} // namespace

std::vector<Chunk> chunk_chars(const ParsedDoc& doc, IdAllocator& ids, std::size_t max_chars,
                               std::size_t overlap_chars) {
    if (max_chars == 0 || overlap_chars >= max_chars) {
        raise(Errc::invalid_config, "chunk_chars requires max_chars > overlap_chars >= 0");
    }
    const std::string& text = doc.joined_text;
    const std::size_t len = text.size();

    // Cut candidates: starts of turns (cutting there keeps turns whole).
    std::vector<std::size_t> turn_cuts;
    for (std::size_t i = 1; i < doc.turn_offsets.size(); ++i) {
        turn_cuts.push_back(doc.turn_offsets[i]);
    }

    auto latest_sentence_cut = [&](std::size_t from, std::size_t upto) -> std::size_t {
        std::size_t best = 0;
        for (std::size_t i = from; i < upto && i < len; ++i) {
            char c = text[i];
            if (c == '.' || c == '!' || c == '?') {
                std::size_t j = i + 1;
                if (j >= len || std::isspace(static_cast<unsigned char>(text[j]))) {
                    if (j > from && j <= upto) best = j;
                }
            }
        }
        return best;
    };

    std::vector<Chunk> chunks;
    std::size_t content_begin = 0; // start of new (non-overlap) content
    std::size_t prev_chunk_begin = 0;
    while (content_begin < len) {
        std::size_t overlap = 0;
        if (!chunks.empty()) {
            std::size_t prev_len = content_begin - prev_chunk_begin;
            overlap = std::min(overlap_chars, prev_len);
        }
        std::size_t begin = content_begin - overlap;
        std::size_t end;
        if (len - begin <= max_chars) {
            end = len;
        } else {
            std::size_t budget = begin + max_chars;
            // latest turn boundary that both fits and makes progress
            std::size_t cut = 0;
            for (std::size_t b : turn_cuts) {
                if (b > content_begin && b <= budget) cut = std::max(cut, b);
            }
            if (cut == 0) cut = latest_sentence_cut(content_begin + 1, budget);
            end = cut != 0 ? cut : budget;
        }
        Chunk chunk;
        chunk.id = ids.fresh(ArtifactKind::chunk);
        chunk.doc_id = doc.doc_id;
        chunk.unit = ChunkUnit::chars;
        chunk.text = text.substr(begin, end - begin);
        chunk.overlap_with_prev = overlap;
        chunk.offset_begin = begin;
        chunk.offset_end = end;
        attach_segments(chunk, doc, begin, end);
        chunks.push_back(std::move(chunk));
        prev_chunk_begin = begin;
        content_begin = end;
    }
    return chunks;
}

std::vector<Chunk> chunk_words(const ParsedDoc& doc, IdAllocator& ids, std::size_t words,
                               std::size_t overlap) {
    if (words == 0 || overlap >= words) {
        raise(Errc::invalid_config, "chunk_words requires words > overlap");
    }
    const std::string& text = doc.joined_text;
    auto tokens = token_spans(text);
    const std::size_t n = tokens.size();
    std::vector<Chunk> chunks;
    if (n == 0) return chunks;
    const std::size_t step = words - overlap;
    std::size_t start = 0;
    while (true) {
        std::size_t stop = std::min(start + words, n);
        std::size_t begin = tokens[start].begin;
        std::size_t end = tokens[stop - 1].end;
        Chunk chunk;
        chunk.id = ids.fresh(ArtifactKind::chunk);
        chunk.doc_id = doc.doc_id;
        chunk.unit = ChunkUnit::words;
        chunk.text = text.substr(begin, end - begin);
        chunk.overlap_with_prev = chunks.empty() ? 0 : overlap;
        chunk.offset_begin = start;
        chunk.offset_end = stop;
        attach_segments(chunk, doc, begin, end);
        chunks.push_back(std::move(chunk));
        if (start + words >= n) break;
        start += step;
    }
    return chunks;
}

Split split_train_test(const std::vector<Chunk>& chunks, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) {
        raise(Errc::invalid_config, "split ratio must lie in (0, 1)");
    }
    if (chunks.size() < 2) {
        raise(Errc::too_few_chunks, "need at least 2 chunks, got " +
                                        std::to_string(chunks.size()));
    }
    auto order = shuffled_indices(chunks.size(), seed);
    std::size_t n_train = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(chunks.size())));
    Split split;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < n_train) {
            split.train.push_back(chunks[order[i]]);
        } else {
            split.test.push_back(chunks[order[i]]);
        }
    }
    return split;
}

Corpus load_corpus(const std::filesystem::path& dir, IdAllocator& ids) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        raise(Errc::corpus_error, "corpus directory not found: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        raise(Errc::corpus_error, "no .txt transcripts under " + dir.string());
    }
    Corpus corpus;
    for (const auto& f : files) {
        corpus.docs.push_back(parse_document(read_file(f), f.stem().string(), ids));
    }
    return corpus;
}

ojson chunk_manifest_json(const std::vector<Chunk>& chunks) {
    ojson arr = ojson::array();
    for (const auto& c : chunks) {
        ojson j;
        j["chunk_id"] = c.id.str();
        j["doc_id"] = c.doc_id;
        j["unit"] = chunk_unit_name(c.unit);
        j["offsets"] = json::array({c.offset_begin, c.offset_end});
        j["turn_span"] = json::array({c.turn_begin, c.turn_end});
        j["sha256"] = sha256_hex(c.text);
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace themis::ingest
