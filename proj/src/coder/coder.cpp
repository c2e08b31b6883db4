#include "themis/coder/coder.hpp"

#include "themis/errors.hpp"
#include "themis/util/text.hpp"

#include <algorithm>
#include <map>

namespace themis::coder {

bool code_label_ok(const std::string& label) {
    std::size_t wc = word_count(label);
    return wc >= 5 && wc <= 12;
}

bool code_description_ok(const std::string& description) {
    std::size_t wc = word_count(description);
    return wc >= 40 && wc <= 80;
}

namespace {

void warn(std::vector<std::string>* warnings, std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
}

// Splits a chunk-local [begin, end) span along the chunk's turn segments,
// then enforces the quote length window; pieces over the cap break at
// sentence terminators, pieces under the floor are discarded.
std::vector<QuoteDraft> resolve_quote_span(const Chunk& chunk, std::size_t begin, std::size_t end,
                                           const CoderConfig& config) {
    std::vector<QuoteDraft> out;
    for (const auto& seg : chunk.segments) {
        std::size_t lo = std::max(begin, seg.chunk_begin);
        std::size_t hi = std::min(end, seg.chunk_end);
        if (lo >= hi) continue;
        std::string piece = chunk.text.substr(lo, hi - lo);
        std::vector<std::pair<std::size_t, std::size_t>> parts;
        if (piece.size() > config.max_quote_chars) {
            std::size_t start = 0;
            for (const auto& [sb, se] : sentence_spans(piece)) {
                if (se - start > config.max_quote_chars && se > sb) {
                    if (sb > start) parts.emplace_back(start, sb);
                    start = sb;
                }
            }
            if (start < piece.size()) parts.emplace_back(start, piece.size());
            // a single sentence longer than the cap gets hard-cut
            std::vector<std::pair<std::size_t, std::size_t>> bounded;
            for (auto [b, e] : parts) {
                while (e - b > config.max_quote_chars) {
                    bounded.emplace_back(b, b + config.max_quote_chars);
                    b += config.max_quote_chars;
                }
                bounded.emplace_back(b, e);
            }
            parts = std::move(bounded);
        } else {
            parts.emplace_back(0, piece.size());
        }
        for (auto [b, e] : parts) {
            // trim whitespace from the edges while keeping exact offsets
            std::size_t tb = b;
            std::size_t te = e;
            while (tb < te && std::isspace(static_cast<unsigned char>(piece[tb]))) ++tb;
            while (te > tb && std::isspace(static_cast<unsigned char>(piece[te - 1]))) --te;
            if (te - tb < config.min_quote_chars) continue;
            QuoteDraft q;
            q.turn_id = seg.turn_id;
            q.turn_begin = seg.turn_begin + (lo - seg.chunk_begin) + tb;
            q.turn_end = q.turn_begin + (te - tb);
            q.text = piece.substr(tb, te - tb);
            out.push_back(std::move(q));
        }
    }
    return out;
}

// Fallback grounding: first sentence of the chunk sharing a content token
// with the label and satisfying the length window.
std::vector<QuoteDraft> reground(const Chunk& chunk, const std::string& label,
                                 const CoderConfig& config) {
    auto label_tokens = content_tokens(label);
    std::set<std::string> wanted;
    for (const auto& t : label_tokens) {
        if (t.size() >= 4) wanted.insert(t);
    }
    for (const auto& [b, e] : sentence_spans(chunk.text)) {
        std::string sentence = chunk.text.substr(b, e - b);
        if (trim_view(sentence).size() < config.min_quote_chars) continue;
        bool hit = false;
        for (const auto& t : content_tokens(sentence)) {
            if (wanted.count(t)) {
                hit = true;
                break;
            }
        }
        if (!hit) continue;
        auto resolved = resolve_quote_span(chunk, b, e, config);
        if (!resolved.empty()) return resolved;
    }
    return {};
}

struct RawDraft {
    std::string label;
    std::string description;
    std::vector<std::string> quotes;
};

std::vector<RawDraft> to_raw_drafts(const json& arr) {
    std::vector<RawDraft> out;
    for (const auto& item : arr) {
        RawDraft d;
        d.label = trim(item.at("label").get<std::string>());
        d.description = trim(item.at("description").get<std::string>());
        for (const auto& q : item.at("quotes")) {
            d.quotes.push_back(q.get<std::string>());
        }
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace

std::vector<CodeDraft> code_chunk(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                                  const Chunk& chunk, const CoderConfig& config,
                                  std::vector<std::string>* warnings) {
    if (trim_view(chunk.text).empty()) {
        raise(Errc::invalid_request, "code_chunk on empty chunk " + chunk.id.str());
    }
    llm::CompletionRequest request;
    request.role = llm::RoleTag::coder;
    request.temperature = config.temperature;
    request.seed_hint = config.seed_hint;
    request.prompt = prompts.render(llm::RoleTag::coder,
                                    {{"n_codes", std::to_string(config.codes_per_chunk)},
                                     {"min_quote_chars", std::to_string(config.min_quote_chars)},
                                     {"chunk_text", chunk.text}});
    json parsed = gateway.complete_parsed(request, llm::SchemaTag::code_list);
    auto raw = to_raw_drafts(parsed);

    // word-limit repair: one re-prompt for the invalid subset, then drop
    std::vector<RawDraft> valid;
    json invalid = json::array();
    for (auto& d : raw) {
        if (code_label_ok(d.label) && code_description_ok(d.description)) {
            valid.push_back(std::move(d));
        } else {
            json item;
            item["label"] = d.label;
            item["description"] = d.description;
            item["quotes"] = d.quotes;
            invalid.push_back(item);
        }
    }
    if (!invalid.empty()) {
        llm::CompletionRequest repair = request;
        repair.prompt += "\n\nThese codes violate the word limits (label 5-12 words, description "
                         "40-80 words). Rewrite them to comply and return the same JSON array "
                         "schema:\n" + invalid.dump();
        try {
            json fixed = gateway.complete_parsed(repair, llm::SchemaTag::code_list);
            for (auto& d : to_raw_drafts(fixed)) {
                if (code_label_ok(d.label) && code_description_ok(d.description)) {
                    valid.push_back(std::move(d));
                } else {
                    warn(warnings, "dropped draft after failed word-limit repair: " + d.label);
                }
            }
        } catch (const Error&) {
            warn(warnings, "word-limit repair re-prompt failed; dropping " +
                               std::to_string(invalid.size()) + " drafts");
        }
    }

    std::vector<CodeDraft> drafts;
    for (auto& d : valid) {
        CodeDraft out;
        out.label = d.label;
        out.description = d.description;
        out.source_chunk_id = chunk.id;
        for (const auto& q : d.quotes) {
            auto span = find_normalized(chunk.text, q);
            if (!span) continue;
            auto resolved = resolve_quote_span(chunk, span->first, span->second, config);
            out.quotes.insert(out.quotes.end(), resolved.begin(), resolved.end());
        }
        if (out.quotes.empty()) {
            out.quotes = reground(chunk, out.label, config);
        }
        if (out.quotes.empty()) {
            warn(warnings, std::string(errc_name(Errc::grounding_failure)) +
                               ": no verbatim quote found for draft '" + out.label +
                               "' in " + chunk.id.str() + "; draft dropped");
            continue;
        }
        drafts.push_back(std::move(out));
    }
    return drafts;
}

std::vector<NormalizedCode> normalize_codes(const std::vector<CodeDraft>& drafts) {
    if (drafts.empty()) {
        raise(Errc::invalid_request, "normalize_codes requires at least one draft");
    }
    std::vector<NormalizedCode> out;
    std::map<std::string, std::size_t> by_label;
    for (const auto& d : drafts) {
        std::string key = normalize_label(d.label);
        auto it = by_label.find(key);
        if (it == by_label.end()) {
            NormalizedCode c;
            c.label = d.label;
            c.description = d.description;
            c.source_chunk_ids.insert(d.source_chunk_id);
            for (const auto& q : d.quotes) c.quotes.emplace_back(d.source_chunk_id, q);
            by_label[key] = out.size();
            out.push_back(std::move(c));
        } else {
            NormalizedCode& c = out[it->second];
            c.source_chunk_ids.insert(d.source_chunk_id);
            for (const auto& q : d.quotes) {
                bool dup = false;
                for (const auto& [cid, existing] : c.quotes) {
                    if (existing.turn_id == q.turn_id && existing.turn_begin == q.turn_begin &&
                        existing.turn_end == q.turn_end) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) c.quotes.emplace_back(d.source_chunk_id, q);
            }
        }
    }
    return out;
}

std::string code_representation(const std::string& label, const std::string& description) {
    return label + ". " + description;
}

std::vector<std::pair<ArtifactId, ArtifactId>> candidate_pairs(
    const std::vector<Code>& codes, const std::vector<embed::Embedding>& representations,
    double sim_threshold) {
    std::vector<std::pair<ArtifactId, ArtifactId>> pairs;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        for (std::size_t j = i + 1; j < codes.size(); ++j) {
            if (embed::cosine(representations[i], representations[j]) > sim_threshold) {
                auto a = codes[i].id;
                auto b = codes[j].id;
                if (b < a) std::swap(a, b);
                pairs.emplace_back(a, b);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

const char* relation_kind_name(RelationKind k) {
    switch (k) {
        case RelationKind::equivalent: return "equivalent";
        case RelationKind::subordinate: return "subordinate";
        case RelationKind::reverse: return "reverse";
        case RelationKind::orthogonal: return "orthogonal";
    }
    return "?";
}

CodeRelation classify_relation(llm::Gateway& gateway, const llm::PromptLibrary& prompts,
                               const Code& a, const Code& b, double temperature,
                               std::optional<std::uint64_t> seed_hint,
                               std::vector<std::string>* warnings) {
    llm::CompletionRequest request;
    request.role = llm::RoleTag::relation_classifier;
    request.temperature = temperature;
    request.seed_hint = seed_hint;
    request.prompt = prompts.render(llm::RoleTag::relation_classifier,
                                    {{"label_a", a.label},
                                     {"description_a", a.description},
                                     {"label_b", b.label},
                                     {"description_b", b.description}});
    CodeRelation rel;
    rel.a = a.id;
    rel.b = b.id;
    try {
        json parsed = gateway.complete_parsed(request, llm::SchemaTag::relation_label);
        std::string kind = parsed.at("relation").get<std::string>();
        if (kind == "equivalent") {
            rel.kind = RelationKind::equivalent;
        } else if (kind == "subordinate") {
            rel.kind = RelationKind::subordinate;
        } else if (kind == "reverse") {
            // normalize: reverse(a,b) == subordinate(b,a)
            std::swap(rel.a, rel.b);
            rel.kind = RelationKind::subordinate;
        } else {
            rel.kind = RelationKind::orthogonal;
        }
    } catch (const Error& err) {
        if (err.code() != Errc::malformed_response) throw;
        rel.kind = RelationKind::orthogonal;
        warn(warnings, "relation response unparseable for (" + a.id.str() + ", " + b.id.str() +
                           "); treated as orthogonal");
    }
    return rel;
}

const Code* Codebook::find(const ArtifactId& id) const {
    for (const auto& c : codes) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const Code* Codebook::find_label(const std::string& normalized) const {
    for (const auto& c : codes) {
        if (normalize_label(c.label) == normalized) return &c;
    }
    return nullptr;
}

std::vector<std::string> Codebook::normalized_labels() const {
    std::vector<std::string> out;
    for (const auto& c : codes) out.push_back(normalize_label(c.label));
    std::sort(out.begin(), out.end());
    return out;
}

ojson Codebook::to_json() const {
    ojson doc;
    ojson arr = ojson::array();
    for (const auto& c : codes) {
        ojson j = themis::to_json(c);
        json parents = json::array();
        for (const auto& [child, parent] : parent_edges) {
            if (child == c.id) parents.push_back(parent.str());
        }
        j["parent_ids"] = parents;
        arr.push_back(std::move(j));
    }
    doc["codes"] = std::move(arr);
    doc["provenance"] = ojson{{"aid_begin", aid_begin}, {"aid_end", aid_end}};
    return doc;
}

Codebook Codebook::from_json(const json& doc) {
    Codebook book;
    std::uint64_t next_serial = 1;
    for (const auto& j : doc.at("codes")) {
        Code c;
        if (j.contains("id")) {
            c.id = id_from_json_field(j, "id");
        } else {
            c.id = ArtifactId{ArtifactKind::code, next_serial++};
        }
        c.label = j.at("label").get<std::string>();
        c.description = j.value("description", std::string("(no description provided)"));
        c.frequency = j.value("frequency", std::uint64_t{1});
        if (j.contains("source_chunk_ids")) {
            for (const auto& s : j.at("source_chunk_ids")) {
                if (auto id = ArtifactId::parse(s.get<std::string>())) {
                    c.source_chunk_ids.insert(*id);
                }
            }
        }
        if (j.contains("quote_ids")) {
            for (const auto& s : j.at("quote_ids")) {
                if (auto id = ArtifactId::parse(s.get<std::string>())) c.quote_ids.insert(*id);
            }
        }
        if (j.contains("parent_ids")) {
            for (const auto& s : j.at("parent_ids")) {
                if (auto id = ArtifactId::parse(s.get<std::string>())) {
                    book.parent_edges.insert({c.id, *id});
                }
            }
        }
        book.codes.push_back(std::move(c));
    }
    std::sort(book.codes.begin(), book.codes.end(),
              [](const Code& a, const Code& b) { return a.id < b.id; });
    if (doc.contains("provenance")) {
        book.aid_begin = doc["provenance"].value("aid_begin", std::uint64_t{0});
        book.aid_end = doc["provenance"].value("aid_end", std::uint64_t{0});
    }
    return book;
}

} // namespace themis::coder
