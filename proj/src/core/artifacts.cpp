#include "themis/core/artifacts.hpp"

#include "themis/errors.hpp"

namespace themis {

const char* chunk_unit_name(ChunkUnit u) {
    return u == ChunkUnit::chars ? "chars" : "words";
}

namespace {

json ids_to_json(const std::set<ArtifactId>& ids) {
    json arr = json::array();
    for (const auto& id : ids) arr.push_back(id.str());
    return arr;
}

std::set<ArtifactId> ids_from_json(const json& arr, const char* field) {
    std::set<ArtifactId> out;
    for (const auto& e : arr) {
        auto id = ArtifactId::parse(e.get<std::string>());
        if (!id) raise(Errc::corrupt_ledger, std::string("bad id in ") + field);
        out.insert(*id);
    }
    return out;
}

} // namespace

ArtifactId id_from_json_field(const json& j, const char* field) {
    auto id = ArtifactId::parse(j.at(field).get<std::string>());
    if (!id) raise(Errc::corrupt_ledger, std::string("unparseable id field ") + field);
    return *id;
}

ojson to_json(const Turn& t) {
    ojson j;
    j["id"] = t.id.str();
    j["kind"] = "turn";
    j["doc_id"] = t.doc_id;
    j["speaker"] = t.speaker;
    j["text"] = t.text;
    j["index"] = t.index;
    return j;
}

Turn turn_from_json(const json& j) {
    Turn t;
    t.id = id_from_json_field(j, "id");
    t.doc_id = j.at("doc_id").get<std::string>();
    t.speaker = j.at("speaker").get<std::string>();
    t.text = j.at("text").get<std::string>();
    t.index = j.at("index").get<int>();
    return t;
}

ojson to_json(const Chunk& c) {
    ojson j;
    j["id"] = c.id.str();
    j["kind"] = "chunk";
    j["doc_id"] = c.doc_id;
    j["unit"] = chunk_unit_name(c.unit);
    j["turn_span"] = json::array({c.turn_begin, c.turn_end});
    j["text"] = c.text;
    j["overlap_with_prev"] = c.overlap_with_prev;
    j["offsets"] = json::array({c.offset_begin, c.offset_end});
    json segs = json::array();
    for (const auto& s : c.segments) {
        json sj;
        sj["turn_id"] = s.turn_id.str();
        sj["chunk_begin"] = s.chunk_begin;
        sj["chunk_end"] = s.chunk_end;
        sj["turn_begin"] = s.turn_begin;
        segs.push_back(sj);
    }
    j["segments"] = segs;
    return j;
}

Chunk chunk_from_json(const json& j) {
    Chunk c;
    c.id = id_from_json_field(j, "id");
    c.doc_id = j.at("doc_id").get<std::string>();
    c.unit = j.at("unit").get<std::string>() == "chars" ? ChunkUnit::chars : ChunkUnit::words;
    c.turn_begin = j.at("turn_span")[0].get<int>();
    c.turn_end = j.at("turn_span")[1].get<int>();
    c.text = j.at("text").get<std::string>();
    c.overlap_with_prev = j.at("overlap_with_prev").get<std::size_t>();
    c.offset_begin = j.at("offsets")[0].get<std::size_t>();
    c.offset_end = j.at("offsets")[1].get<std::size_t>();
    for (const auto& sj : j.at("segments")) {
        TurnSegment s;
        s.turn_id = id_from_json_field(sj, "turn_id");
        s.chunk_begin = sj.at("chunk_begin").get<std::size_t>();
        s.chunk_end = sj.at("chunk_end").get<std::size_t>();
        s.turn_begin = sj.at("turn_begin").get<std::size_t>();
        c.segments.push_back(s);
    }
    return c;
}

ojson to_json(const Quote& q) {
    ojson j;
    j["id"] = q.id.str();
    j["kind"] = "quote";
    j["chunk_id"] = q.chunk_id.str();
    j["turn_id"] = q.turn_id.str();
    j["span"] = json::array({q.span_begin, q.span_end});
    j["text"] = q.text;
    j["deleted"] = q.deleted;
    return j;
}

Quote quote_from_json(const json& j) {
    Quote q;
    q.id = id_from_json_field(j, "id");
    q.chunk_id = id_from_json_field(j, "chunk_id");
    q.turn_id = id_from_json_field(j, "turn_id");
    q.span_begin = j.at("span")[0].get<std::size_t>();
    q.span_end = j.at("span")[1].get<std::size_t>();
    q.text = j.at("text").get<std::string>();
    q.deleted = j.value("deleted", false);
    return q;
}

ojson to_json(const Code& c) {
    ojson j;
    j["id"] = c.id.str();
    j["kind"] = "code";
    j["label"] = c.label;
    j["description"] = c.description;
    j["frequency"] = c.frequency;
    j["source_chunk_ids"] = ids_to_json(c.source_chunk_ids);
    j["quote_ids"] = ids_to_json(c.quote_ids);
    j["deleted"] = c.deleted;
    return j;
}

Code code_from_json(const json& j) {
    Code c;
    c.id = id_from_json_field(j, "id");
    c.label = j.at("label").get<std::string>();
    c.description = j.at("description").get<std::string>();
    c.frequency = j.at("frequency").get<std::uint64_t>();
    c.source_chunk_ids = ids_from_json(j.at("source_chunk_ids"), "source_chunk_ids");
    c.quote_ids = ids_from_json(j.at("quote_ids"), "quote_ids");
    c.deleted = j.value("deleted", false);
    return c;
}

ojson to_json(const Subtheme& s) {
    ojson j;
    j["id"] = s.id.str();
    j["kind"] = "subtheme";
    j["label"] = s.label;
    j["description"] = s.description;
    j["code_ids"] = ids_to_json(s.code_ids);
    j["deleted"] = s.deleted;
    return j;
}

Subtheme subtheme_from_json(const json& j) {
    Subtheme s;
    s.id = id_from_json_field(j, "id");
    s.label = j.at("label").get<std::string>();
    s.description = j.at("description").get<std::string>();
    s.code_ids = ids_from_json(j.at("code_ids"), "code_ids");
    s.deleted = j.value("deleted", false);
    return s;
}

ojson to_json(const Theme& t) {
    ojson j;
    j["id"] = t.id.str();
    j["kind"] = "theme";
    j["label"] = t.label;
    j["description"] = t.description;
    j["subtheme_ids"] = ids_to_json(t.subtheme_ids);
    j["deleted"] = t.deleted;
    return j;
}

Theme theme_from_json(const json& j) {
    Theme t;
    t.id = id_from_json_field(j, "id");
    t.label = j.at("label").get<std::string>();
    t.description = j.at("description").get<std::string>();
    t.subtheme_ids = ids_from_json(j.at("subtheme_ids"), "subtheme_ids");
    t.deleted = j.value("deleted", false);
    return t;
}

} // namespace themis
