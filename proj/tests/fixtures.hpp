#pragma once

// Hand-scripted toy states used across the test suites.

#include "themis/errors.hpp"
#include "themis/synth/synthesizer.hpp"
#include "themis/util/text.hpp"

#include <string>
#include <vector>

namespace tfx {

using namespace themis;

inline std::string lorem_turn_text() {
    return "Participants described shared tools and budget pressure throughout the growing "
           "seasons. Several members organized water storage and compost rotas together. "
           "Newcomers joined the lottery beds and learned pruning from the older members. "
           "The committee debated rotation fairness for two entire summers in a row.";
}

inline std::string valid_code_description(int i) {
    return fit_word_count("Captures account number " + std::to_string(i) +
                              " of how participants discuss shared resources and fairness "
                              "rules in the garden including water compost and tool budgets "
                              "with concrete examples of daily routines decisions and the "
                              "consequences members reported over repeated seasons",
                          40, 80);
}

inline std::string valid_theme_description() {
    return fit_word_count("Aggregated pattern spanning resource fairness social learning and "
                              "governance debates that recur across the interviews with members "
                              "repeatedly connecting practical constraints personal expectations "
                              "and neighborhood relationships when describing what changed for "
                              "them what support they relied on and what stayed difficult over "
                              "time across seasons and committee meetings throughout the program",
                          60, 80);
}

struct Toy {
    synth::RunState state;
    ArtifactId turn_id;
    ArtifactId chunk_id;
    std::vector<ArtifactId> quote_ids;
    std::vector<ArtifactId> code_ids;
    std::vector<ArtifactId> subtheme_ids;
    ArtifactId theme_id;
};

// A fully-linked toy hierarchy: one turn/chunk, n codes with one quote each,
// subthemes of `group` codes, one theme over all subthemes.
inline Toy make_toy(int n_codes = 5, int group = 5) {
    Toy toy;
    auto& st = toy.state;
    std::string text = lorem_turn_text();

    Turn turn;
    turn.id = st.ids.fresh(ArtifactKind::turn);
    turn.doc_id = "toy_doc";
    turn.speaker = "P1";
    turn.text = text;
    turn.index = 0;
    toy.turn_id = turn.id;
    {
        EntryDraft d;
        d.agent_role = "ingest";
        d.action_type = ActionType::generate;
        d.justification = "toy turn";
        d.outputs.push_back(turn.id);
        d.payload[turn.id.str()] = to_json(turn);
        st.record(std::move(d));
    }
    Chunk chunk;
    chunk.id = st.ids.fresh(ArtifactKind::chunk);
    chunk.doc_id = "toy_doc";
    chunk.unit = ChunkUnit::chars;
    chunk.turn_begin = 0;
    chunk.turn_end = 0;
    chunk.text = text;
    chunk.offset_begin = 0;
    chunk.offset_end = text.size();
    chunk.segments.push_back({turn.id, 0, text.size(), 0});
    toy.chunk_id = chunk.id;
    {
        EntryDraft d;
        d.agent_role = "ingest";
        d.action_type = ActionType::generate;
        d.justification = "toy chunk";
        d.inputs.push_back(turn.id);
        d.outputs.push_back(chunk.id);
        d.payload[chunk.id.str()] = to_json(chunk);
        st.record(std::move(d));
    }

    for (int i = 0; i < n_codes; ++i) {
        Quote q;
        q.id = st.ids.fresh(ArtifactKind::quote);
        q.chunk_id = chunk.id;
        q.turn_id = turn.id;
        q.span_begin = static_cast<std::size_t>(i) * 8;
        q.span_end = q.span_begin + 40;
        q.text = text.substr(q.span_begin, 40);
        Code c;
        c.id = st.ids.fresh(ArtifactKind::code);
        c.label = "Toy code " + std::to_string(i) + " about shared resources";
        c.description = valid_code_description(i);
        c.frequency = 1;
        c.source_chunk_ids.insert(chunk.id);
        c.quote_ids.insert(q.id);
        EntryDraft d;
        d.agent_role = "coder";
        d.action_type = ActionType::generate;
        d.justification = "toy code " + std::to_string(i);
        d.inputs.push_back(chunk.id);
        d.outputs.push_back(q.id);
        d.outputs.push_back(c.id);
        d.payload[q.id.str()] = to_json(q);
        d.payload[c.id.str()] = to_json(c);
        st.record(std::move(d));
        toy.quote_ids.push_back(q.id);
        toy.code_ids.push_back(c.id);
    }

    for (int base = 0; base < n_codes; base += group) {
        Subtheme s;
        s.id = st.ids.fresh(ArtifactKind::subtheme);
        s.label = "Toy subtheme " + std::to_string(base / group);
        s.description = "Grouping of scripted codes for tests.";
        for (int i = base; i < n_codes && i < base + group; ++i) {
            s.code_ids.insert(toy.code_ids[static_cast<std::size_t>(i)]);
        }
        EntryDraft d;
        d.agent_role = "synthesizer";
        d.action_type = ActionType::generate;
        d.justification = "toy subtheme";
        for (const auto& cid : s.code_ids) d.inputs.push_back(cid);
        d.outputs.push_back(s.id);
        d.payload[s.id.str()] = to_json(s);
        st.record(std::move(d));
        toy.subtheme_ids.push_back(s.id);
    }

    Theme t;
    t.id = st.ids.fresh(ArtifactKind::theme);
    t.label = fit_word_count("Toy theme spanning all scripted subthemes", 5, 10);
    t.description = valid_theme_description();
    for (const auto& sid : toy.subtheme_ids) t.subtheme_ids.insert(sid);
    {
        EntryDraft d;
        d.agent_role = "synthesizer";
        d.action_type = ActionType::generate;
        d.justification = "toy theme";
        for (const auto& sid : t.subtheme_ids) d.inputs.push_back(sid);
        d.outputs.push_back(t.id);
        d.payload[t.id.str()] = to_json(t);
        st.record(std::move(d));
    }
    toy.theme_id = t.id;
    return toy;
}

// Code value helper for graph/consolidation tests.
inline Code make_code(std::uint64_t serial, std::string label, std::uint64_t freq,
                      std::vector<std::uint64_t> chunk_serials = {},
                      std::vector<std::uint64_t> quote_serials = {}) {
    Code c;
    c.id = ArtifactId{ArtifactKind::code, serial};
    c.label = std::move(label);
    c.description = valid_code_description(static_cast<int>(serial));
    c.frequency = freq;
    for (auto s : chunk_serials) c.source_chunk_ids.insert(ArtifactId{ArtifactKind::chunk, s});
    while (c.source_chunk_ids.size() < freq) {
        c.source_chunk_ids.insert(
            ArtifactId{ArtifactKind::chunk, 1000 + serial * 50 + c.source_chunk_ids.size()});
    }
    for (auto s : quote_serials) c.quote_ids.insert(ArtifactId{ArtifactKind::quote, s});
    if (c.quote_ids.empty()) c.quote_ids.insert(ArtifactId{ArtifactKind::quote, 9000 + serial});
    return c;
}

} // namespace tfx
