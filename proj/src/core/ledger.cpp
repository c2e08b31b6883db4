#include "themis/core/ledger.hpp"

#include "themis/errors.hpp"
#include "themis/util/misc.hpp"

#include <sstream>

namespace themis {

const char* action_type_name(ActionType t) {
    switch (t) {
        case ActionType::generate: return "generate";
        case ActionType::merge: return "merge";
        case ActionType::split: return "split";
        case ActionType::revise: return "revise";
        case ActionType::move: return "move";
        case ActionType::del: return "delete";
    }
    return "?";
}

std::optional<ActionType> action_type_from_name(std::string_view name) {
    if (name == "generate") return ActionType::generate;
    if (name == "merge") return ActionType::merge;
    if (name == "split") return ActionType::split;
    if (name == "revise") return ActionType::revise;
    if (name == "move") return ActionType::move;
    if (name == "delete") return ActionType::del;
    return std::nullopt;
}

ojson ActionEntry::to_json() const {
    ojson j;
    j["aid"] = aid;
    j["agent_role"] = agent_role;
    j["action_type"] = action_type_name(action_type);
    json in = json::array();
    for (const auto& id : inputs) in.push_back(id.str());
    j["inputs"] = in;
    json out = json::array();
    for (const auto& id : outputs) out.push_back(id.str());
    j["outputs"] = out;
    j["justification"] = justification;
    j["timestamp"] = timestamp;
    j["payload"] = payload;
    return j;
}

ActionEntry ActionEntry::from_json(const json& j) {
    ActionEntry e;
    try {
        e.aid = j.at("aid").get<std::uint64_t>();
        e.agent_role = j.at("agent_role").get<std::string>();
        auto at = action_type_from_name(j.at("action_type").get<std::string>());
        if (!at) {
            raise(Errc::corrupt_ledger,
                  "unknown action_type '" + j.at("action_type").get<std::string>() + "'");
        }
        e.action_type = *at;
        for (const auto& s : j.at("inputs")) {
            auto id = ArtifactId::parse(s.get<std::string>());
            if (!id) raise(Errc::corrupt_ledger, "bad input id in aid " + std::to_string(e.aid));
            e.inputs.push_back(*id);
        }
        for (const auto& s : j.at("outputs")) {
            auto id = ArtifactId::parse(s.get<std::string>());
            if (!id) raise(Errc::corrupt_ledger, "bad output id in aid " + std::to_string(e.aid));
            e.outputs.push_back(*id);
        }
        e.justification = j.at("justification").get<std::string>();
        e.timestamp = j.at("timestamp").get<std::string>();
        e.payload = j.at("payload");
    } catch (const json::exception& ex) {
        raise(Errc::corrupt_ledger, std::string("bad ledger entry: ") + ex.what());
    }
    return e;
}

std::uint64_t Ledger::append(EntryDraft draft, const Resolver& resolves) {
    if (sealed_) raise(Errc::ledger_sealed, "ledger is sealed; run already finalized");
    for (const auto& id : draft.inputs) {
        if (!resolves(id)) {
            raise(Errc::unknown_artifact, "append references unknown input " + id.str());
        }
    }
    ActionEntry e;
    e.aid = next_aid();
    e.agent_role = std::move(draft.agent_role);
    e.action_type = draft.action_type;
    e.inputs = std::move(draft.inputs);
    e.outputs = std::move(draft.outputs);
    e.justification = std::move(draft.justification);
    e.timestamp = now_rfc3339();
    e.payload = std::move(draft.payload);
    entries_.push_back(std::move(e));
    return entries_.back().aid;
}

std::string Ledger::to_jsonl() const {
    std::string out;
    for (const auto& e : entries_) {
        out += e.to_json().dump();
        out.push_back('\n');
    }
    return out;
}

Ledger Ledger::from_jsonl(const std::string& text) {
    Ledger ledger;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& ex) {
            raise(Errc::corrupt_ledger, std::string("unparseable ledger line: ") + ex.what());
        }
        ledger.entries_.push_back(ActionEntry::from_json(j));
    }
    return ledger;
}

void apply_entry(const ActionEntry& entry, CorpusStore& corpus, Hierarchy& hierarchy) {
    for (const auto& out_id : entry.outputs) {
        const std::string key = out_id.str();
        if (!entry.payload.contains(key)) {
            raise(Errc::corrupt_ledger,
                  "aid " + std::to_string(entry.aid) + " missing payload for " + key);
        }
        const json& art = entry.payload.at(key);
        std::string kind = art.at("kind").get<std::string>();
        if (kind == "turn") {
            corpus.put(turn_from_json(art));
        } else if (kind == "chunk") {
            corpus.put(chunk_from_json(art));
        } else {
            hierarchy.upsert_from_json(art);
        }
    }
}

ReplayResult replay(const std::vector<ActionEntry>& entries) {
    ReplayResult state;
    std::uint64_t expected = 1;
    for (const auto& e : entries) {
        if (e.aid != expected) {
            raise(Errc::corrupt_ledger, "aid gap: expected " + std::to_string(expected) +
                                            ", found " + std::to_string(e.aid));
        }
        ++expected;
        for (const auto& in_id : e.inputs) {
            if (!state.hierarchy.contains(in_id) && !state.corpus.contains(in_id)) {
                raise(Errc::corrupt_ledger, "aid " + std::to_string(e.aid) +
                                                " consumes not-yet-generated " + in_id.str());
            }
        }
        bool creating = e.action_type == ActionType::generate ||
                        e.action_type == ActionType::merge || e.action_type == ActionType::split;
        for (const auto& out_id : e.outputs) {
            bool known = state.hierarchy.contains(out_id) || state.corpus.contains(out_id);
            if (!known && !creating) {
                raise(Errc::corrupt_ledger, "aid " + std::to_string(e.aid) + " (" +
                                                action_type_name(e.action_type) +
                                                ") introduces " + out_id.str() +
                                                " without a generating action");
            }
        }
        apply_entry(e, state.corpus, state.hierarchy);
    }
    return state;
}

// --------------------------------------------------------------------------
// trace
// --------------------------------------------------------------------------

namespace {

std::string snippet(const std::string& text, std::size_t max_len = 60) {
    std::string out = text.substr(0, max_len);
    if (text.size() > max_len) out += "...";
    for (auto& c : out) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

TraceNode build_node(const Hierarchy& h, const CorpusStore* corpus, const ArtifactId& id,
                     std::vector<ArtifactId>& tree_ids) {
    TraceNode node;
    node.id = id;
    tree_ids.push_back(id);
    node.deleted = h.is_deleted(id);
    switch (id.kind) {
        case ArtifactKind::theme: {
            const Theme* t = h.theme(id);
            node.display = t ? t->label : "?";
            if (t) {
                for (const auto& c : t->subtheme_ids) {
                    node.children.push_back(build_node(h, corpus, c, tree_ids));
                }
            }
            break;
        }
        case ArtifactKind::subtheme: {
            const Subtheme* s = h.subtheme(id);
            node.display = s ? s->label : "?";
            if (s) {
                for (const auto& c : s->code_ids) {
                    node.children.push_back(build_node(h, corpus, c, tree_ids));
                }
            }
            break;
        }
        case ArtifactKind::code: {
            const Code* c = h.code(id);
            node.display = c ? c->label : "?";
            if (c) {
                for (const auto& q : c->quote_ids) {
                    node.children.push_back(build_node(h, corpus, q, tree_ids));
                }
            }
            break;
        }
        case ArtifactKind::quote: {
            const Quote* q = h.quote(id);
            node.display = q ? "\"" + snippet(q->text) + "\"" : "?";
            if (q) {
                node.turn_ref = q->turn_id;
                if (corpus) {
                    const Turn* t = corpus->turn(q->turn_id);
                    if (t) node.speaker = t->speaker;
                }
            }
            break;
        }
        default: break;
    }
    return node;
}

} // namespace

ProvenanceChain trace(const Hierarchy& hierarchy, const CorpusStore* corpus,
                      const Ledger& ledger, const ArtifactId& id) {
    if (!hierarchy.contains(id)) {
        raise(Errc::unknown_artifact, "trace target " + id.str() + " does not resolve");
    }
    ProvenanceChain chain;
    chain.root = build_node(hierarchy, corpus, id, chain.tree_ids);
    std::set<ArtifactId> on_tree(chain.tree_ids.begin(), chain.tree_ids.end());
    // lineage closure: an entry that produced an artifact on the chain pulls
    // its hierarchy-side inputs in too, so merge/split ancestry stays visible
    auto hierarchy_kind = [](ArtifactKind k) {
        return k == ArtifactKind::quote || k == ArtifactKind::code ||
               k == ArtifactKind::subtheme || k == ArtifactKind::theme;
    };
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& e : ledger.entries()) {
            bool produces = false;
            for (const auto& o : e.outputs) {
                if (on_tree.count(o)) {
                    produces = true;
                    break;
                }
            }
            if (!produces) continue;
            for (const auto& i : e.inputs) {
                if (hierarchy_kind(i.kind) && on_tree.insert(i).second) grew = true;
            }
        }
    }
    for (const auto& e : ledger.entries()) {
        bool touches = false;
        for (const auto& i : e.inputs) {
            if (on_tree.count(i)) {
                touches = true;
                break;
            }
        }
        if (!touches) {
            for (const auto& o : e.outputs) {
                if (on_tree.count(o)) {
                    touches = true;
                    break;
                }
            }
        }
        if (touches) chain.entries.push_back(e);
    }
    return chain;
}

namespace {

void render_node(const TraceNode& node, int depth, std::string& out) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += node.id.str();
    out += "  ";
    out += node.display;
    if (node.turn_ref) {
        out += "  [turn ";
        out += node.turn_ref->str();
        if (node.speaker) out += ", " + *node.speaker;
        out += "]";
    }
    if (node.deleted) out += "  (tombstoned)";
    out += "\n";
    for (const auto& c : node.children) render_node(c, depth + 1, out);
}

} // namespace

std::string render_trace(const ProvenanceChain& chain) {
    std::string out;
    render_node(chain.root, 0, out);
    out += "\nledger entries (" + std::to_string(chain.entries.size()) + "):\n";
    for (const auto& e : chain.entries) {
        out += "  aid " + std::to_string(e.aid) + "  " + e.agent_role + "/" +
               action_type_name(e.action_type);
        out += "  in[";
        for (std::size_t i = 0; i < e.inputs.size(); ++i) {
            if (i) out += ",";
            out += e.inputs[i].str();
        }
        out += "] out[";
        for (std::size_t i = 0; i < e.outputs.size(); ++i) {
            if (i) out += ",";
            out += e.outputs[i].str();
        }
        out += "]  " + e.justification + "\n";
    }
    return out;
}

} // namespace themis
