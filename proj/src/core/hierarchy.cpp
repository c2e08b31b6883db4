#include "themis/core/hierarchy.hpp"

#include "themis/errors.hpp"
#include "themis/util/text.hpp"

namespace themis {

const Turn* CorpusStore::turn(const ArtifactId& id) const {
    auto it = turns_.find(id);
    return it == turns_.end() ? nullptr : &it->second;
}

const Chunk* CorpusStore::chunk(const ArtifactId& id) const {
    auto it = chunks_.find(id);
    return it == chunks_.end() ? nullptr : &it->second;
}

bool CorpusStore::contains(const ArtifactId& id) const {
    return turn(id) != nullptr || chunk(id) != nullptr;
}

void Hierarchy::relink(const ArtifactId& parent, const std::set<ArtifactId>& old_children,
                       const std::set<ArtifactId>& new_children) {
    for (const auto& c : old_children) {
        if (!new_children.count(c)) {
            auto it = parents_.find(c);
            if (it != parents_.end()) {
                it->second.erase(parent);
                if (it->second.empty()) parents_.erase(it);
            }
        }
    }
    for (const auto& c : new_children) {
        parents_[c].insert(parent);
    }
}

void Hierarchy::upsert(const Quote& q) {
    quotes_[q.id] = q;
}

void Hierarchy::upsert(const Code& c) {
    auto it = codes_.find(c.id);
    std::set<ArtifactId> old_children = it != codes_.end() ? it->second.quote_ids
                                                           : std::set<ArtifactId>{};
    relink(c.id, old_children, c.quote_ids);
    codes_[c.id] = c;
}

void Hierarchy::upsert(const Subtheme& s) {
    auto it = subthemes_.find(s.id);
    std::set<ArtifactId> old_children = it != subthemes_.end() ? it->second.code_ids
                                                               : std::set<ArtifactId>{};
    relink(s.id, old_children, s.code_ids);
    subthemes_[s.id] = s;
}

void Hierarchy::upsert(const Theme& t) {
    auto it = themes_.find(t.id);
    std::set<ArtifactId> old_children = it != themes_.end() ? it->second.subtheme_ids
                                                            : std::set<ArtifactId>{};
    relink(t.id, old_children, t.subtheme_ids);
    themes_[t.id] = t;
}

void Hierarchy::upsert_from_json(const json& artifact) {
    std::string kind = artifact.at("kind").get<std::string>();
    if (kind == "quote") {
        upsert(quote_from_json(artifact));
    } else if (kind == "code") {
        upsert(code_from_json(artifact));
    } else if (kind == "subtheme") {
        upsert(subtheme_from_json(artifact));
    } else if (kind == "theme") {
        upsert(theme_from_json(artifact));
    } else {
        raise(Errc::corrupt_ledger, "unknown artifact kind '" + kind + "' in hierarchy payload");
    }
}

bool Hierarchy::contains(const ArtifactId& id) const {
    switch (id.kind) {
        case ArtifactKind::quote: return quotes_.count(id) > 0;
        case ArtifactKind::code: return codes_.count(id) > 0;
        case ArtifactKind::subtheme: return subthemes_.count(id) > 0;
        case ArtifactKind::theme: return themes_.count(id) > 0;
        default: return false;
    }
}

const Quote* Hierarchy::quote(const ArtifactId& id) const {
    auto it = quotes_.find(id);
    return it == quotes_.end() ? nullptr : &it->second;
}

const Code* Hierarchy::code(const ArtifactId& id) const {
    auto it = codes_.find(id);
    return it == codes_.end() ? nullptr : &it->second;
}

const Subtheme* Hierarchy::subtheme(const ArtifactId& id) const {
    auto it = subthemes_.find(id);
    return it == subthemes_.end() ? nullptr : &it->second;
}

const Theme* Hierarchy::theme(const ArtifactId& id) const {
    auto it = themes_.find(id);
    return it == themes_.end() ? nullptr : &it->second;
}

bool Hierarchy::is_deleted(const ArtifactId& id) const {
    switch (id.kind) {
        case ArtifactKind::quote: {
            auto* q = quote(id);
            return q && q->deleted;
        }
        case ArtifactKind::code: {
            auto* c = code(id);
            return c && c->deleted;
        }
        case ArtifactKind::subtheme: {
            auto* s = subtheme(id);
            return s && s->deleted;
        }
        case ArtifactKind::theme: {
            auto* t = theme(id);
            return t && t->deleted;
        }
        default: return false;
    }
}

std::set<ArtifactId> Hierarchy::parents_of(const ArtifactId& id) const {
    auto it = parents_.find(id);
    if (it == parents_.end()) return {};
    std::set<ArtifactId> live;
    for (const auto& p : it->second) {
        if (is_live(p)) live.insert(p);
    }
    return live;
}

std::set<ArtifactId> Hierarchy::children_of(const ArtifactId& id) const {
    switch (id.kind) {
        case ArtifactKind::code: {
            auto* c = code(id);
            return c ? c->quote_ids : std::set<ArtifactId>{};
        }
        case ArtifactKind::subtheme: {
            auto* s = subtheme(id);
            return s ? s->code_ids : std::set<ArtifactId>{};
        }
        case ArtifactKind::theme: {
            auto* t = theme(id);
            return t ? t->subtheme_ids : std::set<ArtifactId>{};
        }
        default: return {};
    }
}

std::vector<ArtifactId> Hierarchy::live_ids(ArtifactKind kind) const {
    std::vector<ArtifactId> out;
    auto collect = [&](const auto& m) {
        for (const auto& [id, a] : m) {
            if (!a.deleted) out.push_back(id);
        }
    };
    switch (kind) {
        case ArtifactKind::quote: collect(quotes_); break;
        case ArtifactKind::code: collect(codes_); break;
        case ArtifactKind::subtheme: collect(subthemes_); break;
        case ArtifactKind::theme: collect(themes_); break;
        default: break;
    }
    return out;
}

bool Hierarchy::empty() const {
    return themes_.empty() && subthemes_.empty() && codes_.empty() && quotes_.empty();
}

ojson Hierarchy::canonical_json() const {
    ojson doc;
    ojson themes = ojson::array();
    for (const auto& [id, t] : themes_) themes.push_back(to_json(t));
    ojson subthemes = ojson::array();
    for (const auto& [id, s] : subthemes_) subthemes.push_back(to_json(s));
    ojson codes = ojson::array();
    for (const auto& [id, c] : codes_) codes.push_back(to_json(c));
    ojson quotes = ojson::array();
    for (const auto& [id, q] : quotes_) quotes.push_back(to_json(q));
    doc["themes"] = std::move(themes);
    doc["subthemes"] = std::move(subthemes);
    doc["codes"] = std::move(codes);
    doc["quotes"] = std::move(quotes);
    return doc;
}

std::string Hierarchy::canonical_dump() const {
    return canonical_json().dump(2);
}

Hierarchy Hierarchy::from_json(const json& doc) {
    Hierarchy h;
    for (const auto& j : doc.at("quotes")) h.upsert(quote_from_json(j));
    for (const auto& j : doc.at("codes")) h.upsert(code_from_json(j));
    for (const auto& j : doc.at("subthemes")) h.upsert(subtheme_from_json(j));
    for (const auto& j : doc.at("themes")) h.upsert(theme_from_json(j));
    return h;
}

std::vector<std::string> Hierarchy::verify(const CorpusStore* corpus) const {
    std::vector<std::string> problems;
    auto complain = [&](std::string msg) { problems.push_back(std::move(msg)); };

    // dangling children + link symmetry
    auto check_children = [&](const ArtifactId& parent, const std::set<ArtifactId>& children) {
        for (const auto& c : children) {
            if (!contains(c)) {
                complain("dangling child " + c.str() + " under " + parent.str());
                continue;
            }
            auto it = parents_.find(c);
            if (it == parents_.end() || !it->second.count(parent)) {
                complain("parent table missing " + parent.str() + " for " + c.str());
            }
        }
    };
    for (const auto& [id, t] : themes_) check_children(id, t.subtheme_ids);
    for (const auto& [id, s] : subthemes_) check_children(id, s.code_ids);
    for (const auto& [id, c] : codes_) check_children(id, c.quote_ids);

    // reverse direction: every parent-table entry appears on the parent
    for (const auto& [child, ps] : parents_) {
        for (const auto& p : ps) {
            if (!children_of(p).count(child)) {
                complain("parent table lists " + p.str() + " for " + child.str() +
                         " but the parent does not link it");
            }
        }
    }

    // coverage over live artifacts
    for (const auto& [id, c] : codes_) {
        if (c.deleted) continue;
        if (parents_of(id).empty()) complain("live code " + id.str() + " has no live subtheme");
        if (c.quote_ids.empty()) complain("live code " + id.str() + " has no quotes");
    }
    for (const auto& [id, s] : subthemes_) {
        if (s.deleted) continue;
        if (parents_of(id).empty()) complain("live subtheme " + id.str() + " has no live theme");
        if (s.code_ids.empty()) complain("live subtheme " + id.str() + " has no children");
    }
    for (const auto& [id, t] : themes_) {
        if (t.deleted) continue;
        if (t.subtheme_ids.empty()) complain("live theme " + id.str() + " has no children");
    }

    // label distinctness per level
    auto check_labels = [&](const auto& m, const char* level) {
        std::set<std::string> seen;
        for (const auto& [id, a] : m) {
            if (a.deleted) continue;
            std::string norm = normalize_label(a.label);
            if (!seen.insert(norm).second) {
                complain(std::string("duplicate ") + level + " label '" + a.label + "'");
            }
        }
    };
    check_labels(themes_, "theme");
    check_labels(subthemes_, "subtheme");

    // quote references into the corpus
    if (corpus) {
        for (const auto& [id, q] : quotes_) {
            if (!corpus->chunk(q.chunk_id)) complain("quote " + id.str() + " references missing chunk");
            const Turn* t = corpus->turn(q.turn_id);
            if (!t) {
                complain("quote " + id.str() + " references missing turn");
            } else if (q.span_end > t->text.size() || q.span_begin >= q.span_end ||
                       t->text.substr(q.span_begin, q.span_end - q.span_begin) != q.text) {
                complain("quote " + id.str() + " span does not slice its turn text");
            }
        }
    }
    return problems;
}

} // namespace themis
