#pragma once

#include "themis/core/artifacts.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace themis {

// Source-side artifact store: turns and chunks referenced by quotes. Kept
// outside the Hierarchy document but resolvable for ledger validation and
// provenance traversal.
class CorpusStore {
public:
    void put(Turn t) { turns_[t.id] = std::move(t); }
    void put(Chunk c) { chunks_[c.id] = std::move(c); }

    const Turn* turn(const ArtifactId& id) const;
    const Chunk* chunk(const ArtifactId& id) const;
    bool contains(const ArtifactId& id) const;

    const std::map<ArtifactId, Turn>& turns() const { return turns_; }
    const std::map<ArtifactId, Chunk>& chunks() const { return chunks_; }

private:
    std::map<ArtifactId, Turn> turns_;
    std::map<ArtifactId, Chunk> chunks_;
};

// The four-level artifact graph. Child links live on the parent artifacts;
// the reverse (child -> parents) table is maintained on every mutation so
// both directions stay consistent.
class Hierarchy {
public:
    // upsert replaces the whole artifact state (replay and edit application
    // both go through these).
    void upsert(const Quote& q);
    void upsert(const Code& c);
    void upsert(const Subtheme& s);
    void upsert(const Theme& t);
    void upsert_from_json(const json& artifact);

    bool contains(const ArtifactId& id) const;
    const Quote* quote(const ArtifactId& id) const;
    const Code* code(const ArtifactId& id) const;
    const Subtheme* subtheme(const ArtifactId& id) const;
    const Theme* theme(const ArtifactId& id) const;

    bool is_deleted(const ArtifactId& id) const;
    bool is_live(const ArtifactId& id) const { return contains(id) && !is_deleted(id); }

    // Live parents of a child artifact (themes of a subtheme, subthemes of a
    // code, codes of a quote).
    std::set<ArtifactId> parents_of(const ArtifactId& id) const;
    // Child ids as stored on the artifact (any kind).
    std::set<ArtifactId> children_of(const ArtifactId& id) const;

    const std::map<ArtifactId, Theme>& themes() const { return themes_; }
    const std::map<ArtifactId, Subtheme>& subthemes() const { return subthemes_; }
    const std::map<ArtifactId, Code>& codes() const { return codes_; }
    const std::map<ArtifactId, Quote>& quotes() const { return quotes_; }

    std::vector<ArtifactId> live_ids(ArtifactKind kind) const;
    bool empty() const;

    // Canonical JSON document: top-level keys themes/subthemes/codes/quotes,
    // each sorted by id. Timestamps never appear here, so two states are
    // replay-equal iff their canonical dumps match byte for byte.
    ojson canonical_json() const;
    std::string canonical_dump() const;
    static Hierarchy from_json(const json& doc);

    // Structural checks: link symmetry, no dangling ids, coverage (every live
    // code under a live subtheme, every live subtheme under a live theme),
    // label distinctness per level. Returns problem descriptions.
    std::vector<std::string> verify(const CorpusStore* corpus = nullptr) const;

private:
    std::map<ArtifactId, Theme> themes_;
    std::map<ArtifactId, Subtheme> subthemes_;
    std::map<ArtifactId, Code> codes_;
    std::map<ArtifactId, Quote> quotes_;
    std::map<ArtifactId, std::set<ArtifactId>> parents_; // child -> parent ids

    void relink(const ArtifactId& parent, const std::set<ArtifactId>& old_children,
                const std::set<ArtifactId>& new_children);
};

} // namespace themis
