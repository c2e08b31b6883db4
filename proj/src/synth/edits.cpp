#include "themis/synth/synthesizer.hpp"

#include "themis/errors.hpp"
#include "themis/util/text.hpp"

#include <algorithm>

namespace themis::synth {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
    raise(Errc::invalid_edit, msg);
}

ArtifactKind child_kind(ArtifactKind parent) {
    switch (parent) {
        case ArtifactKind::theme: return ArtifactKind::subtheme;
        case ArtifactKind::subtheme: return ArtifactKind::code;
        case ArtifactKind::code: return ArtifactKind::quote;
        default: invalid("artifact kind has no children");
    }
}

void check_label_limits(ArtifactKind kind, const std::string& label,
                        const std::string& description) {
    if (label.empty()) invalid("empty label");
    if (kind == ArtifactKind::theme) {
        std::size_t lw = word_count(label);
        std::size_t dw = word_count(description);
        if (lw < 5 || lw > 10) invalid("theme label must have 5-10 words, got " + std::to_string(lw));
        if (dw < 60 || dw > 80) {
            invalid("theme description must have 60-80 words, got " + std::to_string(dw));
        }
    } else if (kind == ArtifactKind::code) {
        std::size_t lw = word_count(label);
        std::size_t dw = word_count(description);
        if (lw < 5 || lw > 12) invalid("code label must have 5-12 words, got " + std::to_string(lw));
        if (dw < 40 || dw > 80) {
            invalid("code description must have 40-80 words, got " + std::to_string(dw));
        }
    }
}

// label uniqueness within a level, ignoring `excluded` (artifacts about to be
// tombstoned by this edit)
void check_label_free(const Hierarchy& h, ArtifactKind kind, const std::string& label,
                      const std::set<ArtifactId>& excluded) {
    std::string norm = normalize_label(label);
    auto scan = [&](const auto& m) {
        for (const auto& [id, a] : m) {
            if (a.deleted || excluded.count(id)) continue;
            if (normalize_label(a.label) == norm) {
                invalid("label '" + label + "' already used by " + id.str());
            }
        }
    };
    switch (kind) {
        case ArtifactKind::theme: scan(h.themes()); break;
        case ArtifactKind::subtheme: scan(h.subthemes()); break;
        case ArtifactKind::code: scan(h.codes()); break;
        default: break;
    }
}

// Staged mutation: every changed artifact goes into the payload, tombstones
// included, and one record() commits the lot.
struct Staged {
    EntryDraft draft;

    void put(const Quote& q) { add(q.id, to_json(q)); }
    void put(const Code& c) { add(c.id, to_json(c)); }
    void put(const Subtheme& s) { add(s.id, to_json(s)); }
    void put(const Theme& t) { add(t.id, to_json(t)); }

private:
    void add(const ArtifactId& id, ojson j) {
        std::string key = id.str();
        if (!draft.payload.contains(key)) draft.outputs.push_back(id);
        draft.payload[key] = std::move(j);
    }
};

std::string generic_label(const Hierarchy& h, const ArtifactId& id) {
    switch (id.kind) {
        case ArtifactKind::theme: return h.theme(id)->label;
        case ArtifactKind::subtheme: return h.subtheme(id)->label;
        case ArtifactKind::code: return h.code(id)->label;
        case ArtifactKind::quote: return h.quote(id)->text;
        default: return {};
    }
}

std::string generic_description(const Hierarchy& h, const ArtifactId& id) {
    switch (id.kind) {
        case ArtifactKind::theme: return h.theme(id)->description;
        case ArtifactKind::subtheme: return h.subtheme(id)->description;
        case ArtifactKind::code: return h.code(id)->description;
        default: return {};
    }
}

// Parent updates: stage each parent with `remove` dropped and `add` inserted.
void restage_parents(const Hierarchy& h, Staged& staged, const std::set<ArtifactId>& parents,
                     const std::set<ArtifactId>& remove, const std::set<ArtifactId>& add) {
    for (const auto& pid : parents) {
        switch (pid.kind) {
            case ArtifactKind::theme: {
                Theme t = *h.theme(pid);
                for (const auto& r : remove) t.subtheme_ids.erase(r);
                for (const auto& a : add) t.subtheme_ids.insert(a);
                if (t.subtheme_ids.empty()) invalid("edit would leave theme " + pid.str() + " childless");
                staged.put(t);
                break;
            }
            case ArtifactKind::subtheme: {
                Subtheme s = *h.subtheme(pid);
                for (const auto& r : remove) s.code_ids.erase(r);
                for (const auto& a : add) s.code_ids.insert(a);
                if (s.code_ids.empty()) invalid("edit would leave subtheme " + pid.str() + " childless");
                staged.put(s);
                break;
            }
            case ArtifactKind::code: {
                Code c = *h.code(pid);
                for (const auto& r : remove) c.quote_ids.erase(r);
                for (const auto& a : add) c.quote_ids.insert(a);
                if (c.quote_ids.empty()) invalid("edit would leave code " + pid.str() + " quoteless");
                staged.put(c);
                break;
            }
            default: break;
        }
    }
}

void stage_tombstone(const Hierarchy& h, Staged& staged, const ArtifactId& id) {
    switch (id.kind) {
        case ArtifactKind::theme: {
            Theme t = *h.theme(id);
            t.deleted = true;
            t.subtheme_ids.clear();
            staged.put(t);
            break;
        }
        case ArtifactKind::subtheme: {
            Subtheme s = *h.subtheme(id);
            s.deleted = true;
            s.code_ids.clear();
            staged.put(s);
            break;
        }
        case ArtifactKind::code: {
            Code c = *h.code(id);
            c.deleted = true;
            staged.put(c);
            break;
        }
        case ArtifactKind::quote: {
            Quote q = *h.quote(id);
            q.deleted = true;
            staged.put(q);
            break;
        }
        default: break;
    }
}

// Fresh container artifact built from parts/payload fields.
ArtifactId stage_new(RunState& state, Staged& staged, ArtifactKind kind, const std::string& label,
                     const std::string& description, const std::set<ArtifactId>& children,
                     const Code* merge_source = nullptr) {
    ArtifactId id = state.ids.fresh(kind);
    switch (kind) {
        case ArtifactKind::theme: {
            Theme t;
            t.id = id;
            t.label = label;
            t.description = description;
            t.subtheme_ids = children;
            staged.put(t);
            break;
        }
        case ArtifactKind::subtheme: {
            Subtheme s;
            s.id = id;
            s.label = label;
            s.description = description;
            s.code_ids = children;
            staged.put(s);
            break;
        }
        case ArtifactKind::code: {
            Code c;
            c.id = id;
            c.label = label;
            c.description = description;
            c.quote_ids = children;
            if (merge_source) {
                c.source_chunk_ids = merge_source->source_chunk_ids;
                c.frequency = merge_source->frequency;
            } else {
                c.frequency = 1;
            }
            staged.put(c);
            break;
        }
        default: invalid("cannot generate artifacts of this kind");
    }
    return id;
}

// Existing live fallback container with this label, if any.
std::optional<ArtifactId> find_live_label(const Hierarchy& h, ArtifactKind kind,
                                          const std::string& label) {
    std::string norm = normalize_label(label);
    auto scan = [&](const auto& m) -> std::optional<ArtifactId> {
        for (const auto& [id, a] : m) {
            if (!a.deleted && normalize_label(a.label) == norm) return id;
        }
        return std::nullopt;
    };
    switch (kind) {
        case ArtifactKind::theme: return scan(h.themes());
        case ArtifactKind::subtheme: return scan(h.subthemes());
        default: return std::nullopt;
    }
}

} // namespace

std::uint64_t apply_edit(RunState& state, const EditProposal& proposal,
                         const std::string& agent_role) {
    Hierarchy& h = state.hierarchy;
    for (const auto& t : proposal.targets) {
        if (!h.is_live(t)) invalid("target " + t.str() + " missing or tombstoned");
    }

    Staged staged;
    staged.draft.agent_role = agent_role;
    staged.draft.action_type = proposal.action;
    staged.draft.inputs = proposal.targets;
    staged.draft.justification = proposal.justification;

    switch (proposal.action) {
        case ActionType::merge: {
            if (proposal.targets.size() < 2) invalid("merge needs at least 2 targets");
            ArtifactKind kind = proposal.targets.front().kind;
            for (const auto& t : proposal.targets) {
                if (t.kind != kind) invalid("merge targets must share a kind");
            }
            std::set<ArtifactId> excluded(proposal.targets.begin(), proposal.targets.end());
            std::string label = proposal.label.value_or(generic_label(h, proposal.targets[0]));
            std::string description =
                proposal.description.value_or(generic_description(h, proposal.targets[0]));
            check_label_limits(kind, label, description);
            check_label_free(h, kind, label, excluded);

            std::set<ArtifactId> children;
            std::set<ArtifactId> parents;
            Code merged_code_fields; // accumulators for code merges
            for (const auto& t : proposal.targets) {
                for (const auto& c : h.children_of(t)) children.insert(c);
                for (const auto& p : h.parents_of(t)) parents.insert(p);
                if (kind == ArtifactKind::code) {
                    const Code* c = h.code(t);
                    for (const auto& s : c->source_chunk_ids) {
                        merged_code_fields.source_chunk_ids.insert(s);
                    }
                }
            }
            if (children.empty()) invalid("merge would create an artifact without children");
            merged_code_fields.frequency = merged_code_fields.source_chunk_ids.size();
            ArtifactId fresh = stage_new(state, staged, kind, label, description, children,
                                         kind == ArtifactKind::code ? &merged_code_fields
                                                                    : nullptr);
            for (const auto& t : proposal.targets) stage_tombstone(h, staged, t);
            restage_parents(h, staged, parents, excluded, {fresh});
            break;
        }
        case ActionType::split: {
            if (proposal.targets.size() != 1) invalid("split takes exactly one target");
            if (proposal.parts.size() < 2) invalid("split needs at least 2 parts");
            const ArtifactId target = proposal.targets[0];
            std::set<ArtifactId> live_children;
            for (const auto& c : h.children_of(target)) {
                if (h.is_live(c)) live_children.insert(c);
            }
            if (live_children.size() < 2) invalid("cannot partition fewer than 2 children");
            std::set<ArtifactId> seen;
            for (const auto& part : proposal.parts) {
                if (part.children.empty()) invalid("split part has no children");
                for (const auto& c : part.children) {
                    if (!live_children.count(c)) {
                        invalid("split part references " + c.str() + " not under the target");
                    }
                    if (!seen.insert(c).second) invalid("split parts overlap on " + c.str());
                }
            }
            if (seen.size() != live_children.size()) {
                invalid("split parts must cover every child of the target");
            }
            std::set<ArtifactId> excluded{target};
            for (const auto& part : proposal.parts) {
                check_label_limits(target.kind, part.label, part.description);
                check_label_free(h, target.kind, part.label, excluded);
            }
            auto parents = h.parents_of(target);
            std::set<ArtifactId> fresh_ids;
            for (const auto& part : proposal.parts) {
                std::set<ArtifactId> kids(part.children.begin(), part.children.end());
                fresh_ids.insert(
                    stage_new(state, staged, target.kind, part.label, part.description, kids));
            }
            stage_tombstone(h, staged, target);
            restage_parents(h, staged, parents, excluded, fresh_ids);
            break;
        }
        case ActionType::revise: {
            if (proposal.targets.size() != 1) invalid("revise takes exactly one target");
            if (!proposal.label && !proposal.description) {
                invalid("revise needs a label or a description");
            }
            const ArtifactId target = proposal.targets[0];
            std::string label = proposal.label.value_or(generic_label(h, target));
            std::string description =
                proposal.description.value_or(generic_description(h, target));
            check_label_limits(target.kind, label, description);
            check_label_free(h, target.kind, label, {target});
            switch (target.kind) {
                case ArtifactKind::theme: {
                    Theme t = *h.theme(target);
                    t.label = label;
                    t.description = description;
                    staged.put(t);
                    break;
                }
                case ArtifactKind::subtheme: {
                    Subtheme s = *h.subtheme(target);
                    s.label = label;
                    s.description = description;
                    staged.put(s);
                    break;
                }
                case ArtifactKind::code: {
                    Code c = *h.code(target);
                    c.label = label;
                    c.description = description;
                    staged.put(c);
                    break;
                }
                default: invalid("cannot revise this artifact kind");
            }
            break;
        }
        case ActionType::move: {
            if (proposal.targets.size() != 1) invalid("move takes exactly one target");
            if (!proposal.move_from || !proposal.move_to) invalid("move needs move_from and move_to");
            const ArtifactId target = proposal.targets[0];
            const ArtifactId from = *proposal.move_from;
            const ArtifactId to = *proposal.move_to;
            if (from == to) invalid("move_from equals move_to");
            if (!h.is_live(from) || !h.is_live(to)) invalid("move endpoints must be live");
            if (child_kind(from.kind) != target.kind || child_kind(to.kind) != target.kind) {
                invalid("move endpoints cannot hold this child kind");
            }
            if (!h.children_of(from).count(target)) {
                invalid(from.str() + " does not contain " + target.str());
            }
            if (h.children_of(from).size() <= 1) {
                invalid("moving the last child would leave " + from.str() + " childless");
            }
            restage_parents(h, staged, {from}, {target}, {});
            restage_parents(h, staged, {to}, {}, {target});
            staged.draft.inputs.push_back(from);
            staged.draft.inputs.push_back(to);
            break;
        }
        case ActionType::del: {
            if (proposal.targets.size() != 1) invalid("delete takes exactly one target");
            const ArtifactId target = proposal.targets[0];
            std::set<ArtifactId> live_children;
            for (const auto& c : h.children_of(target)) {
                if (h.is_live(c)) live_children.insert(c);
            }
            // parents must survive the removal
            for (const auto& p : h.parents_of(target)) {
                std::size_t live_count = 0;
                for (const auto& c : h.children_of(p)) {
                    if (h.is_live(c)) ++live_count;
                }
                if (live_count <= 1) {
                    invalid("deleting " + target.str() + " would leave " + p.str() + " childless");
                }
            }
            std::optional<ArtifactId> home;
            if (!live_children.empty()) {
                if (target.kind == ArtifactKind::code) {
                    // quotes are evidence of this code alone; they tombstone
                    // with it unless explicitly re-homed
                    if (proposal.assign_to) {
                        if (!h.is_live(*proposal.assign_to) ||
                            proposal.assign_to->kind != ArtifactKind::code) {
                            invalid("assign_to must be a live code");
                        }
                        home = proposal.assign_to;
                    }
                } else {
                    if (proposal.assign_to) {
                        if (!h.is_live(*proposal.assign_to) ||
                            proposal.assign_to->kind != target.kind) {
                            invalid("assign_to must be a live artifact of the target's kind");
                        }
                        home = proposal.assign_to;
                    } else {
                        // lazy fallback container, created by a system entry so
                        // this edit still maps to exactly one reviewer entry
                        std::string flabel = target.kind == ArtifactKind::subtheme
                                                 ? "Unassigned (review)"
                                                 : "Unassigned themes pending further review";
                        home = find_live_label(h, target.kind, flabel);
                        if (!home) {
                            Staged sys;
                            sys.draft.agent_role = "system";
                            sys.draft.action_type = ActionType::generate;
                            sys.draft.justification = "fallback container for re-homed children";
                            std::string fdesc =
                                target.kind == ArtifactKind::theme
                                    ? fit_word_count("Holding area for subthemes awaiting manual "
                                                     "regrouping after a delete edit.",
                                                     60, 80)
                                    : "Holding area for children re-homed by delete edits.";
                            ArtifactId fid = stage_new(state, sys, target.kind, flabel, fdesc,
                                                       live_children);
                            state.record(std::move(sys.draft));
                            home = fid;
                        }
                    }
                }
            }
            if (home && *home == target) invalid("cannot re-home children into the deleted artifact");
            if (!live_children.empty() && home && h.is_live(*home)) {
                restage_parents(h, staged, {*home}, {}, live_children);
            }
            if (target.kind == ArtifactKind::code && !home) {
                for (const auto& q : live_children) stage_tombstone(h, staged, q);
            }
            stage_tombstone(h, staged, target);
            restage_parents(h, staged, h.parents_of(target), {target}, {});
            break;
        }
        case ActionType::generate: {
            if (!proposal.targets.empty()) invalid("generate takes no targets");
            if (!proposal.label || !proposal.description) {
                invalid("generate needs a label and a description");
            }
            if (proposal.kind != ArtifactKind::code && proposal.kind != ArtifactKind::subtheme &&
                proposal.kind != ArtifactKind::theme) {
                invalid("generate supports codes, subthemes and themes");
            }
            std::set<ArtifactId> children;
            ArtifactKind ck = child_kind(proposal.kind);
            for (const auto& c : proposal.children) {
                if (c.kind != ck || !h.is_live(c)) {
                    invalid("generate child " + c.str() + " missing or of the wrong kind");
                }
                children.insert(c);
            }
            if (children.empty()) invalid("generate needs at least one child");
            check_label_limits(proposal.kind, *proposal.label, *proposal.description);
            check_label_free(h, proposal.kind, *proposal.label, {});
            ArtifactId fresh = stage_new(state, staged, proposal.kind, *proposal.label,
                                         *proposal.description, children);
            if (proposal.kind != ArtifactKind::theme) {
                if (!proposal.assign_to) {
                    invalid("generated codes/subthemes need assign_to naming their parent");
                }
                ArtifactKind want_parent = proposal.kind == ArtifactKind::code
                                               ? ArtifactKind::subtheme
                                               : ArtifactKind::theme;
                if (!h.is_live(*proposal.assign_to) || proposal.assign_to->kind != want_parent) {
                    invalid("assign_to must be a live parent of the right kind");
                }
                restage_parents(h, staged, {*proposal.assign_to}, {}, {fresh});
                staged.draft.inputs.push_back(*proposal.assign_to);
            }
            for (const auto& c : children) staged.draft.inputs.push_back(c);
            break;
        }
    }

    return state.record(std::move(staged.draft));
}

} // namespace themis::synth
