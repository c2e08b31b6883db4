#include "themis/coder/consolidate.hpp"

#include <algorithm>
#include <map>

namespace themis::coder {

ConsolidationResult consolidate(const std::vector<Code>& codes, const CodeGraph& graph,
                                const ConsolidateConfig& config) {
    ConsolidationResult result;
    std::map<ArtifactId, Code> live;
    for (const auto& c : codes) live[c.id] = c;

    auto merge_score = [&](const Code& c) {
        return config.w_freq * static_cast<double>(c.frequency) +
               config.w_indeg * static_cast<double>(graph.raw_in_degree(c.id));
    };

    // step 1: per-class merges
    std::map<ArtifactId, ArtifactId> absorbed_into;
    for (const auto& rep : graph.representatives()) {
        const auto& members = graph.members_of(rep);
        if (members.size() < 2) continue;
        ArtifactId winner = members.front();
        for (const auto& id : members) {
            auto wit = live.find(winner);
            auto cit = live.find(id);
            if (cit == live.end()) continue;
            if (wit == live.end() || merge_score(cit->second) > merge_score(wit->second) ||
                (merge_score(cit->second) == merge_score(wit->second) && id < winner)) {
                winner = id;
            }
        }
        auto wit = live.find(winner);
        if (wit == live.end()) continue;
        ConsolidationEvent event;
        event.kind = CleanupKind::class_merge;
        event.action = ActionType::merge;
        event.survivor = winner;
        for (const auto& id : members) {
            if (id == winner) continue;
            auto cit = live.find(id);
            if (cit == live.end()) continue;
            for (const auto& ch : cit->second.source_chunk_ids) {
                wit->second.source_chunk_ids.insert(ch);
            }
            for (const auto& q : cit->second.quote_ids) wit->second.quote_ids.insert(q);
            Code dead = cit->second;
            dead.deleted = true;
            result.tombstoned.push_back(dead);
            live.erase(cit);
            absorbed_into[id] = winner;
            event.removed.push_back(id);
        }
        if (event.removed.empty()) continue;
        wit->second.frequency = wit->second.source_chunk_ids.size();
        event.note = "equivalence class merged into " + winner.str();
        result.events.push_back(std::move(event));
    }

    auto resolve = [&](ArtifactId id) {
        while (true) {
            auto it = absorbed_into.find(id);
            if (it == absorbed_into.end()) return id;
            id = it->second;
        }
    };

    // closed edges remapped onto surviving winners
    std::set<std::pair<ArtifactId, ArtifactId>> edges;
    for (const auto& [c, p] : graph.edges()) {
        ArtifactId cc = resolve(c);
        ArtifactId pp = resolve(p);
        if (cc != pp) edges.insert({cc, pp});
    }

    auto direct_parents = [&](const ArtifactId& id) {
        std::vector<ArtifactId> parents;
        for (const auto& [c, p] : edges) {
            if (c == id && live.count(p)) parents.push_back(p);
        }
        std::vector<ArtifactId> direct;
        for (const auto& p : parents) {
            bool intermediate = false;
            for (const auto& q : parents) {
                if (q != p && edges.count({q, p})) {
                    intermediate = true;
                    break;
                }
            }
            if (!intermediate) direct.push_back(p);
        }
        std::sort(direct.begin(), direct.end());
        return direct;
    };

    // step 2: subsume low-frequency codes that have a parent
    std::vector<ArtifactId> order;
    for (const auto& [id, c] : live) order.push_back(id);
    for (const auto& id : order) {
        auto cit = live.find(id);
        if (cit == live.end()) continue;
        if (cit->second.frequency >= config.low_freq) continue;
        auto parents = direct_parents(id);
        if (parents.empty()) continue;
        ArtifactId target = resolve(parents.front());
        auto pit = live.find(target);
        if (pit == live.end() || target == id) continue;
        for (const auto& q : cit->second.quote_ids) pit->second.quote_ids.insert(q);
        Code dead = cit->second;
        dead.deleted = true;
        result.tombstoned.push_back(dead);
        live.erase(cit);
        absorbed_into[id] = target;
        ConsolidationEvent event;
        event.kind = CleanupKind::subsume;
        event.action = ActionType::merge;
        event.survivor = target;
        event.removed.push_back(id);
        event.note = "low-frequency code subsumed into parent " + target.str();
        result.events.push_back(std::move(event));
    }

    // step 3: drop remaining low-frequency orphans
    order.clear();
    for (const auto& [id, c] : live) order.push_back(id);
    for (const auto& id : order) {
        auto cit = live.find(id);
        if (cit->second.frequency >= config.low_freq) continue;
        bool has_parent = false;
        for (const auto& [c, p] : edges) {
            if (c == id && live.count(p)) {
                has_parent = true;
                break;
            }
        }
        if (has_parent) continue;
        ConsolidationEvent event;
        event.kind = CleanupKind::drop;
        event.action = ActionType::del;
        event.removed.push_back(id);
        event.note = "low-frequency orphan code dropped";
        for (const auto& q : cit->second.quote_ids) result.orphan_quote_ids.push_back(q);
        Code dead = cit->second;
        dead.deleted = true;
        result.tombstoned.push_back(dead);
        live.erase(cit);
        result.events.push_back(std::move(event));
    }

    for (const auto& [c, p] : edges) {
        if (live.count(c) && live.count(p)) result.edges.insert({c, p});
    }
    for (auto& [id, c] : live) result.codes.push_back(std::move(c));
    return result;
}

} // namespace themis::coder
