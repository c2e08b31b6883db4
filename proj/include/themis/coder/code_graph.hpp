#pragma once

#include "themis/coder/coder.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace themis::coder {

// Directed code hierarchy: union-find equivalence classes plus subordinate
// edges between class representatives, closed under transitivity. Cycles
// among subordinate edges are repaired by collapsing the cycle into one
// equivalence class (logged).
class CodeGraph {
public:
    static CodeGraph build(const std::vector<ArtifactId>& nodes,
                           const std::vector<CodeRelation>& relations);

    const std::vector<ArtifactId>& nodes() const { return nodes_; }
    ArtifactId rep_of(const ArtifactId& id) const;
    const std::vector<ArtifactId>& members_of(const ArtifactId& rep) const;
    std::vector<ArtifactId> representatives() const;

    // child_rep -> parent_rep, transitively closed
    const std::set<std::pair<ArtifactId, ArtifactId>>& edges() const { return edges_; }
    bool has_edge(const ArtifactId& child, const ArtifactId& parent) const;

    // parents with no intermediate ancestor (transitive reduction view)
    std::vector<ArtifactId> direct_parents(const ArtifactId& rep) const;

    // Count of raw subordinate relations pointing at this code (x -> id),
    // used by the consolidation merge score.
    int raw_in_degree(const ArtifactId& id) const;

    const std::vector<std::string>& repairs() const { return repairs_; }

    bool closure_is_idempotent() const;

private:
    std::vector<ArtifactId> nodes_;
    std::map<ArtifactId, ArtifactId> rep_;
    std::map<ArtifactId, std::vector<ArtifactId>> members_;
    std::set<std::pair<ArtifactId, ArtifactId>> edges_;
    std::map<ArtifactId, int> raw_in_degree_;
    std::vector<std::string> repairs_;
};

} // namespace themis::coder
