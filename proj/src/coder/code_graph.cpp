#include "themis/coder/code_graph.hpp"

#include <algorithm>

namespace themis::coder {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

CodeGraph CodeGraph::build(const std::vector<ArtifactId>& nodes,
                           const std::vector<CodeRelation>& relations) {
    CodeGraph g;
    g.nodes_ = nodes;
    std::sort(g.nodes_.begin(), g.nodes_.end());
    const std::size_t n = g.nodes_.size();
    std::map<ArtifactId, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[g.nodes_[i]] = i;

    UnionFind uf(n);
    std::vector<std::pair<std::size_t, std::size_t>> sub_edges; // child -> parent
    for (const auto& r : relations) {
        auto ia = index.find(r.a);
        auto ib = index.find(r.b);
        if (ia == index.end() || ib == index.end()) continue;
        switch (r.kind) {
            case RelationKind::equivalent: uf.unite(ia->second, ib->second); break;
            case RelationKind::subordinate:
                sub_edges.emplace_back(ia->second, ib->second);
                g.raw_in_degree_[r.b] += 1;
                break;
            case RelationKind::reverse:
                sub_edges.emplace_back(ib->second, ia->second);
                g.raw_in_degree_[r.a] += 1;
                break;
            case RelationKind::orthogonal: break;
        }
    }

    // closure + cycle collapse until stable
    for (;;) {
        // adjacency between current classes (indexed by union-find roots)
        std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
        for (const auto& [c, p] : sub_edges) {
            std::size_t rc = uf.find(c);
            std::size_t rp = uf.find(p);
            if (rc != rp) reach[rc][rp] = true;
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!reach[i][k]) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (reach[k][j]) reach[i][j] = true;
                }
            }
        }
        bool merged = false;
        for (std::size_t i = 0; i < n && !merged; ++i) {
            for (std::size_t j = i + 1; j < n && !merged; ++j) {
                if (reach[i][j] && reach[j][i]) {
                    g.repairs_.push_back("subordination cycle: merged " + g.nodes_[i].str() +
                                         " and " + g.nodes_[j].str() +
                                         " into one equivalence class");
                    uf.unite(i, j);
                    merged = true;
                }
            }
        }
        if (!merged) {
            // classes are stable; pick lowest-id representatives and emit
            // closed edges between them
            std::map<std::size_t, ArtifactId> root_rep;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t r = uf.find(i);
                auto it = root_rep.find(r);
                if (it == root_rep.end() || g.nodes_[i] < it->second) {
                    root_rep[r] = g.nodes_[i];
                }
            }
            for (std::size_t i = 0; i < n; ++i) {
                ArtifactId rep = root_rep[uf.find(i)];
                g.rep_[g.nodes_[i]] = rep;
                g.members_[rep].push_back(g.nodes_[i]);
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (uf.find(i) != i && root_rep[uf.find(i)] != g.nodes_[i]) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    if (reach[i][j]) {
                        ArtifactId a = root_rep[uf.find(i)];
                        ArtifactId b = root_rep[uf.find(j)];
                        if (a != b) g.edges_.insert({a, b});
                    }
                }
            }
            break;
        }
    }
    return g;
}

ArtifactId CodeGraph::rep_of(const ArtifactId& id) const {
    auto it = rep_.find(id);
    return it == rep_.end() ? id : it->second;
}

const std::vector<ArtifactId>& CodeGraph::members_of(const ArtifactId& rep) const {
    static const std::vector<ArtifactId> kEmpty;
    auto it = members_.find(rep);
    return it == members_.end() ? kEmpty : it->second;
}

std::vector<ArtifactId> CodeGraph::representatives() const {
    std::vector<ArtifactId> out;
    for (const auto& [rep, members] : members_) out.push_back(rep);
    return out;
}

bool CodeGraph::has_edge(const ArtifactId& child, const ArtifactId& parent) const {
    return edges_.count({child, parent}) > 0;
}

std::vector<ArtifactId> CodeGraph::direct_parents(const ArtifactId& rep) const {
    std::vector<ArtifactId> parents;
    for (const auto& [c, p] : edges_) {
        if (c == rep) parents.push_back(p);
    }
    std::vector<ArtifactId> direct;
    for (const auto& p : parents) {
        bool has_intermediate = false;
        for (const auto& q : parents) {
            if (q != p && has_edge(q, p)) {
                has_intermediate = true;
                break;
            }
        }
        if (!has_intermediate) direct.push_back(p);
    }
    return direct;
}

int CodeGraph::raw_in_degree(const ArtifactId& id) const {
    auto it = raw_in_degree_.find(id);
    return it == raw_in_degree_.end() ? 0 : it->second;
}

bool CodeGraph::closure_is_idempotent() const {
    for (const auto& [a, b] : edges_) {
        for (const auto& [c, d] : edges_) {
            if (b == c && !edges_.count({a, d})) return false;
        }
    }
    return true;
}

} // namespace themis::coder
