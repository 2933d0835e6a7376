#include "scgid/hedge.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "scgid/errors.hpp"

namespace scgid {

namespace {

NamedEdge ordered(NamedEdge e) {
    if (e.second < e.first) std::swap(e.first, e.second);
    return e;
}

// Union-find over bidirected edges restricted to `pool`.
std::vector<std::size_t> bidirected_labels(const MixedGraph& g, const Mask& pool) {
    std::vector<std::size_t> parent(g.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [a, b] : g.bidirected()) {
        if (a == b || !pool[a] || !pool[b]) continue;
        std::size_t ra = find(a), rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    for (std::size_t v = 0; v < g.size(); ++v) parent[v] = find(v);
    return parent;
}

bool subset(const Mask& a, const Mask& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) return false;
    }
    return true;
}

// Largest vertex set inside `pool` carrying an R-rooted C-forest.
std::optional<Mask> largest_forest(const MixedGraph& g, const Mask& pool, const Mask& roots) {
    if (!subset(roots, pool)) return std::nullopt;
    std::size_t anchor = static_cast<std::size_t>(std::find(roots.begin(), roots.end(), 1) - roots.begin());
    Mask current = pool;
    for (;;) {
        Mask reach(g.size(), 0);
        std::deque<std::size_t> queue;
        for (std::size_t v = 0; v < g.size(); ++v) {
            if (roots[v]) {
                reach[v] = 1;
                queue.push_back(v);
            }
        }
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t p : g.parents(v)) {
                if (current[p] && !reach[p]) {
                    reach[p] = 1;
                    queue.push_back(p);
                }
            }
        }
        auto label = bidirected_labels(g, reach);
        Mask next(g.size(), 0);
        for (std::size_t v = 0; v < g.size(); ++v) next[v] = reach[v] && label[v] == label[anchor];
        if (!subset(roots, next)) return std::nullopt;
        if (next == current) return current;
        current = std::move(next);
    }
}

// Gives every vertex of `members` outside `targets` one child that moves it
// strictly closer to `targets`.
std::vector<IndexEdge> forest_edges(const MixedGraph& g, const Mask& members, const Mask& targets) {
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> dist(g.size(), unset);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (targets[v]) {
            dist[v] = 0;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t p : g.parents(v)) {
            if (members[p] && dist[p] == unset) {
                dist[p] = dist[v] + 1;
                queue.push_back(p);
            }
        }
    }
    std::vector<IndexEdge> edges;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (!members[v] || targets[v]) continue;
        for (std::size_t c : g.children(v)) {
            if (members[c] && dist[c] != unset && dist[c] + 1 == dist[v]) {
                edges.emplace_back(v, c);
                break;
            }
        }
    }
    return edges;
}

CForest make_forest(const Scg& g, const Mask& members, const std::vector<IndexEdge>& directed, const Mask& roots) {
    CForest f;
    f.vertices = g.members(members);
    f.roots = g.members(roots);
    for (auto [a, b] : directed) f.directed.emplace(g.vertex(a), g.vertex(b));
    for (auto [a, b] : g.core().bidirected()) {
        if (a != b && members[a] && members[b]) f.bidirected.emplace(g.vertex(a), g.vertex(b));
    }
    return f;
}

void check_effect_sets(const Scg& g, const VertexSet& x, const VertexSet& y) {
    if (x.empty() || y.empty()) throw ArgumentError("treatment and outcome sets must be non-empty");
    for (const auto& v : x) {
        g.index_of(v);
        if (y.count(v)) throw ArgumentError("treatment and outcome sets must be disjoint");
    }
    for (const auto& v : y) g.index_of(v);
}

}  // namespace

VertexSet forest_roots(const CForest& f) {
    VertexSet roots = f.vertices;
    for (const auto& [tail, head] : f.directed) roots.erase(tail);
    return roots;
}

std::vector<VertexSet> c_components(const Scg& g) {
    auto label = bidirected_labels(g.core(), Mask(g.size(), 1));
    std::vector<VertexSet> out;
    std::vector<std::size_t> slot(g.size(), static_cast<std::size_t>(-1));
    for (std::size_t v = 0; v < g.size(); ++v) {
        std::size_t root = label[v];
        if (slot[root] == static_cast<std::size_t>(-1)) {
            slot[root] = out.size();
            out.emplace_back();
        }
        out[slot[root]].insert(g.vertex(v));
    }
    return out;
}

Scg sc_projection(const Scg& g) {
    std::vector<IndexEdge> bidirected = g.core().bidirected();
    for (const auto& component : strongly_connected_components(g)) {
        std::vector<std::size_t> idx;
        for (const auto& v : component) idx.push_back(g.index_of(v));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t j = i + 1; j < idx.size(); ++j) {
                if (!g.core().has_bidirected(idx[i], idx[j])) bidirected.emplace_back(idx[i], idx[j]);
            }
        }
    }
    return g.with_core(MixedGraph(g.size(), g.core().directed(), std::move(bidirected)));
}

bool is_c_forest(const Scg& g, const CForest& candidate) {
    for (const auto& v : candidate.vertices) {
        if (!g.contains(v)) throw StructuralError("forest vertex '" + v + "' is not in the graph");
    }
    for (const auto& [a, b] : candidate.directed) {
        if (!g.contains(a) || !g.contains(b) || !g.has_directed(a, b)) {
            throw StructuralError("forest edge " + a + " -> " + b + " is not in the graph");
        }
    }
    for (const auto& [a, b] : candidate.bidirected) {
        if (!g.contains(a) || !g.contains(b) || !g.has_bidirected(a, b)) {
            throw StructuralError("forest edge " + a + " <-> " + b + " is not in the graph");
        }
    }
    if (candidate.vertices.empty()) return false;

    std::map<std::string, std::string> child;
    for (const auto& [a, b] : candidate.directed) {
        if (a == b || !candidate.vertices.count(a) || !candidate.vertices.count(b)) return false;
        if (!child.emplace(a, b).second) return false;
    }
    // With at most one child per vertex, following children from any vertex
    // must end within |V| steps.
    for (const auto& v : candidate.vertices) {
        std::string cur = v;
        for (std::size_t steps = 0;; ++steps) {
            auto it = child.find(cur);
            if (it == child.end()) break;
            if (steps > candidate.vertices.size()) return false;
            cur = it->second;
        }
    }

    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& e : candidate.bidirected) {
        auto [a, b] = ordered(e);
        if (a == b || !candidate.vertices.count(a) || !candidate.vertices.count(b)) return false;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    VertexSet reached{*candidate.vertices.begin()};
    std::deque<std::string> queue{*candidate.vertices.begin()};
    while (!queue.empty()) {
        std::string v = queue.front();
        queue.pop_front();
        for (const auto& w : adj[v]) {
            if (reached.insert(w).second) queue.push_back(w);
        }
    }
    if (reached != candidate.vertices) return false;
    return candidate.roots == forest_roots(candidate);
}

bool is_hedge(const Scg& g, const Hedge& h, const VertexSet& x, const VertexSet& y) {
    if (!is_c_forest(g, h.f) || !is_c_forest(g, h.f_prime)) return false;
    if (h.f.roots != h.roots || h.f_prime.roots != h.roots) return false;
    auto contained = [](const auto& small, const auto& big) {
        return std::includes(big.begin(), big.end(), small.begin(), small.end());
    };
    if (!contained(h.f_prime.vertices, h.f.vertices)) return false;
    std::set<NamedEdge> fb, fpb;
    for (const auto& e : h.f.bidirected) fb.insert(ordered(e));
    for (const auto& e : h.f_prime.bidirected) fpb.insert(ordered(e));
    if (!contained(h.f_prime.directed, h.f.directed) || !contained(fpb, fb)) return false;
    bool meets_x = std::any_of(x.begin(), x.end(), [&](const std::string& v) { return h.f.vertices.count(v) > 0; });
    bool prime_meets_x =
        std::any_of(x.begin(), x.end(), [&](const std::string& v) { return h.f_prime.vertices.count(v) > 0; });
    if (!meets_x || prime_meets_x) return false;
    VertexSet an_y = ancestors(mutilate(g, ScgMutilation{{}, x}), y);
    return contained(h.roots, an_y);
}

std::optional<Hedge> find_hedge(const Scg& g, const VertexSet& x, const VertexSet& y,
                                const HedgeSearchLimits& limits) {
    check_effect_sets(g, x, y);
    if (g.size() > limits.max_vertices) {
        throw ResourceError("hedge search is limited to " + std::to_string(limits.max_vertices) + " vertices, graph has " +
                            std::to_string(g.size()));
    }
    const MixedGraph& core = g.core();
    const Mask in_x = g.mask(x);
    Mask outside_x(g.size(), 1);
    for (std::size_t v = 0; v < g.size(); ++v) outside_x[v] = !in_x[v];
    const Mask all(g.size(), 1);
    const Mask an_y = core.mutilated(Mask(g.size(), 0), in_x).ancestors(g.mask(y));

    std::vector<std::size_t> candidates;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (an_y[v] && outside_x[v]) candidates.push_back(v);
    }
    const auto label = bidirected_labels(core, outside_x);

    const std::size_t m = candidates.size();
    for (std::size_t k = 1; k <= m; ++k) {
        // Lexicographic k-combinations of candidate positions.
        std::vector<std::size_t> pick(k);
        std::iota(pick.begin(), pick.end(), std::size_t{0});
        for (;;) {
            Mask roots(g.size(), 0);
            bool same_component = true;
            for (std::size_t i : pick) {
                roots[candidates[i]] = 1;
                same_component = same_component && label[candidates[i]] == label[candidates[pick[0]]];
            }
            if (same_component) {
                auto f_prime = largest_forest(core, outside_x, roots);
                auto f = f_prime ? largest_forest(core, all, roots) : std::nullopt;
                if (f_prime && f) {
                    bool meets_x = false;
                    for (std::size_t v = 0; v < g.size(); ++v) meets_x = meets_x || ((*f)[v] && in_x[v]);
                    if (meets_x) {
                        auto inner = forest_edges(core, *f_prime, roots);
                        auto outer = forest_edges(core, *f, *f_prime);
                        outer.insert(outer.end(), inner.begin(), inner.end());
                        Hedge h;
                        h.f_prime = make_forest(g, *f_prime, inner, roots);
                        h.f = make_forest(g, *f, outer, roots);
                        h.roots = g.members(roots);
                        return h;
                    }
                }
            }
            // Advance to the next combination.
            std::size_t i = k;
            while (i > 0 && pick[i - 1] == m - k + (i - 1)) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
    }
    return std::nullopt;
}

std::optional<Hedge> find_sc_hedge(const Scg& g, const VertexSet& x, const VertexSet& y,
                                   const HedgeSearchLimits& limits) {
    check_effect_sets(g, x, y);
    return find_hedge(sc_projection(g), x, y, limits);
}

}  // namespace scgid
