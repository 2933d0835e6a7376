#pragma once

// Brute-force reference implementations. They only read edge lists from the
// graph types and share no algorithm with the library.

#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "scgid/graph.hpp"

namespace oracle {

using scgid::FtAdmg;
using scgid::Scg;
using scgid::TemporalSet;
using scgid::TemporalVertex;
using scgid::VertexSet;

template <class V, class E>
std::set<V> closure(const std::set<V>& seed, const std::vector<E>& directed, bool forward) {
    std::set<V> out = seed;
    for (bool grew = true; grew;) {
        grew = false;
        for (const auto& [a, b] : directed) {
            const V& from = forward ? a : b;
            const V& to = forward ? b : a;
            if (out.count(from) && out.insert(to).second) grew = true;
        }
    }
    return out;
}

// d-separation by enumerating every path (distinct vertices, explicit edge
// choice) and applying the blocking clauses one triple at a time.
template <class G>
bool path_dsep(const G& g, const std::set<typename G::vertex_type>& xs, const std::set<typename G::vertex_type>& ys,
               const std::set<typename G::vertex_type>& cond) {
    using V = typename G::vertex_type;
    struct Adj {
        V to;
        bool arrow_here;   // arrowhead at the current vertex
        bool arrow_there;  // arrowhead at `to`
    };
    std::map<V, std::vector<Adj>> adj;
    const auto directed = g.directed_edges();
    for (const auto& [a, b] : directed) {
        if (a == b) continue;
        adj[a].push_back({b, false, true});
        adj[b].push_back({a, true, false});
    }
    for (const auto& [a, b] : g.bidirected_edges()) {
        if (a == b) continue;
        adj[a].push_back({b, true, true});
        adj[b].push_back({a, true, true});
    }
    // v is an ancestor of cond iff its reflexive descendants meet cond.
    const std::set<V> an_cond = closure(cond, directed, false);

    std::set<V> on_path;
    std::function<bool(const V&, bool)> extend = [&](const V& v, bool arrow_in) -> bool {
        for (const auto& e : adj[v]) {
            if (on_path.count(e.to)) continue;
            // v is interior once it has a predecessor on the path.
            bool collider = arrow_in && e.arrow_here;
            if (on_path.size() > 1) {
                if (collider && !an_cond.count(v)) continue;
                if (!collider && cond.count(v)) continue;
            }
            if (ys.count(e.to)) return true;
            on_path.insert(e.to);
            bool found = extend(e.to, e.arrow_there);
            on_path.erase(e.to);
            if (found) return true;
        }
        return false;
    };
    for (const auto& x : xs) {
        on_path = {x};
        if (extend(x, false)) return false;
    }
    return true;
}

// Separation in the undirected graph over An(xs ∪ ys ∪ cond) where each
// district together with its parents forms a clique.
inline bool augmented_dsep(const FtAdmg& ft, const TemporalSet& xs, const TemporalSet& ys, const TemporalSet& cond) {
    TemporalSet seed = xs;
    seed.insert(ys.begin(), ys.end());
    seed.insert(cond.begin(), cond.end());
    const auto directed = ft.directed_edges();
    const TemporalSet an = closure(seed, directed, false);

    std::map<TemporalVertex, TemporalVertex> parent;
    for (const auto& v : an) parent[v] = v;
    std::function<TemporalVertex(const TemporalVertex&)> find = [&](const TemporalVertex& v) {
        return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    for (const auto& [a, b] : ft.bidirected_edges()) {
        if (an.count(a) && an.count(b)) parent[find(a)] = find(b);
    }
    std::map<TemporalVertex, TemporalSet> district;
    for (const auto& v : an) district[find(v)].insert(v);
    std::map<TemporalVertex, TemporalSet> nb;
    for (const auto& [root, members] : district) {
        TemporalSet clique = members;
        for (const auto& [a, b] : directed) {
            if (members.count(b) && an.count(a)) clique.insert(a);
        }
        for (const auto& a : clique) {
            for (const auto& b : clique) {
                if (!(a == b)) nb[a].insert(b);
            }
        }
    }
    TemporalSet seen;
    std::vector<TemporalVertex> stack;
    for (const auto& x : xs) {
        seen.insert(x);
        stack.push_back(x);
    }
    while (!stack.empty()) {
        TemporalVertex v = stack.back();
        stack.pop_back();
        if (ys.count(v)) return false;
        for (const auto& w : nb[v]) {
            if (cond.count(w) || seen.count(w)) continue;
            seen.insert(w);
            stack.push_back(w);
        }
    }
    return true;
}

inline bool augmented_dsep_clusters(const FtAdmg& ft, const VertexSet& x, const VertexSet& y, const VertexSet& cond) {
    return augmented_dsep(ft, ft.cluster_vertices(x), ft.cluster_vertices(y), ft.cluster_vertices(cond));
}

// Hedge existence by trying every vertex set F, every child assignment on
// F and every sub-forest F'. Only for tiny graphs.
inline bool hedge_exists(const Scg& g, const VertexSet& x, const VertexSet& y) {
    const auto& vs = g.vertices();
    const std::size_t n = vs.size();
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) idx[vs[i]] = i;
    std::vector<std::vector<char>> dir(n, std::vector<char>(n, 0)), bi(n, std::vector<char>(n, 0));
    for (const auto& [a, b] : g.directed_edges()) dir[idx[a]][idx[b]] = 1;
    for (const auto& [a, b] : g.bidirected_edges()) bi[idx[a]][idx[b]] = bi[idx[b]][idx[a]] = 1;
    unsigned xmask = 0;
    for (const auto& v : x) xmask |= 1u << idx[v];

    // R must lie in An(Y) once X's outgoing edges are cut.
    std::vector<std::pair<std::string, std::string>> cut;
    for (const auto& [a, b] : g.directed_edges()) {
        if (!x.count(a)) cut.emplace_back(a, b);
    }
    unsigned an_y = 0;
    for (const auto& v : closure(y, cut, false)) an_y |= 1u << idx[v];

    auto connected = [&](unsigned set) {
        if (set == 0) return false;
        unsigned start = set & (~set + 1), seen = start;
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t a = 0; a < n; ++a) {
                if (!((seen >> a) & 1u)) continue;
                for (std::size_t b = 0; b < n; ++b) {
                    if (a != b && ((set >> b) & 1u) && !((seen >> b) & 1u) && bi[a][b]) {
                        seen |= 1u << b;
                        grew = true;
                    }
                }
            }
        }
        return seen == set;
    };

    for (unsigned f = 1; f < (1u << n); ++f) {
        if (!(f & xmask) || !connected(f)) continue;
        std::vector<std::size_t> members;
        for (std::size_t v = 0; v < n; ++v) {
            if ((f >> v) & 1u) members.push_back(v);
        }
        // child[v] == n means v is a root.
        std::vector<std::size_t> child(n, n);
        std::function<bool(std::size_t)> assign = [&](std::size_t k) -> bool {
            if (k == members.size()) {
                for (std::size_t v : members) {  // acyclic: every chain ends at a root
                    std::size_t cur = v, steps = 0;
                    while (child[cur] != n && steps <= n) cur = child[cur], ++steps;
                    if (steps > n) return false;
                }
                unsigned roots = 0;
                for (std::size_t v : members) {
                    if (child[v] == n) roots |= 1u << v;
                }
                if ((roots & an_y) != roots || (roots & xmask)) return false;
                for (unsigned fp = f & ~xmask; fp != 0; fp = (fp - 1) & (f & ~xmask)) {
                    if ((fp & roots) != roots) continue;
                    bool closed = true;
                    for (std::size_t v : members) {
                        if (((fp >> v) & 1u) && child[v] != n && !((fp >> child[v]) & 1u)) closed = false;
                    }
                    if (closed && connected(fp)) return true;
                }
                return false;
            }
            std::size_t v = members[k];
            child[v] = n;
            if (assign(k + 1)) return true;
            for (std::size_t c : members) {
                if (c != v && dir[v][c]) {
                    child[v] = c;
                    if (assign(k + 1)) return true;
                }
            }
            child[v] = n;
            return false;
        };
        if (assign(0)) return true;
    }
    return false;
}

}  // namespace oracle
