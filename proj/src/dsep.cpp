#include "scgid/dsep.hpp"

#include <algorithm>
#include <deque>

namespace scgid {

const char* link_symbol(Link l) {
    switch (l) {
        case Link::forward: return "->";
        case Link::backward: return "<-";
        case Link::bidirected: return "<->";
    }
    return "?";
}

namespace {

template <class V, class F>
std::string render(const BasicWalk<V>& w, F&& name) {
    std::string out;
    for (std::size_t i = 0; i < w.vertices.size(); ++i) {
        if (i > 0) {
            out += ' ';
            out += link_symbol(w.links[i - 1]);
            out += ' ';
        }
        out += name(w.vertices[i]);
    }
    return out;
}

bool arrow_into_next(Link l) { return l != Link::backward; }  // a -> b, a <-> b
bool arrow_into_prev(Link l) { return l != Link::forward; }   // a <- b, a <-> b

}  // namespace

std::string to_string(const Walk& w) {
    return render(w, [](const std::string& s) { return s; });
}

std::string to_string(const TemporalWalk& w) {
    return render(w, [](const TemporalVertex& v) { return to_string(v); });
}

namespace detail {

bool walk_valid(const MixedGraph& g, const IndexWalk& w) {
    if (w.vertices.empty() || w.links.size() + 1 != w.vertices.size()) return false;
    for (std::size_t v : w.vertices) {
        if (v >= g.size()) return false;
    }
    for (std::size_t i = 0; i < w.links.size(); ++i) {
        std::size_t a = w.vertices[i], b = w.vertices[i + 1];
        bool ok = false;
        switch (w.links[i]) {
            case Link::forward: ok = g.has_directed(a, b); break;
            case Link::backward: ok = g.has_directed(b, a); break;
            case Link::bidirected: ok = g.has_bidirected(a, b); break;
        }
        if (!ok) return false;
    }
    return true;
}

bool walk_blocked(const MixedGraph& g, const IndexWalk& w, const Mask& cond) {
    if (w.vertices.size() < 3) return false;
    const Mask an_cond = g.ancestors(cond);
    for (std::size_t i = 1; i + 1 < w.vertices.size(); ++i) {
        std::size_t v = w.vertices[i];
        bool collider = arrow_into_next(w.links[i - 1]) && arrow_into_prev(w.links[i]);
        if (collider ? !an_cond[v] : static_cast<bool>(cond[v])) return true;
    }
    return false;
}

void check_query_sets(const Mask& xs, const Mask& ys, const Mask& cond) {
    bool any_x = false, any_y = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        any_x = any_x || xs[i];
        any_y = any_y || ys[i];
        if ((xs[i] && ys[i]) || (xs[i] && cond[i]) || (ys[i] && cond[i])) {
            throw ArgumentError("query sets must be pairwise disjoint");
        }
    }
    if (!any_x || !any_y) throw ArgumentError("query endpoint sets must be non-empty");
}

std::optional<IndexWalk> active_walk(const MixedGraph& g, const Mask& xs, const Mask& ys, const Mask& cond) {
    // State = vertex * 3 + mark; mark 0: entered through a tail, 1: entered
    // through an arrowhead, 2: walk starts here.
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    const std::size_t n = g.size();
    const Mask an_cond = g.ancestors(cond);
    struct Parent {
        std::size_t state = none;
        Link link = Link::forward;
    };
    std::vector<char> seen(3 * n, 0);
    std::vector<Parent> parent(3 * n);
    std::deque<std::size_t> queue;
    for (std::size_t x = 0; x < n; ++x) {
        if (xs[x]) {
            seen[3 * x + 2] = 1;
            queue.push_back(3 * x + 2);
        }
    }

    auto rebuild = [&](std::size_t state) {
        IndexWalk w;
        for (std::size_t s = state; s != none; s = parent[s].state) {
            w.vertices.push_back(s / 3);
            if (parent[s].state != none) w.links.push_back(parent[s].link);
        }
        std::reverse(w.vertices.begin(), w.vertices.end());
        std::reverse(w.links.begin(), w.links.end());
        return w;
    };

    while (!queue.empty()) {
        std::size_t state = queue.front();
        queue.pop_front();
        std::size_t v = state / 3;
        std::size_t mark = state % 3;
        auto can_leave = [&](bool arrow_at_v) {
            if (mark == 2) return true;
            bool collider = mark == 1 && arrow_at_v;
            return collider ? static_cast<bool>(an_cond[v]) : !cond[v];
        };
        auto step = [&](std::size_t u, bool arrow_at_u, Link link) -> std::optional<IndexWalk> {
            std::size_t next = 3 * u + (arrow_at_u ? 1 : 0);
            if (seen[next]) return std::nullopt;
            seen[next] = 1;
            parent[next] = {state, link};
            if (ys[u]) return rebuild(next);
            queue.push_back(next);
            return std::nullopt;
        };
        if (can_leave(false)) {
            for (std::size_t c : g.children(v)) {
                if (c == v) continue;
                if (auto w = step(c, true, Link::forward)) return w;
            }
        }
        if (can_leave(true)) {
            for (std::size_t p : g.parents(v)) {
                if (p == v) continue;
                if (auto w = step(p, false, Link::backward)) return w;
            }
            for (std::size_t s : g.spouses(v)) {
                if (s == v) continue;
                if (auto w = step(s, true, Link::bidirected)) return w;
            }
        }
    }
    return std::nullopt;
}

}  // namespace detail

bool dsep_clusters(const FtAdmg& g, const VertexSet& xs, const VertexSet& ys, const VertexSet& cond) {
    Mask mx = g.cluster_mask(xs), my = g.cluster_mask(ys), mc = g.cluster_mask(cond);
    detail::check_query_sets(mx, my, mc);
    return !detail::active_walk(g.core(), mx, my, mc).has_value();
}

}  // namespace scgid
