#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scgid/errors.hpp"
#include "scgid/graph.hpp"

namespace scgid {

// How consecutive walk vertices a, b are joined.
enum class Link {
    forward,     // a -> b
    backward,    // a <- b
    bidirected,  // a <-> b
};

const char* link_symbol(Link l);

/// A sequence of consecutively adjacent vertices; vertices may repeat.
/// `links[i]` joins `vertices[i]` and `vertices[i + 1]`.
template <class V>
struct BasicWalk {
    std::vector<V> vertices;
    std::vector<Link> links;

    friend bool operator==(const BasicWalk&, const BasicWalk&) = default;
};

/// A walk without repeated vertices. The edge between consecutive vertices
/// is explicit since up to three edges can join the same SCG pair.
template <class V>
class BasicPath {
public:
    explicit BasicPath(BasicWalk<V> walk) : walk_(std::move(walk)) {
        if (walk_.vertices.empty() || walk_.links.size() + 1 != walk_.vertices.size()) {
            throw StructuralError("malformed walk");
        }
        std::set<V> seen(walk_.vertices.begin(), walk_.vertices.end());
        if (seen.size() != walk_.vertices.size()) throw StructuralError("path repeats a vertex");
    }

    const BasicWalk<V>& walk() const noexcept { return walk_; }
    const std::vector<V>& vertices() const noexcept { return walk_.vertices; }
    const std::vector<Link>& links() const noexcept { return walk_.links; }

    friend bool operator==(const BasicPath&, const BasicPath&) = default;

private:
    BasicWalk<V> walk_;
};

using Walk = BasicWalk<std::string>;
using Path = BasicPath<std::string>;
using TemporalWalk = BasicWalk<TemporalVertex>;
using TemporalPath = BasicPath<TemporalVertex>;

std::string to_string(const Walk& w);
std::string to_string(const TemporalWalk& w);
inline std::string to_string(const Path& p) { return to_string(p.walk()); }
inline std::string to_string(const TemporalPath& p) { return to_string(p.walk()); }

namespace detail {

struct IndexWalk {
    std::vector<std::size_t> vertices;
    std::vector<Link> links;
};

bool walk_valid(const MixedGraph& g, const IndexWalk& w);

// Blocking per triple: a non-collider in `cond`, or a collider whose
// reflexive descendants avoid `cond`.
bool walk_blocked(const MixedGraph& g, const IndexWalk& w, const Mask& cond);

// Reachability over (vertex, arrowhead-into-vertex) states; returns an
// active walk from `xs` to `ys` when one exists.
std::optional<IndexWalk> active_walk(const MixedGraph& g, const Mask& xs, const Mask& ys, const Mask& cond);

void check_query_sets(const Mask& xs, const Mask& ys, const Mask& cond);

template <class G>
IndexWalk to_index(const G& g, const BasicWalk<typename G::vertex_type>& w) {
    if (w.vertices.empty() || w.links.size() + 1 != w.vertices.size()) throw StructuralError("malformed walk");
    IndexWalk out;
    for (const auto& v : w.vertices) out.vertices.push_back(g.index_of(v));
    out.links = w.links;
    return out;
}

template <class G>
BasicWalk<typename G::vertex_type> from_index(const G& g, const IndexWalk& w) {
    BasicWalk<typename G::vertex_type> out;
    for (std::size_t v : w.vertices) out.vertices.push_back(g.vertex(v));
    out.links = w.links;
    return out;
}

}  // namespace detail

/// Primary path of a walk: U1 = V1, U(k+1) = the vertex following the last
/// occurrence of U(k). Keeps the walk's edge between consecutive picks.
template <class V>
BasicPath<V> primary_path(const BasicWalk<V>& walk) {
    if (walk.vertices.empty() || walk.links.size() + 1 != walk.vertices.size()) {
        throw StructuralError("malformed walk");
    }
    std::map<V, std::size_t> last;
    for (std::size_t i = 0; i < walk.vertices.size(); ++i) last[walk.vertices[i]] = i;
    BasicWalk<V> out;
    std::size_t i = 0;
    out.vertices.push_back(walk.vertices[0]);
    for (;;) {
        std::size_t j = last.at(walk.vertices[i]);
        if (j + 1 == walk.vertices.size()) break;
        out.links.push_back(walk.links[j]);
        out.vertices.push_back(walk.vertices[j + 1]);
        i = j + 1;
    }
    return BasicPath<V>(std::move(out));
}

// Throws StructuralError when the walk uses an edge absent from g.
template <NamedMixedGraph G>
bool is_blocked(const G& g, const BasicWalk<typename G::vertex_type>& walk,
                const std::set<typename G::vertex_type>& cond) {
    auto iw = detail::to_index(g, walk);
    if (!detail::walk_valid(g.core(), iw)) throw StructuralError("walk uses an edge that is not in the graph");
    return detail::walk_blocked(g.core(), iw, g.mask(cond));
}

template <NamedMixedGraph G>
bool is_blocked(const G& g, const BasicPath<typename G::vertex_type>& path,
                const std::set<typename G::vertex_type>& cond) {
    return is_blocked(g, path.walk(), cond);
}

/// True iff `cond` blocks every path between `xs` and `ys`. The sets must be
/// pairwise disjoint and `xs`, `ys` non-empty.
template <NamedMixedGraph G>
bool dsep(const G& g,
          const std::set<typename G::vertex_type>& xs,
          const std::set<typename G::vertex_type>& ys,
          const std::set<typename G::vertex_type>& cond) {
    Mask mx = g.mask(xs), my = g.mask(ys), mc = g.mask(cond);
    detail::check_query_sets(mx, my, mc);
    return !detail::active_walk(g.core(), mx, my, mc).has_value();
}

template <NamedMixedGraph G>
std::optional<BasicPath<typename G::vertex_type>> find_active_path(const G& g,
                                                                   const std::set<typename G::vertex_type>& xs,
                                                                   const std::set<typename G::vertex_type>& ys,
                                                                   const std::set<typename G::vertex_type>& cond) {
    Mask mx = g.mask(xs), my = g.mask(ys), mc = g.mask(cond);
    detail::check_query_sets(mx, my, mc);
    auto walk = detail::active_walk(g.core(), mx, my, mc);
    if (!walk) return std::nullopt;
    return primary_path(detail::from_index(g, *walk));
}

// Macro d-separation of V^X and V^Y given V^W in a full-time graph.
bool dsep_clusters(const FtAdmg& g, const VertexSet& xs, const VertexSet& ys, const VertexSet& cond);

}  // namespace scgid
