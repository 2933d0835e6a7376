#pragma once

#include <compare>
#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scgid {

using VertexSet = std::set<std::string>;
using NamedEdge = std::pair<std::string, std::string>;

struct TemporalVertex {
    std::string name;
    int t = 0;

    friend auto operator<=>(const TemporalVertex&, const TemporalVertex&) = default;
};

using TemporalSet = std::set<TemporalVertex>;
using TemporalEdge = std::pair<TemporalVertex, TemporalVertex>;

// Renders as `X[3]`.
std::string to_string(const TemporalVertex& v);

bool is_identifier(std::string_view s);

// Membership flags indexed by vertex index.
using Mask = std::vector<char>;
using IndexEdge = std::pair<std::size_t, std::size_t>;

/// Index-based mixed multigraph shared by SCGs and FT-ADMGs.
///
/// Directed edges are ordered pairs, bidirected edges are stored as
/// (min, max). Self-loops of both kinds are representable; whether they are
/// legal is decided by the owning graph type. Immutable after construction.
class MixedGraph {
public:
    MixedGraph() = default;
    MixedGraph(std::size_t n, std::vector<IndexEdge> directed, std::vector<IndexEdge> bidirected);

    std::size_t size() const noexcept { return children_.size(); }
    const std::vector<IndexEdge>& directed() const noexcept { return directed_; }
    const std::vector<IndexEdge>& bidirected() const noexcept { return bidirected_; }

    // Adjacency lists are sorted and include self-loops.
    const std::vector<std::size_t>& children(std::size_t v) const { return children_.at(v); }
    const std::vector<std::size_t>& parents(std::size_t v) const { return parents_.at(v); }
    const std::vector<std::size_t>& spouses(std::size_t v) const { return spouses_.at(v); }

    bool has_directed(std::size_t tail, std::size_t head) const;
    bool has_bidirected(std::size_t a, std::size_t b) const;

    // Reflexive closures.
    Mask descendants(const Mask& seed) const;
    Mask ancestors(const Mask& seed) const;

    /// Removes directed edges into `topbar`, bidirected edges touching
    /// `topbar` and directed edges out of `underbar`.
    MixedGraph mutilated(const Mask& topbar, const Mask& underbar) const;

    // A directed self-loop counts as a cycle.
    bool directed_acyclic() const;

    friend bool operator==(const MixedGraph& a, const MixedGraph& b) {
        return a.size() == b.size() && a.directed_ == b.directed_ && a.bidirected_ == b.bidirected_;
    }

private:
    std::vector<IndexEdge> directed_;
    std::vector<IndexEdge> bidirected_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> spouses_;
};

/// Summary causal graph: one vertex per time series, directed and
/// bidirected edges, cycles and self-loops of both kinds allowed.
class Scg {
public:
    using vertex_type = std::string;

    Scg() = default;
    Scg(std::vector<std::string> vertices,
        const std::vector<NamedEdge>& directed,
        const std::vector<NamedEdge>& bidirected);

    // Sorted by name; index i corresponds to vertices()[i].
    const std::vector<std::string>& vertices() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    bool contains(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;
    const std::string& vertex(std::size_t i) const { return names_.at(i); }
    const MixedGraph& core() const noexcept { return core_; }

    std::vector<NamedEdge> directed_edges() const;
    std::vector<NamedEdge> bidirected_edges() const;
    bool has_directed(std::string_view tail, std::string_view head) const;
    bool has_bidirected(std::string_view a, std::string_view b) const;

    Mask mask(const VertexSet& s) const;
    VertexSet members(const Mask& m) const;
    VertexSet all_vertices() const { return {names_.begin(), names_.end()}; }

    // Same vertices over another edge structure (mutilation, projection).
    Scg with_core(MixedGraph core) const;

    friend bool operator==(const Scg& a, const Scg& b) { return a.names_ == b.names_ && a.core_ == b.core_; }

private:
    std::vector<std::string> names_;
    std::map<std::string, std::size_t, std::less<>> index_;
    MixedGraph core_;
};

/// Full-time acyclic directed mixed graph over (name, t) for t in [t0, tmax].
///
/// Vertex index = name_index * window() + (t - t0).
class FtAdmg {
public:
    using vertex_type = TemporalVertex;

    FtAdmg() = default;
    FtAdmg(std::vector<std::string> names,
           int t0,
           int tmax,
           const std::vector<TemporalEdge>& directed,
           const std::vector<TemporalEdge>& bidirected);

    const std::vector<std::string>& names() const noexcept { return names_; }
    int t0() const noexcept { return t0_; }
    int tmax() const noexcept { return tmax_; }
    std::size_t window() const noexcept { return static_cast<std::size_t>(tmax_ - t0_ + 1); }
    std::size_t size() const noexcept { return names_.size() * window(); }

    bool contains(const TemporalVertex& v) const;
    std::size_t index_of(const TemporalVertex& v) const;
    TemporalVertex vertex(std::size_t i) const;
    const MixedGraph& core() const noexcept { return core_; }

    std::vector<TemporalEdge> directed_edges() const;
    std::vector<TemporalEdge> bidirected_edges() const;
    bool has_directed(const TemporalVertex& tail, const TemporalVertex& head) const;
    bool has_bidirected(const TemporalVertex& a, const TemporalVertex& b) const;

    Mask mask(const TemporalSet& s) const;
    TemporalSet members(const Mask& m) const;

    // V^X: every time slice of the named clusters.
    Mask cluster_mask(const VertexSet& clusters) const;
    TemporalSet cluster_vertices(const VertexSet& clusters) const;
    std::size_t name_index(std::string_view name) const;

    FtAdmg with_core(MixedGraph core) const;

    friend bool operator==(const FtAdmg& a, const FtAdmg& b) {
        return a.names_ == b.names_ && a.t0_ == b.t0_ && a.tmax_ == b.tmax_ && a.core_ == b.core_;
    }

private:
    void check_invariants() const;

    std::vector<std::string> names_;
    std::map<std::string, std::size_t, std::less<>> index_;
    int t0_ = 0;
    int tmax_ = 0;
    MixedGraph core_;
};

template <class G>
concept NamedMixedGraph = requires(const G& g, const std::set<typename G::vertex_type>& s, const Mask& m) {
    { g.core() } -> std::same_as<const MixedGraph&>;
    { g.mask(s) } -> std::same_as<Mask>;
    { g.members(m) } -> std::same_as<std::set<typename G::vertex_type>>;
};

template <class V>
struct MutilationSpec {
    std::set<V> topbar;
    std::set<V> underbar;
};

using ScgMutilation = MutilationSpec<std::string>;

template <NamedMixedGraph G>
std::set<typename G::vertex_type> descendants(const G& g, const std::set<typename G::vertex_type>& seed) {
    return g.members(g.core().descendants(g.mask(seed)));
}

template <NamedMixedGraph G>
std::set<typename G::vertex_type> ancestors(const G& g, const std::set<typename G::vertex_type>& seed) {
    return g.members(g.core().ancestors(g.mask(seed)));
}

template <NamedMixedGraph G>
G mutilate(const G& g, const MutilationSpec<typename G::vertex_type>& spec) {
    return g.with_core(g.core().mutilated(g.mask(spec.topbar), g.mask(spec.underbar)));
}

// Mutilation of every time slice of the named clusters (V^A, V^B).
FtAdmg mutilate_clusters(const FtAdmg& g, const ScgMutilation& spec);

// An(v) ∩ Desc(v).
VertexSet scc(const Scg& g, const std::string& v);

// Partition into strongly connected components, each sorted, ordered by
// smallest member.
std::vector<VertexSet> strongly_connected_components(const Scg& g);

Scg project(const FtAdmg& g);

bool is_compatible(const FtAdmg& ft, const Scg& s);

}  // namespace scgid
