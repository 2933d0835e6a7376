#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "scgid/graph.hpp"

namespace scgid {

/// A subgraph that is acyclic, gives every vertex at most one child and is
/// connected through its bidirected edges. Self-loops never belong to one.
struct CForest {
    VertexSet vertices;
    std::set<NamedEdge> directed;
    std::set<NamedEdge> bidirected;  // stored with first <= second
    VertexSet roots;                 // vertices without a child in the forest

    friend bool operator==(const CForest&, const CForest&) = default;
};

// Vertices of `f` that have no outgoing directed edge inside `f`.
VertexSet forest_roots(const CForest& f);

/// Two R-rooted C-forests F' ⊆ F with F meeting X and F' avoiding it.
struct Hedge {
    CForest f;
    CForest f_prime;
    VertexSet roots;

    friend bool operator==(const Hedge&, const Hedge&) = default;
};

// Bidirected components; bidirected self-loops are ignored.
std::vector<VertexSet> c_components(const Scg& g);

// Adds X <-> Y for every distinct pair sharing a strongly connected component.
Scg sc_projection(const Scg& g);

/// Checks every C-forest invariant of `candidate` against `g`, including that
/// `candidate.roots` matches the childless vertices.
/// Throws StructuralError if the candidate uses a vertex or edge absent from g.
bool is_c_forest(const Scg& g, const CForest& candidate);

/// Checks the hedge conditions for P(y | do(x)) in g: both forests valid,
/// F' ⊆ F, shared roots, F ∩ X ≠ ∅, F' ∩ X = ∅ and R ⊆ An(Y) in g with
/// X's outgoing edges removed.
bool is_hedge(const Scg& g, const Hedge& h, const VertexSet& x, const VertexSet& y);

struct HedgeSearchLimits {
    std::size_t max_vertices = 16;
};

/// Searches g itself for a hedge for P(y | do(x)).
///
/// For a fixed root set R there is a unique largest R-rooted C-forest inside
/// any vertex pool: repeatedly keep the vertices that reach R inside the
/// pool and the bidirected component holding R. A hedge with roots R exists
/// iff the largest forest over all vertices meets X and the largest forest
/// over the vertices outside X exists. Root sets are tried by size, then
/// lexicographically, so the result is deterministic.
///
/// Throws ResourceError when g has more than `limits.max_vertices` vertices.
std::optional<Hedge> find_hedge(const Scg& g, const VertexSet& x, const VertexSet& y,
                                const HedgeSearchLimits& limits = {});

// A hedge in the SC-projection of g (an SC-Hedge).
std::optional<Hedge> find_sc_hedge(const Scg& g, const VertexSet& x, const VertexSet& y,
                                   const HedgeSearchLimits& limits = {});

}  // namespace scgid
