#include "scgid/graph.hpp"

#include <algorithm>
#include <deque>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

#include "scgid/errors.hpp"

namespace scgid {

std::string to_string(const TemporalVertex& v) {
    return v.name + "[" + std::to_string(v.t) + "]";
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front())) return false;
    return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) || digit(c); });
}

// ---------------------------------------------------------------------------
// MixedGraph

MixedGraph::MixedGraph(std::size_t n, std::vector<IndexEdge> directed, std::vector<IndexEdge> bidirected)
    : directed_(std::move(directed)),
      bidirected_(std::move(bidirected)),
      children_(n),
      parents_(n),
      spouses_(n) {
    for (auto& [a, b] : bidirected_) {
        if (a > b) std::swap(a, b);
    }
    std::sort(directed_.begin(), directed_.end());
    std::sort(bidirected_.begin(), bidirected_.end());
    if (std::adjacent_find(directed_.begin(), directed_.end()) != directed_.end()) {
        throw StructuralError("duplicate directed edge");
    }
    if (std::adjacent_find(bidirected_.begin(), bidirected_.end()) != bidirected_.end()) {
        throw StructuralError("duplicate bidirected edge");
    }
    for (auto [a, b] : directed_) {
        if (a >= n || b >= n) throw StructuralError("edge endpoint out of range");
        children_[a].push_back(b);
        parents_[b].push_back(a);
    }
    for (auto [a, b] : bidirected_) {
        if (b >= n) throw StructuralError("edge endpoint out of range");
        spouses_[a].push_back(b);
        if (a != b) spouses_[b].push_back(a);
    }
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(parents_[v].begin(), parents_[v].end());
        std::sort(spouses_[v].begin(), spouses_[v].end());
    }
}

bool MixedGraph::has_directed(std::size_t tail, std::size_t head) const {
    return std::binary_search(directed_.begin(), directed_.end(), IndexEdge{tail, head});
}

bool MixedGraph::has_bidirected(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(bidirected_.begin(), bidirected_.end(), IndexEdge{a, b});
}

namespace {

Mask closure(const Mask& seed, const std::vector<std::vector<std::size_t>>& next) {
    Mask out = seed;
    out.resize(next.size(), 0);
    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < out.size(); ++v) {
        if (out[v]) queue.push_back(v);
    }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t w : next[v]) {
            if (!out[w]) {
                out[w] = 1;
                queue.push_back(w);
            }
        }
    }
    return out;
}

bool in(const Mask& m, std::size_t v) { return v < m.size() && m[v]; }

}  // namespace

Mask MixedGraph::descendants(const Mask& seed) const { return closure(seed, children_); }

Mask MixedGraph::ancestors(const Mask& seed) const { return closure(seed, parents_); }

MixedGraph MixedGraph::mutilated(const Mask& topbar, const Mask& underbar) const {
    std::vector<IndexEdge> directed;
    std::vector<IndexEdge> bidirected;
    for (auto [a, b] : directed_) {
        if (in(topbar, b) || in(underbar, a)) continue;
        directed.emplace_back(a, b);
    }
    for (auto [a, b] : bidirected_) {
        if (in(topbar, a) || in(topbar, b)) continue;
        bidirected.emplace_back(a, b);
    }
    return MixedGraph(size(), std::move(directed), std::move(bidirected));
}

bool MixedGraph::directed_acyclic() const {
    // Kahn's algorithm.
    std::vector<std::size_t> indegree(size(), 0);
    for (auto [a, b] : directed_) ++indegree[b];
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < size(); ++v) {
        if (indegree[v] == 0) ready.push_back(v);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        std::size_t v = ready.back();
        ready.pop_back();
        ++seen;
        for (std::size_t w : children_[v]) {
            if (--indegree[w] == 0) ready.push_back(w);
        }
    }
    return seen == size();
}

// ---------------------------------------------------------------------------
// Scg

Scg::Scg(std::vector<std::string> vertices,
         const std::vector<NamedEdge>& directed,
         const std::vector<NamedEdge>& bidirected)
    : names_(std::move(vertices)) {
    std::sort(names_.begin(), names_.end());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!is_identifier(names_[i])) throw StructuralError("invalid vertex name '" + names_[i] + "'");
        if (!index_.emplace(names_[i], i).second) {
            throw StructuralError("duplicate vertex '" + names_[i] + "'");
        }
    }
    std::vector<IndexEdge> d;
    std::vector<IndexEdge> b;
    for (const auto& [tail, head] : directed) d.emplace_back(index_of(tail), index_of(head));
    for (const auto& [x, y] : bidirected) b.emplace_back(index_of(x), index_of(y));
    core_ = MixedGraph(names_.size(), std::move(d), std::move(b));
}

bool Scg::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

std::size_t Scg::index_of(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw LookupError("unknown vertex '" + std::string(name) + "'");
    return it->second;
}

std::vector<NamedEdge> Scg::directed_edges() const {
    std::vector<NamedEdge> out;
    for (auto [a, b] : core_.directed()) out.emplace_back(names_[a], names_[b]);
    return out;
}

std::vector<NamedEdge> Scg::bidirected_edges() const {
    std::vector<NamedEdge> out;
    for (auto [a, b] : core_.bidirected()) out.emplace_back(names_[a], names_[b]);
    return out;
}

bool Scg::has_directed(std::string_view tail, std::string_view head) const {
    return core_.has_directed(index_of(tail), index_of(head));
}

bool Scg::has_bidirected(std::string_view a, std::string_view b) const {
    return core_.has_bidirected(index_of(a), index_of(b));
}

Mask Scg::mask(const VertexSet& s) const {
    Mask m(names_.size(), 0);
    for (const auto& v : s) m[index_of(v)] = 1;
    return m;
}

VertexSet Scg::members(const Mask& m) const {
    VertexSet out;
    for (std::size_t i = 0; i < names_.size() && i < m.size(); ++i) {
        if (m[i]) out.insert(names_[i]);
    }
    return out;
}

Scg Scg::with_core(MixedGraph core) const {
    if (core.size() != names_.size()) throw StructuralError("vertex count mismatch");
    Scg out;
    out.names_ = names_;
    out.index_ = index_;
    out.core_ = std::move(core);
    return out;
}

// ---------------------------------------------------------------------------
// FtAdmg

FtAdmg::FtAdmg(std::vector<std::string> names,
               int t0,
               int tmax,
               const std::vector<TemporalEdge>& directed,
               const std::vector<TemporalEdge>& bidirected)
    : names_(std::move(names)), t0_(t0), tmax_(tmax) {
    if (tmax < t0) throw StructuralError("tmax must not be smaller than t0");
    std::sort(names_.begin(), names_.end());
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!is_identifier(names_[i])) throw StructuralError("invalid vertex name '" + names_[i] + "'");
        if (!index_.emplace(names_[i], i).second) {
            throw StructuralError("duplicate vertex '" + names_[i] + "'");
        }
    }
    std::vector<IndexEdge> d;
    std::vector<IndexEdge> b;
    for (const auto& [tail, head] : directed) {
        if (tail.t > head.t) {
            throw StructuralError("edge " + to_string(tail) + " -> " + to_string(head) + " goes back in time");
        }
        d.emplace_back(index_of(tail), index_of(head));
    }
    for (const auto& [x, y] : bidirected) b.emplace_back(index_of(x), index_of(y));
    core_ = MixedGraph(size(), std::move(d), std::move(b));
    check_invariants();
}

void FtAdmg::check_invariants() const {
    for (auto [a, b] : core_.directed()) {
        if (a == b) throw StructuralError("self edge at " + to_string(vertex(a)));
        if (vertex(a).t > vertex(b).t) throw StructuralError("edge goes back in time");
    }
    for (auto [a, b] : core_.bidirected()) {
        if (a == b) throw StructuralError("bidirected self edge at " + to_string(vertex(a)));
    }
    if (!core_.directed_acyclic()) throw StructuralError("directed cycle in FT-ADMG");
}

bool FtAdmg::contains(const TemporalVertex& v) const {
    return index_.find(v.name) != index_.end() && v.t >= t0_ && v.t <= tmax_;
}

std::size_t FtAdmg::name_index(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw LookupError("unknown vertex '" + std::string(name) + "'");
    return it->second;
}

std::size_t FtAdmg::index_of(const TemporalVertex& v) const {
    std::size_t n = name_index(v.name);
    if (v.t < t0_ || v.t > tmax_) {
        throw StructuralError("time index of " + to_string(v) + " outside [" + std::to_string(t0_) + ", " +
                              std::to_string(tmax_) + "]");
    }
    return n * window() + static_cast<std::size_t>(v.t - t0_);
}

TemporalVertex FtAdmg::vertex(std::size_t i) const {
    return {names_.at(i / window()), t0_ + static_cast<int>(i % window())};
}

std::vector<TemporalEdge> FtAdmg::directed_edges() const {
    std::vector<TemporalEdge> out;
    for (auto [a, b] : core_.directed()) out.emplace_back(vertex(a), vertex(b));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TemporalEdge> FtAdmg::bidirected_edges() const {
    std::vector<TemporalEdge> out;
    for (auto [a, b] : core_.bidirected()) out.emplace_back(vertex(a), vertex(b));
    std::sort(out.begin(), out.end());
    return out;
}

bool FtAdmg::has_directed(const TemporalVertex& tail, const TemporalVertex& head) const {
    return core_.has_directed(index_of(tail), index_of(head));
}

bool FtAdmg::has_bidirected(const TemporalVertex& a, const TemporalVertex& b) const {
    return core_.has_bidirected(index_of(a), index_of(b));
}

Mask FtAdmg::mask(const TemporalSet& s) const {
    Mask m(size(), 0);
    for (const auto& v : s) m[index_of(v)] = 1;
    return m;
}

TemporalSet FtAdmg::members(const Mask& m) const {
    TemporalSet out;
    for (std::size_t i = 0; i < size() && i < m.size(); ++i) {
        if (m[i]) out.insert(vertex(i));
    }
    return out;
}

Mask FtAdmg::cluster_mask(const VertexSet& clusters) const {
    Mask m(size(), 0);
    for (const auto& c : clusters) {
        std::size_t base = name_index(c) * window();
        std::fill_n(m.begin() + static_cast<std::ptrdiff_t>(base), window(), char{1});
    }
    return m;
}

TemporalSet FtAdmg::cluster_vertices(const VertexSet& clusters) const { return members(cluster_mask(clusters)); }

FtAdmg FtAdmg::with_core(MixedGraph core) const {
    if (core.size() != size()) throw StructuralError("vertex count mismatch");
    FtAdmg out;
    out.names_ = names_;
    out.index_ = index_;
    out.t0_ = t0_;
    out.tmax_ = tmax_;
    out.core_ = std::move(core);
    out.check_invariants();
    return out;
}

// ---------------------------------------------------------------------------
// Free functions

FtAdmg mutilate_clusters(const FtAdmg& g, const ScgMutilation& spec) {
    return g.with_core(g.core().mutilated(g.cluster_mask(spec.topbar), g.cluster_mask(spec.underbar)));
}

VertexSet scc(const Scg& g, const std::string& v) {
    Mask seed(g.size(), 0);
    seed[g.index_of(v)] = 1;
    Mask an = g.core().ancestors(seed);
    Mask de = g.core().descendants(seed);
    for (std::size_t i = 0; i < an.size(); ++i) an[i] = an[i] && de[i];
    return g.members(an);
}

std::vector<VertexSet> strongly_connected_components(const Scg& g) {
    using BoostGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    BoostGraph bg(g.size());
    for (auto [a, b] : g.core().directed()) boost::add_edge(a, b, bg);
    std::vector<int> component(g.size());
    int count = boost::strong_components(bg, component.data());
    std::vector<VertexSet> out(static_cast<std::size_t>(count));
    for (std::size_t v = 0; v < g.size(); ++v) out[static_cast<std::size_t>(component[v])].insert(g.vertex(v));
    std::sort(out.begin(), out.end(), [](const VertexSet& a, const VertexSet& b) { return *a.begin() < *b.begin(); });
    return out;
}

Scg project(const FtAdmg& g) {
    const std::size_t w = g.window();
    std::vector<IndexEdge> directed;
    std::vector<IndexEdge> bidirected;
    for (auto [a, b] : g.core().directed()) directed.emplace_back(a / w, b / w);
    for (auto [a, b] : g.core().bidirected()) bidirected.emplace_back(std::min(a / w, b / w), std::max(a / w, b / w));
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
    std::sort(bidirected.begin(), bidirected.end());
    bidirected.erase(std::unique(bidirected.begin(), bidirected.end()), bidirected.end());
    return Scg(g.names(), {}, {}).with_core(MixedGraph(g.names().size(), std::move(directed), std::move(bidirected)));
}

bool is_compatible(const FtAdmg& ft, const Scg& s) {
    if (ft.names() != s.vertices()) throw StructuralError("vertex name sets differ");
    return project(ft) == s;
}

}  // namespace scgid
