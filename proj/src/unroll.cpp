#include "scgid/unroll.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <random>

#include "scgid/errors.hpp"

namespace scgid {

namespace {

struct SlotSpace {
    std::size_t window;
    int t0;
    std::size_t index(std::size_t name, int t) const { return name * window + static_cast<std::size_t>(t - t0); }
};

// Admissible FT realizations of one SCG edge inside the window.
std::vector<IndexEdge> directed_slots(std::size_t a, std::size_t b, const UnrollConfig& cfg, const SlotSpace& sp) {
    std::vector<IndexEdge> out;
    for (int lag = a == b ? 1 : 0; lag <= cfg.max_lag; ++lag) {
        for (int t = cfg.t0 + lag; t <= cfg.tmax; ++t) out.emplace_back(sp.index(a, t - lag), sp.index(b, t));
    }
    return out;
}

std::vector<IndexEdge> bidirected_slots(std::size_t a, std::size_t b, const UnrollConfig& cfg, const SlotSpace& sp) {
    std::vector<IndexEdge> out;
    for (int s = cfg.t0; s <= cfg.tmax; ++s) {
        for (int t = cfg.t0; t <= cfg.tmax; ++t) {
            if (std::abs(s - t) > cfg.max_lag) continue;
            if (a == b && s >= t) continue;
            std::size_t x = sp.index(a, s), y = sp.index(b, t);
            out.emplace_back(std::min(x, y), std::max(x, y));
        }
    }
    return out;
}

FtAdmg build(const std::vector<std::string>& names, int t0, int tmax, const SlotSpace& sp,
             const std::vector<IndexEdge>& directed, const std::vector<IndexEdge>& bidirected) {
    auto vertex = [&](std::size_t i) {
        return TemporalVertex{names[i / sp.window], t0 + static_cast<int>(i % sp.window)};
    };
    std::vector<TemporalEdge> d, b;
    for (auto [x, y] : directed) d.emplace_back(vertex(x), vertex(y));
    for (auto [x, y] : bidirected) b.emplace_back(vertex(x), vertex(y));
    return FtAdmg(names, t0, tmax, d, b);
}

std::string edge_text(const Scg& g, IndexEdge e, bool bidirected) {
    return g.vertex(e.first) + (bidirected ? " <-> " : " -> ") + g.vertex(e.second);
}

// Unbiased draw from [0, n) using only the engine's raw output, so samples
// do not depend on the standard library's distribution implementations.
std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t span = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return static_cast<std::size_t>(r % span);
}

// Tracks directed FT edges and answers "would tail -> head close a cycle".
class CycleGuard {
public:
    explicit CycleGuard(std::size_t n) : out_(n) {}

    bool closes_cycle(std::size_t tail, std::size_t head) const {
        if (tail == head) return true;
        std::vector<char> seen(out_.size(), 0);
        std::vector<std::size_t> stack{head};
        seen[head] = 1;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            if (v == tail) return true;
            for (std::size_t w : out_[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        return false;
    }

    void add(std::size_t tail, std::size_t head) { out_[tail].push_back(head); }

private:
    std::vector<std::vector<std::size_t>> out_;
};

}  // namespace

void validate(const UnrollConfig& cfg) {
    if (cfg.tmax < cfg.t0) throw ArgumentError("tmax must not be smaller than t0");
    if (cfg.max_lag < 0 || cfg.max_lag > cfg.tmax - cfg.t0) {
        throw ArgumentError("max_lag must lie in [0, tmax - t0]");
    }
    if (auto* s = std::get_if<Sampled>(&cfg.mode); s && s->count == 0) {
        throw ArgumentError("sample count must be at least 1");
    }
}

CompatibleEnumerator::CompatibleEnumerator(const Scg& g, const UnrollConfig& cfg, std::size_t max_slots)
    : names_(g.vertices()), t0_(cfg.t0), tmax_(cfg.tmax) {
    validate(cfg);
    window_ = static_cast<std::size_t>(cfg.tmax - cfg.t0 + 1);
    SlotSpace sp{window_, cfg.t0};
    std::size_t total = 0;
    auto add = [&](IndexEdge e, bool bidirected, std::vector<IndexEdge> slots) {
        if (slots.empty()) {
            throw InfeasibleError("edge " + edge_text(g, e, bidirected) + " has no admissible realization in [" +
                                  std::to_string(cfg.t0) + ", " + std::to_string(cfg.tmax) + "] with max lag " +
                                  std::to_string(cfg.max_lag));
        }
        total += slots.size();
        EdgeSlots es;
        es.bidirected = bidirected;
        for (auto [a, b] : slots) es.slots.push_back({a, b});
        edges_.push_back(std::move(es));
    };
    for (auto e : g.core().directed()) add(e, false, directed_slots(e.first, e.second, cfg, sp));
    for (auto e : g.core().bidirected()) add(e, true, bidirected_slots(e.first, e.second, cfg, sp));
    if (total > max_slots) {
        throw ResourceError("exhaustive unrolling needs " + std::to_string(total) + " edge slots, limit is " +
                            std::to_string(max_slots));
    }
    choice_.assign(edges_.size(), 1);
}

bool CompatibleEnumerator::advance() {
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        std::uint32_t full = (std::uint32_t{1} << edges_[i].slots.size()) - 1;
        if (choice_[i] < full) {
            ++choice_[i];
            return true;
        }
        choice_[i] = 1;
    }
    return false;
}

std::optional<FtAdmg> CompatibleEnumerator::next() {
    SlotSpace sp{window_, t0_};
    while (!exhausted_) {
        std::vector<IndexEdge> directed, bidirected;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            for (std::size_t s = 0; s < edges_[i].slots.size(); ++s) {
                if (!((choice_[i] >> s) & 1u)) continue;
                auto [a, b] = edges_[i].slots[s];
                (edges_[i].bidirected ? bidirected : directed).emplace_back(a, b);
            }
        }
        exhausted_ = !advance();
        if (MixedGraph(names_.size() * window_, directed, {}).directed_acyclic()) {
            return build(names_, t0_, tmax_, sp, directed, bidirected);
        }
    }
    return std::nullopt;
}

std::vector<FtAdmg> enumerate_compatible(const Scg& g, const UnrollConfig& cfg, std::size_t max_slots) {
    CompatibleEnumerator it(g, cfg, max_slots);
    std::vector<FtAdmg> out;
    while (auto ft = it.next()) out.push_back(std::move(*ft));
    return out;
}

std::vector<FtAdmg> sample_compatible(const Scg& g, const UnrollConfig& cfg) {
    validate(cfg);
    const auto* mode = std::get_if<Sampled>(&cfg.mode);
    if (!mode) throw ArgumentError("sample_compatible needs a sampled configuration");
    const std::size_t window = static_cast<std::size_t>(cfg.tmax - cfg.t0 + 1);
    SlotSpace sp{window, cfg.t0};

    struct Edge {
        IndexEdge scg;
        bool bidirected;
        std::vector<IndexEdge> slots;
    };
    std::vector<Edge> edges;
    for (auto e : g.core().directed()) edges.push_back({e, false, directed_slots(e.first, e.second, cfg, sp)});
    for (auto e : g.core().bidirected()) edges.push_back({e, true, bidirected_slots(e.first, e.second, cfg, sp)});
    for (const auto& e : edges) {
        if (e.slots.empty()) {
            throw InfeasibleError("edge " + edge_text(g, e.scg, e.bidirected) + " has no admissible realization");
        }
    }

    std::mt19937_64 rng(mode->seed);
    std::vector<FtAdmg> out;
    for (std::size_t k = 0; k < mode->count; ++k) {
        CycleGuard guard(g.size() * window);
        std::vector<std::vector<char>> taken(edges.size());
        std::vector<IndexEdge> directed, bidirected;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const Edge& e = edges[i];
            taken[i].assign(e.slots.size(), 0);
            // Random order over the slots; the first one that keeps the graph acyclic is used.
            std::vector<std::size_t> order(e.slots.size());
            for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
            for (std::size_t j = order.size(); j > 1; --j) std::swap(order[j - 1], order[bounded(rng, j)]);
            bool placed = false;
            for (std::size_t j : order) {
                auto [a, b] = e.slots[j];
                if (!e.bidirected && guard.closes_cycle(a, b)) continue;
                if (!e.bidirected) guard.add(a, b);
                (e.bidirected ? bidirected : directed).emplace_back(a, b);
                taken[i][j] = 1;
                placed = true;
                break;
            }
            if (!placed) throw InfeasibleError("edge " + edge_text(g, e.scg, false) + " cannot be realized acyclically");
        }
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const Edge& e = edges[i];
            for (std::size_t j = 0; j < e.slots.size(); ++j) {
                bool coin = rng() & 1u;
                if (taken[i][j] || !coin) continue;
                auto [a, b] = e.slots[j];
                if (!e.bidirected) {
                    if (guard.closes_cycle(a, b)) continue;
                    guard.add(a, b);
                }
                (e.bidirected ? bidirected : directed).emplace_back(a, b);
            }
        }
        out.push_back(build(g.vertices(), cfg.t0, cfg.tmax, sp, directed, bidirected));
    }
    return out;
}

TemporalPath at_time(const Path& path, int t) {
    TemporalWalk w;
    for (const auto& v : path.vertices()) w.vertices.push_back({v, t});
    w.links = path.links();
    return TemporalPath(std::move(w));
}

FtAdmg completeness_witness(const Scg& g, const Path& path, const VertexSet& cond, int t0, int tmax) {
    if (tmax < t0 || static_cast<std::size_t>(tmax - t0) < g.size()) {
        throw ArgumentError("witness window needs tmax - t0 >= " + std::to_string(g.size()));
    }
    if (is_blocked(g, path, cond)) throw ContractError("path " + to_string(path) + " is blocked by the conditioning set");

    std::set<IndexEdge> on_directed, on_bidirected;
    const auto& vs = path.vertices();
    for (std::size_t i = 0; i < path.links().size(); ++i) {
        std::size_t a = g.index_of(vs[i]), b = g.index_of(vs[i + 1]);
        switch (path.links()[i]) {
            case Link::forward: on_directed.emplace(a, b); break;
            case Link::backward: on_directed.emplace(b, a); break;
            case Link::bidirected: on_bidirected.emplace(std::min(a, b), std::max(a, b)); break;
        }
    }

    const std::size_t window = static_cast<std::size_t>(tmax - t0 + 1);
    SlotSpace sp{window, t0};
    std::vector<IndexEdge> directed, bidirected;
    for (auto [a, b] : g.core().directed()) {
        bool on = on_directed.count({a, b}) > 0;
        for (int t = t0; t <= tmax; ++t) {
            if (on) directed.emplace_back(sp.index(a, t), sp.index(b, t));
            else if (t < tmax) directed.emplace_back(sp.index(a, t), sp.index(b, t + 1));
        }
    }
    for (auto [a, b] : g.core().bidirected()) {
        bool on = on_bidirected.count({a, b}) > 0;
        for (int t = t0; t <= tmax; ++t) {
            if (on) bidirected.emplace_back(sp.index(a, t), sp.index(b, t));
            else if (t < tmax) bidirected.emplace_back(sp.index(a, t), sp.index(b, t + 1));
        }
    }
    if (!MixedGraph(g.size() * window, directed, {}).directed_acyclic()) {
        throw ContractError("witness construction produced a directed cycle");
    }
    return build(g.vertices(), t0, tmax, sp, directed, bidirected);
}

FtAdmg completeness_witness(const Scg& g, const Path& path, const VertexSet& cond) {
    return completeness_witness(g, path, cond, 0, static_cast<int>(g.size()));
}

FtAdmg rule_failure_witness(const Scg& g, int rule, const CausalQuery& q, int t0, int tmax) {
    RuleCheck check = rule_applicable(g, rule, q);
    if (check.applicable) throw ContractError("rule " + std::to_string(rule) + " applies, there is nothing to witness");
    VertexSet cond = q.u;
    cond.insert(q.w.begin(), q.w.end());
    FtAdmg base = completeness_witness(check.mutilated, *check.witness, cond, t0, tmax);

    const std::size_t window = base.window();
    SlotSpace sp{window, t0};
    std::vector<IndexEdge> directed = base.core().directed(), bidirected = base.core().bidirected();
    const MixedGraph& cut = check.mutilated.core();
    for (auto [a, b] : g.core().directed()) {
        if (!cut.has_directed(a, b)) directed.emplace_back(sp.index(a, t0), sp.index(b, t0 + 1));
    }
    for (auto [a, b] : g.core().bidirected()) {
        if (!cut.has_bidirected(a, b)) bidirected.emplace_back(sp.index(a, t0), sp.index(b, t0 + 1));
    }
    return build(g.vertices(), t0, tmax, sp, directed, bidirected);
}

FtAdmg rule_failure_witness(const Scg& g, int rule, const CausalQuery& q) {
    return rule_failure_witness(g, rule, q, 0, static_cast<int>(g.size()));
}

}  // namespace scgid
