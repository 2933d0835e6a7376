#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "scgid/dsep.hpp"
#include "scgid/graph.hpp"

namespace gen {

using scgid::FtAdmg;
using scgid::NamedEdge;
using scgid::Scg;
using scgid::TemporalEdge;
using scgid::VertexSet;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [lo, hi].
    int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    bool chance(double p) { return unit() < p; }
    std::uint64_t raw() { return engine_(); }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(between(0, static_cast<int>(xs.size()) - 1))];
    }

    template <class T>
    void shuffle(std::vector<T>& xs) {
        std::shuffle(xs.begin(), xs.end(), engine_);
    }

private:
    std::mt19937_64 engine_;
};

inline std::vector<std::string> names(int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back("V" + std::to_string(i));
    return out;
}

// Every possible edge (self-loops included) is present with probability `density`.
inline Scg random_scg(Rng& rng, int n, double density) {
    auto vs = names(n);
    std::vector<NamedEdge> d, b;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (rng.chance(density)) d.emplace_back(vs[i], vs[j]);
            if (j >= i && rng.chance(density)) b.emplace_back(vs[i], vs[j]);
        }
    }
    return Scg(vs, d, b);
}

// Random FT-ADMG: edges only go forward in time or, when instantaneous,
// from a lower to a higher name index, which keeps it acyclic.
inline FtAdmg random_ftadmg(Rng& rng, int n, int t0, int tmax, double density) {
    auto vs = names(n);
    std::vector<TemporalEdge> d, b;
    for (int i = 0; i < n; ++i) {
        for (int s = t0; s <= tmax; ++s) {
            for (int j = 0; j < n; ++j) {
                for (int t = s; t <= tmax; ++t) {
                    if (t == s && j <= i) continue;
                    if (rng.chance(density)) d.push_back({{vs[i], s}, {vs[j], t}});
                    if (rng.chance(density)) b.push_back({{vs[i], s}, {vs[j], t}});
                }
            }
        }
    }
    return FtAdmg(vs, t0, tmax, d, b);
}

// Assigns each vertex to x, y, cond or nothing; x and y end up non-empty
// (when the graph has two or more vertices).
struct Query {
    VertexSet x, y, cond;
};

inline Query random_query(Rng& rng, const Scg& g) {
    Query q;
    std::vector<std::string> vs = g.vertices();
    rng.shuffle(vs);
    q.x.insert(vs[0]);
    q.y.insert(vs[1]);
    for (std::size_t i = 2; i < vs.size(); ++i) {
        int r = rng.between(0, 3);
        if (r == 0) q.x.insert(vs[i]);
        if (r == 1) q.y.insert(vs[i]);
        if (r == 2) q.cond.insert(vs[i]);
    }
    return q;
}

inline VertexSet random_subset(Rng& rng, const std::vector<std::string>& vs, double p) {
    VertexSet out;
    for (const auto& v : vs) {
        if (rng.chance(p)) out.insert(v);
    }
    return out;
}

// Random walk of up to `steps` edges; self-loops are never taken. Stops
// early at a vertex with no proper neighbour.
inline scgid::Walk random_walk(Rng& rng, const Scg& g, int steps) {
    using scgid::Link;
    scgid::Walk w;
    w.vertices.push_back(rng.pick(g.vertices()));
    for (int i = 0; i < steps; ++i) {
        const std::string& v = w.vertices.back();
        std::vector<std::pair<std::string, Link>> moves;
        for (const auto& [a, b] : g.directed_edges()) {
            if (a == b) continue;
            if (a == v) moves.emplace_back(b, Link::forward);
            if (b == v) moves.emplace_back(a, Link::backward);
        }
        for (const auto& [a, b] : g.bidirected_edges()) {
            if (a == b) continue;
            if (a == v) moves.emplace_back(b, Link::bidirected);
            if (b == v) moves.emplace_back(a, Link::bidirected);
        }
        if (moves.empty()) break;
        auto [to, link] = rng.pick(moves);
        w.vertices.push_back(to);
        w.links.push_back(link);
    }
    return w;
}

}  // namespace gen
