#include "scgid/docalculus.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <queue>

#include "scgid/errors.hpp"

namespace scgid {

namespace {

void check_rule_id(int rule) {
    if (rule < 1 || rule > 3) throw ArgumentError("rule must be 1, 2 or 3, got " + std::to_string(rule));
}

void check_disjoint(const std::vector<const VertexSet*>& sets) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            for (const auto& v : *sets[i]) {
                if (sets[j]->count(v)) throw ArgumentError("query sets overlap at '" + v + "'");
            }
        }
    }
}

VertexSet unite(VertexSet a, const VertexSet& b) {
    a.insert(b.begin(), b.end());
    return a;
}

VertexSet minus(VertexSet a, const VertexSet& b) {
    for (const auto& v : b) a.erase(v);
    return a;
}

bool includes(const VertexSet& big, const VertexSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

struct ClusterView {
    VertexSet targets, interventions, conditioning;
};

VertexSet clusters_of(const SymbolSet& s) {
    VertexSet out;
    for (const auto& sym : s) out.insert(sym.cluster);
    return out;
}

ClusterView view(const ProbTerm& t) {
    ClusterView v{clusters_of(t.targets), clusters_of(t.interventions), clusters_of(t.conditioning)};
    std::size_t total = v.targets.size() + v.interventions.size() + v.conditioning.size();
    std::size_t symbols = t.targets.size() + t.interventions.size() + t.conditioning.size();
    if (total != symbols || unite(unite(v.targets, v.interventions), v.conditioning).size() != total) {
        throw RewriteError("term mentions a cluster more than once");
    }
    return v;
}

// Moves symbols whose cluster is in `z` from `from` to `to` (or drops them when `to` is null).
void shift(SymbolSet& from, SymbolSet* to, const VertexSet& z) {
    for (auto it = from.begin(); it != from.end();) {
        if (z.count(it->cluster)) {
            if (to) to->insert(*it);
            it = from.erase(it);
        } else {
            ++it;
        }
    }
}

const ProbTerm& term_at(const Estimand& expr, std::size_t index, ProbTerm& storage) {
    auto ts = terms(expr);
    if (index >= ts.size()) throw RewriteError("term index " + std::to_string(index) + " is out of range");
    storage = ts[index];
    return storage;
}

// ---- search internals -------------------------------------------------------

using Bits = std::uint64_t;

Mask to_mask(Bits b, std::size_t n) {
    Mask m(n, 0);
    for (std::size_t i = 0; i < n; ++i) m[i] = static_cast<char>((b >> i) & 1u);
    return m;
}

Bits to_bits(const Mask& m) {
    Bits b = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) b |= Bits{1} << i;
    }
    return b;
}

struct TermKey {
    Bits t = 0, d = 0, c = 0;
    friend auto operator<=>(const TermKey&, const TermKey&) = default;
};

bool separated(const MixedGraph& core, int rule, Bits y, Bits x, Bits u, Bits w) {
    const std::size_t n = core.size();
    const Mask none(n, 0);
    Mask topbar = to_mask(u, n), underbar = none;
    if (rule == 2) underbar = to_mask(x, n);
    if (rule == 3) {
        Bits an_w = to_bits(core.mutilated(topbar, none).ancestors(to_mask(w, n)));
        topbar = to_mask(u | (x & ~an_w), n);
    }
    MixedGraph m = core.mutilated(topbar, underbar);
    return !detail::active_walk(m, to_mask(x, n), to_mask(y, n), to_mask(u | w, n)).has_value();
}

template <class F>
void for_each_choice(Bits pool, F&& f) {
    if (pool == 0) return;
    if (std::popcount(pool) <= 6) {
        for (Bits z = pool; z != 0; z = (z - 1) & pool) f(z);
        return;
    }
    for (Bits rest = pool; rest != 0; rest &= rest - 1) f(rest & (~rest + 1));
    f(pool);
}

struct Hyperedge {
    std::size_t parent;
    Move move;
    int rule;
    Direction direction;
    Bits z;
    std::vector<std::size_t> children;
};

class Search {
public:
    Search(const Scg& g, const SearchBudget& budget) : g_(g), budget_(budget), n_(g.size()) {}

    std::optional<DerivationNode> run(TermKey root) {
        explore(root);
        return solve();
    }

    std::size_t explored() const { return keys_.size(); }

    std::string reason() const {
        if (term_limit_hit_) return "explored-term limit reached";
        if (depth_limit_hit_) return "depth limit reached";
        if (size_limit_hit_) return "estimand size limit exceeded";
        return "no derivation found by the move set";
    }

private:
    Estimand term_estimand(const TermKey& k) const {
        auto symbols = [&](Bits b) {
            SymbolSet s;
            for (std::size_t i = 0; i < n_; ++i) {
                if ((b >> i) & 1u) s.insert(Symbol{g_.vertex(i), 0});
            }
            return s;
        };
        return Estimand::term({symbols(k.t), symbols(k.c), symbols(k.d)});
    }

    std::size_t intern(const TermKey& k, std::size_t depth) {
        auto [it, fresh] = ids_.emplace(k, keys_.size());
        if (fresh) {
            keys_.push_back(k);
            depth_.push_back(depth);
            uses_.emplace_back();
            queue_.push_back(it->second);
        }
        return it->second;
    }

    void add_edge(std::size_t parent, Move move, int rule, Direction dir, Bits z, std::vector<TermKey> kids) {
        Hyperedge e{parent, move, rule, dir, z, {}};
        for (const auto& k : kids) e.children.push_back(intern(k, depth_[parent] + 1));
        for (std::size_t c : e.children) uses_[c].push_back(edges_.size());
        edges_.push_back(std::move(e));
    }

    void expand(std::size_t id) {
        const TermKey k = keys_[id];
        const MixedGraph& core = g_.core();
        const Bits all = n_ == 64 ? ~Bits{0} : (Bits{1} << n_) - 1;

        for_each_choice(k.c, [&](Bits z) {
            if (separated(core, 1, k.t, z, k.d, k.c & ~z)) {
                add_edge(id, Move::rule, 1, Direction::forward, z, {{k.t, k.d, k.c & ~z}});
            }
            if (separated(core, 2, k.t, z, k.d, k.c & ~z)) {
                add_edge(id, Move::rule, 2, Direction::backward, z, {{k.t, k.d | z, k.c & ~z}});
            }
        });
        for_each_choice(k.d, [&](Bits z) {
            if (separated(core, 2, k.t, z, k.d & ~z, k.c)) {
                add_edge(id, Move::rule, 2, Direction::forward, z, {{k.t, k.d & ~z, k.c | z}});
            }
            if (separated(core, 3, k.t, z, k.d & ~z, k.c)) {
                add_edge(id, Move::rule, 3, Direction::forward, z, {{k.t, k.d & ~z, k.c}});
            }
        });
        const Bits free = all & ~(k.t | k.d | k.c);
        for (std::size_t b = 0; b < n_; ++b) {
            const Bits bit = Bits{1} << b;
            if (free & bit) {
                add_edge(id, Move::marginalize, 0, Direction::forward, bit, {{k.t, k.d, k.c | bit}, {bit, k.d, k.c}});
            }
            if ((k.t & bit) && std::popcount(k.t) >= 2) {
                add_edge(id, Move::chain, 0, Direction::forward, bit, {{k.t & ~bit, k.d, k.c | bit}, {bit, k.d, k.c}});
            }
        }
    }

    void explore(TermKey root) {
        intern(root, 0);
        while (!queue_.empty()) {
            std::size_t id = queue_.front();
            queue_.pop_front();
            if (keys_[id].d == 0) continue;
            if (depth_[id] >= budget_.max_depth) {
                depth_limit_hit_ = true;
                continue;
            }
            if (keys_.size() >= budget_.max_terms) {
                term_limit_hit_ = true;
                break;
            }
            expand(id);
        }
    }

    struct Candidate {
        std::size_t cost;
        std::string key;
        std::size_t term;
        std::size_t edge;  // npos for observational leaves
        Estimand estimand;
    };

    Estimand combine(const Hyperedge& e) const {
        if (e.move == Move::rule) return solved_[e.children[0]];
        std::vector<Estimand> parts{solved_[e.children[0]], solved_[e.children[1]]};
        Estimand prod = Estimand::product(std::move(parts));
        if (e.move == Move::chain) return prod;
        return Estimand::sum(Symbol{g_.vertex(static_cast<std::size_t>(std::countr_zero(e.z))), 0}, std::move(prod));
    }

    std::optional<DerivationNode> solve() {
        constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
        const std::size_t m = keys_.size();
        solved_.assign(m, Estimand::product({}));
        cost_.assign(m, 0);
        chosen_.assign(m, npos);
        std::vector<char> done(m, 0);
        std::vector<std::size_t> pending(edges_.size());
        for (std::size_t i = 0; i < edges_.size(); ++i) pending[i] = edges_[i].children.size();

        std::vector<Candidate> pool;
        auto worse = [&](std::size_t a, std::size_t b) {
            const auto& x = pool[a];
            const auto& y = pool[b];
            return std::tie(x.cost, x.key, x.term) > std::tie(y.cost, y.key, y.term);
        };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
        for (std::size_t id = 0; id < m; ++id) {
            if (keys_[id].d != 0) continue;
            Estimand e = term_estimand(keys_[id]);
            pool.push_back({0, canonical_key(e), id, npos, std::move(e)});
            heap.push(pool.size() - 1);
        }
        while (!heap.empty()) {
            std::size_t ci = heap.top();
            heap.pop();
            std::size_t id = pool[ci].term;
            if (done[id]) continue;
            done[id] = 1;
            solved_[id] = pool[ci].estimand;
            cost_[id] = pool[ci].cost;
            chosen_[id] = pool[ci].edge;
            if (id == 0) return build(0);
            for (std::size_t ei : uses_[id]) {
                if (--pending[ei] != 0 || done[edges_[ei].parent]) continue;
                const Hyperedge& e = edges_[ei];
                Estimand est = combine(e);
                if (term_count(est) > budget_.max_size) {
                    size_limit_hit_ = true;
                    continue;
                }
                std::size_t cost = 1;
                for (std::size_t c : e.children) cost += cost_[c];
                pool.push_back({cost, canonical_key(est), e.parent, ei, std::move(est)});
                heap.push(pool.size() - 1);
            }
        }
        return std::nullopt;
    }

    DerivationNode build(std::size_t id) const {
        DerivationNode node;
        node.term = term_estimand(keys_[id]);
        if (chosen_[id] == std::numeric_limits<std::size_t>::max()) return node;
        const Hyperedge& e = edges_[chosen_[id]];
        node.move = e.move;
        node.rule = e.rule;
        node.direction = e.direction;
        node.clusters = g_.members(to_mask(e.z, n_));
        for (std::size_t c : e.children) node.children.push_back(build(c));
        return node;
    }

    const Scg& g_;
    SearchBudget budget_;
    std::size_t n_;
    std::map<TermKey, std::size_t> ids_;
    std::vector<TermKey> keys_;
    std::vector<std::size_t> depth_;
    std::vector<std::vector<std::size_t>> uses_;
    std::vector<Hyperedge> edges_;
    std::deque<std::size_t> queue_;
    std::vector<Estimand> solved_;
    std::vector<std::size_t> cost_;
    std::vector<std::size_t> chosen_;
    bool term_limit_hit_ = false;
    bool depth_limit_hit_ = false;
    bool size_limit_hit_ = false;
};

void trace_into(const DerivationNode& d, std::size_t depth, std::vector<std::string>& out) {
    std::string line(2 * depth, ' ');
    line += estimand_to_text(d.term);
    auto names = [&] {
        std::string s;
        for (const auto& c : d.clusters) s += (s.empty() ? "" : ",") + c;
        return s;
    };
    switch (d.move) {
        case Move::observed: line += "  [observational]"; break;
        case Move::rule:
            line += "  [rule " + std::to_string(d.rule) + (d.direction == Direction::forward ? "" : " backward") +
                    " on " + names() + "]";
            break;
        case Move::marginalize: line += "  [marginalize over " + names() + "]"; break;
        case Move::chain: line += "  [chain rule on " + names() + "]"; break;
    }
    out.push_back(std::move(line));
    for (const auto& c : d.children) trace_into(c, depth + 1, out);
}

}  // namespace

VertexSet x_given_w(const Scg& g, const VertexSet& x, const VertexSet& w, const VertexSet& u) {
    VertexSet an = ancestors(mutilate(g, ScgMutilation{u, {}}), w);
    for (const auto& v : x) g.index_of(v);
    return minus(x, an);
}

RuleCheck rule_applicable(const Scg& g, int rule, const CausalQuery& q) {
    check_rule_id(rule);
    if (q.y.empty()) throw ArgumentError("outcome set must be non-empty");
    check_disjoint({&q.y, &q.x, &q.u, &q.w});
    RuleCheck out;
    out.rule = rule;
    out.mutilation.topbar = q.u;
    if (rule == 2) out.mutilation.underbar = q.x;
    if (rule == 3) out.mutilation.topbar = unite(q.u, x_given_w(g, q.x, q.w, q.u));
    out.mutilated = mutilate(g, out.mutilation);
    out.dsep_x = q.x;
    out.dsep_y = q.y;
    out.dsep_cond = unite(q.u, q.w);
    if (q.x.empty()) {
        out.applicable = true;
        return out;
    }
    out.witness = find_active_path(out.mutilated, q.x, q.y, out.dsep_cond);
    out.applicable = !out.witness.has_value();
    return out;
}

bool ft_rule_holds(const FtAdmg& ft, int rule, const CausalQuery& q) {
    check_rule_id(rule);
    if (q.y.empty()) throw ArgumentError("outcome set must be non-empty");
    check_disjoint({&q.y, &q.x, &q.u, &q.w});
    if (q.x.empty()) return true;
    TemporalSet vu = ft.cluster_vertices(q.u), vx = ft.cluster_vertices(q.x);
    MutilationSpec<TemporalVertex> spec{vu, {}};
    if (rule == 2) spec.underbar = vx;
    if (rule == 3) {
        TemporalSet an = ancestors(mutilate(ft, MutilationSpec<TemporalVertex>{vu, {}}), ft.cluster_vertices(q.w));
        for (const auto& v : vx) {
            if (!an.count(v)) spec.topbar.insert(v);
        }
    }
    return dsep_clusters(mutilate(ft, spec), q.x, q.y, unite(q.u, q.w));
}

Estimand apply_rule(const Scg& g, const Estimand& expr, const RuleBinding& binding) {
    check_rule_id(binding.rule);
    if (binding.clusters.empty()) return expr;
    ProbTerm storage;
    ProbTerm t = term_at(expr, binding.term_index, storage);
    ClusterView v = view(t);
    const VertexSet& z = binding.clusters;
    for (const auto& c : z) g.index_of(c);
    const VertexSet mentioned = unite(unite(v.targets, v.interventions), v.conditioning);
    auto require = [&](bool ok, const char* what) {
        if (!ok) throw RewriteError(std::string("binding does not match the term: ") + what);
    };
    auto fresh = [&] {
        SymbolSet s;
        for (const auto& c : z) s.insert(Symbol{c, 0});
        return s;
    };
    CausalQuery q;
    q.y = v.targets;
    q.x = z;
    const bool fwd = binding.direction == Direction::forward;
    switch (binding.rule) {
        case 1:
            if (fwd) {
                require(includes(v.conditioning, z), "clusters must be observed");
                q.u = v.interventions;
                q.w = minus(v.conditioning, z);
                shift(t.conditioning, nullptr, z);
            } else {
                require(minus(z, mentioned).size() == z.size(), "clusters already appear in the term");
                q.u = v.interventions;
                q.w = v.conditioning;
                auto add = fresh();
                t.conditioning.insert(add.begin(), add.end());
            }
            break;
        case 2:
            if (fwd) {
                require(includes(v.interventions, z), "clusters must be intervened on");
                q.u = minus(v.interventions, z);
                q.w = v.conditioning;
                shift(t.interventions, &t.conditioning, z);
            } else {
                require(includes(v.conditioning, z), "clusters must be observed");
                q.u = v.interventions;
                q.w = minus(v.conditioning, z);
                shift(t.conditioning, &t.interventions, z);
            }
            break;
        default:
            if (fwd) {
                require(includes(v.interventions, z), "clusters must be intervened on");
                q.u = minus(v.interventions, z);
                q.w = v.conditioning;
                shift(t.interventions, nullptr, z);
            } else {
                require(minus(z, mentioned).size() == z.size(), "clusters already appear in the term");
                q.u = v.interventions;
                q.w = v.conditioning;
                auto add = fresh();
                t.interventions.insert(add.begin(), add.end());
            }
            break;
    }
    RuleCheck check = rule_applicable(g, binding.rule, q);
    if (!check.applicable) {
        throw ContractError("rule " + std::to_string(binding.rule) + " does not apply: " + to_string(*check.witness) +
                            " is active");
    }
    return replace_term(expr, binding.term_index, Estimand::term(std::move(t)));
}

Estimand marginalize(const Estimand& expr, std::size_t term_index, const std::string& cluster) {
    ProbTerm storage;
    const ProbTerm& t = term_at(expr, term_index, storage);
    ClusterView v = view(t);
    if (v.targets.count(cluster) || v.interventions.count(cluster) || v.conditioning.count(cluster)) {
        throw RewriteError("cannot marginalize over '" + cluster + "', it already appears in the term");
    }
    Symbol b{cluster, 0};
    ProbTerm first = t, second{{b}, t.conditioning, t.interventions};
    first.conditioning.insert(b);
    Estimand body = Estimand::product({Estimand::term(std::move(first)), Estimand::term(std::move(second))});
    return replace_term(expr, term_index, Estimand::sum(b, std::move(body)));
}

Estimand chain_split(const Estimand& expr, std::size_t term_index, const std::string& cluster) {
    ProbTerm storage;
    const ProbTerm& t = term_at(expr, term_index, storage);
    ClusterView v = view(t);
    if (!v.targets.count(cluster) || t.targets.size() < 2) {
        throw RewriteError("chain rule needs '" + cluster + "' among at least two targets");
    }
    auto it = std::find_if(t.targets.begin(), t.targets.end(), [&](const Symbol& s) { return s.cluster == cluster; });
    Symbol b = *it;
    ProbTerm first = t, second{{b}, t.conditioning, t.interventions};
    first.targets.erase(b);
    first.conditioning.insert(b);
    return replace_term(expr, term_index,
                        Estimand::product({Estimand::term(std::move(first)), Estimand::term(std::move(second))}));
}

const char* move_name(Move m) {
    switch (m) {
        case Move::observed: return "observed";
        case Move::rule: return "rule";
        case Move::marginalize: return "marginalize";
        case Move::chain: return "chain";
    }
    return "?";
}

std::size_t derivation_cost(const DerivationNode& d) {
    std::size_t c = d.move == Move::observed ? 0 : 1;
    for (const auto& child : d.children) c += derivation_cost(child);
    return c;
}

Estimand replay(const Scg& g, const DerivationNode& d) {
    if (d.term.kind() != Estimand::Kind::term) throw RewriteError("derivation node must hold a single term");
    auto expect_children = [&](std::size_t k) {
        if (d.children.size() != k) throw RewriteError(std::string("malformed ") + move_name(d.move) + " step");
    };
    auto single = [&]() -> const std::string& {
        if (d.clusters.size() != 1) throw RewriteError(std::string(move_name(d.move)) + " step needs one cluster");
        return *d.clusters.begin();
    };
    auto matches = [](const DerivationNode& child, const ProbTerm& t) {
        if (child.term.kind() != Estimand::Kind::term || !(child.term.as_term() == t)) {
            throw RewriteError("derivation step does not produce " + estimand_to_text(Estimand::term(t)));
        }
    };
    switch (d.move) {
        case Move::observed:
            expect_children(0);
            if (!is_observational(d.term)) throw RewriteError(estimand_to_text(d.term) + " is not observational");
            return d.term;
        case Move::rule: {
            expect_children(1);
            Estimand next = apply_rule(g, d.term, {0, d.rule, d.clusters, d.direction});
            matches(d.children[0], next.as_term());
            return replay(g, d.children[0]);
        }
        case Move::marginalize: {
            expect_children(2);
            const std::string& b = single();
            auto ts = terms(marginalize(d.term, 0, b));
            matches(d.children[0], ts[0]);
            matches(d.children[1], ts[1]);
            return Estimand::sum(Symbol{b, 0},
                                 Estimand::product({replay(g, d.children[0]), replay(g, d.children[1])}));
        }
        case Move::chain: {
            expect_children(2);
            auto ts = terms(chain_split(d.term, 0, single()));
            matches(d.children[0], ts[0]);
            matches(d.children[1], ts[1]);
            return Estimand::product({replay(g, d.children[0]), replay(g, d.children[1])});
        }
    }
    throw RewriteError("unknown move");
}

std::vector<std::string> derivation_trace(const DerivationNode& d) {
    std::vector<std::string> out;
    trace_into(d, 0, out);
    return out;
}

Verdict identify(const Scg& g, const VertexSet& y, const VertexSet& x, const SearchBudget& budget) {
    if (x.empty() || y.empty()) throw ArgumentError("treatment and outcome sets must be non-empty");
    check_disjoint({&y, &x});
    if (auto hedge = find_sc_hedge(g, x, y)) return NonIdentifiable{*hedge};
    if (g.size() > 64) throw ResourceError("identification search is limited to 64 vertices");

    Search search(g, budget);
    auto derivation = search.run(TermKey{to_bits(g.mask(y)), to_bits(g.mask(x)), 0});
    if (!derivation) return UnknownWithinBounds{budget, search.reason(), search.explored()};
    Estimand e = canonicalize(replay(g, *derivation));
    return Identifiable{std::move(e), std::move(*derivation)};
}

}  // namespace scgid
