#include <algorithm>

#include "doctest.h"
#include "figures.hpp"
#include "oracles.hpp"
#include "random_graphs.hpp"
#include "scgid/errors.hpp"
#include "scgid/io.hpp"
#include "scgid/unroll.hpp"

using namespace scgid;

namespace {

UnrollConfig sampled(int tmax, int max_lag, std::size_t count, std::uint64_t seed) {
    return UnrollConfig{0, tmax, max_lag, Sampled{count, seed}};
}

}  // namespace

TEST_CASE("a self-loop on a two-slice window") {
    Scg g({"X"}, {{"X", "X"}}, {});
    auto all = enumerate_compatible(g, UnrollConfig{0, 1, 1, Exhaustive{}});
    REQUIRE(all.size() == 1);
    CHECK(all[0].directed_edges() == std::vector<TemporalEdge>{{{"X", 0}, {"X", 1}}});
    CHECK(all[0].bidirected_edges().empty());
}

TEST_CASE("edgeless graph has a single realization") {
    Scg g({"A", "B"}, {}, {});
    auto all = enumerate_compatible(g, UnrollConfig{0, 3, 2, Exhaustive{}});
    REQUIRE(all.size() == 1);
    CHECK(all[0].directed_edges().empty());
    CHECK(all[0].size() == 8);
}

TEST_CASE("exhaustive enumeration yields distinct compatible graphs") {
    Scg g = fixtures::fig3b();
    auto all = enumerate_compatible(g, UnrollConfig{0, 1, 1, Exhaustive{}});
    // X->Y has 3 slots, X<->Y has 4, the self-loops one each
    CHECK(all.size() == 7 * 15);
    std::set<std::string> seen;
    for (const auto& ft : all) {
        CHECK(is_compatible(ft, g));
        CHECK(seen.insert(serialize_graph(ft)).second);
    }

    // the lazy form produces the same sequence
    CompatibleEnumerator it(g, UnrollConfig{0, 1, 1, Exhaustive{}});
    std::size_t k = 0;
    while (auto ft = it.next()) {
        REQUIRE(k < all.size());
        CHECK(*ft == all[k++]);
    }
    CHECK(k == all.size());
}

TEST_CASE("instantaneous cycles are never produced") {
    Scg g({"A", "B"}, {{"A", "B"}, {"B", "A"}}, {});
    auto all = enumerate_compatible(g, UnrollConfig{0, 1, 1, Exhaustive{}});
    for (const auto& ft : all) {
        CHECK(is_compatible(ft, g));
        CHECK_FALSE((ft.has_directed({"A", 0}, {"B", 0}) && ft.has_directed({"B", 0}, {"A", 0})));
    }
    // 7 x 7 subset pairs; 16 close a cycle in slice 0, 16 in slice 1, 4 in both
    CHECK(all.size() == 49 - 28);
}

TEST_CASE("sampling is deterministic and stays inside the exhaustive set") {
    Scg g = fixtures::fig3b();
    auto a = sample_compatible(g, sampled(1, 1, 30, 7));
    auto b = sample_compatible(g, sampled(1, 1, 30, 7));
    CHECK(a == b);
    auto c = sample_compatible(g, sampled(1, 1, 30, 8));
    CHECK(a != c);

    std::set<std::string> all;
    for (const auto& ft : enumerate_compatible(g, UnrollConfig{0, 1, 1, Exhaustive{}})) all.insert(serialize_graph(ft));
    for (const auto& ft : a) CHECK(all.count(serialize_graph(ft)) == 1);

    for (const auto& ft : sample_compatible(fixtures::fig1a(), sampled(4, 2, 20, 3))) {
        CHECK(is_compatible(ft, fixtures::fig1a()));
    }
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(validate(UnrollConfig{2, 1, 0, Exhaustive{}}), ArgumentError);
    CHECK_THROWS_AS(validate(UnrollConfig{0, 1, 2, Exhaustive{}}), ArgumentError);
    CHECK_THROWS_AS(validate(UnrollConfig{0, 1, -1, Exhaustive{}}), ArgumentError);
    CHECK_THROWS_AS(validate(sampled(1, 1, 0, 1)), ArgumentError);
    CHECK_THROWS_AS(sample_compatible(fixtures::fig3b(), UnrollConfig{}), ArgumentError);

    // a self-loop needs a lag of at least one
    Scg loop({"X"}, {{"X", "X"}}, {});
    CHECK_THROWS_AS(enumerate_compatible(loop, UnrollConfig{0, 0, 0, Exhaustive{}}), InfeasibleError);
    CHECK_THROWS_AS(sample_compatible(loop, UnrollConfig{0, 0, 0, Sampled{1, 1}}), InfeasibleError);
    CHECK_THROWS_AS(enumerate_compatible(fixtures::fig1a(), UnrollConfig{0, 4, 2, Exhaustive{}}), ResourceError);
}

TEST_CASE("completeness witness") {
    Scg g = fixtures::fig1a();
    auto p = find_active_path(g, {"X"}, {"Y"}, {"W"});
    REQUIRE(p);
    FtAdmg ft = completeness_witness(g, *p, {"W"});
    CHECK(ft.t0() == 0);
    CHECK(ft.tmax() == 3);
    CHECK(is_compatible(ft, g));
    CHECK_FALSE(is_blocked(ft, at_time(*p, 0), ft.cluster_vertices({"W"})));
    CHECK_FALSE(oracle::augmented_dsep(ft, {{"X", 0}}, {{"Y", 0}}, ft.cluster_vertices({"W"})));

    // a collider opened only through a descendant several steps away
    Scg v({"A", "B", "C", "D", "E"}, {{"A", "C"}, {"B", "C"}, {"C", "D"}, {"D", "E"}}, {});
    Path collider(Walk{{"A", "C", "B"}, {Link::forward, Link::backward}});
    FtAdmg w = completeness_witness(v, collider, {"E"});
    CHECK(is_compatible(w, v));
    CHECK_FALSE(is_blocked(w, at_time(collider, 0), w.cluster_vertices({"E"})));

    Path blocked(Walk{{"X", "W", "Y"}, {Link::forward, Link::forward}});
    CHECK_THROWS_AS(completeness_witness(g, blocked, {"W"}), ContractError);
    CHECK_THROWS_AS(completeness_witness(g, *p, {"W"}, 0, 2), ArgumentError);
}

TEST_CASE("completeness witness on random queries") {
    gen::Rng rng(51);
    int built = 0;
    for (int iter = 0; iter < 200; ++iter) {
        Scg g = gen::random_scg(rng, rng.between(2, 5), rng.unit() * 0.5);
        auto q = gen::random_query(rng, g);
        auto p = find_active_path(g, q.x, q.y, q.cond);
        if (!p) continue;
        ++built;
        FtAdmg ft = completeness_witness(g, *p, q.cond);
        CHECK(is_compatible(ft, g));
        CHECK_FALSE(dsep_clusters(ft, q.x, q.y, q.cond));
        CHECK_FALSE(oracle::augmented_dsep(ft, {{p->vertices().front(), 0}}, {{p->vertices().back(), 0}},
                                           ft.cluster_vertices(q.cond)));
    }
    CHECK(built > 50);
}

TEST_CASE("rule failure witnesses") {
    CausalQuery q{{"Y"}, {"X"}, {}, {}};
    FtAdmg b = rule_failure_witness(fixtures::fig3b(), 2, q);
    CHECK(is_compatible(b, fixtures::fig3b()));
    CHECK_FALSE(ft_rule_holds(b, 2, q));

    FtAdmg a = rule_failure_witness(fixtures::fig1a(), 2, q);
    CHECK(is_compatible(a, fixtures::fig1a()));
    CHECK_FALSE(ft_rule_holds(a, 2, q));

    CHECK_THROWS_AS(rule_failure_witness(fixtures::fig2a(), 2, q), ContractError);
}

TEST_CASE("at_time") {
    Path p(Walk{{"A", "B"}, {Link::bidirected}});
    TemporalPath t = at_time(p, 3);
    CHECK(t.vertices() == std::vector<TemporalVertex>{{"A", 3}, {"B", 3}});
    CHECK(t.links() == p.links());
}
