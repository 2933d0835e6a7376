// One PASS/FAIL line per acceptance criterion; exit status is non-zero if any fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "figures.hpp"
#include "oracles.hpp"
#include "random_graphs.hpp"
#include "scgid/docalculus.hpp"
#include "scgid/dsep.hpp"
#include "scgid/errors.hpp"
#include "scgid/hedge.hpp"
#include "scgid/io.hpp"
#include "scgid/unroll.hpp"

using namespace scgid;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::string detail;
    std::size_t cases = 0;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

std::string braces(const VertexSet& s) {
    std::string out = "{";
    for (const auto& v : s) out += (out.size() > 1 ? "," : "") + v;
    return out + "}";
}

std::string join(const VertexSet& s) {
    std::string out;
    for (const auto& v : s) out += (out.empty() ? "" : ",") + v;
    return out;
}

Symbol sym(const std::string& c, int primes = 0) { return Symbol{c, primes}; }

Estimand P(SymbolSet t, SymbolSet c = {}) { return Estimand::term(ProbTerm{std::move(t), std::move(c), {}}); }

// ---- 1 --------------------------------------------------------------------

Outcome golden_identify() {
    Outcome o;
    auto start = Clock::now();
    const Estimand direct = P({sym("Y")}, {sym("X")});
    const Estimand front_door = Estimand::sum(
        sym("W"),
        Estimand::product({P({sym("W")}, {sym("X")}),
                           Estimand::sum(sym("X", 1), Estimand::product({P({sym("Y")}, {sym("W"), sym("X", 1)}),
                                                                         P({sym("X", 1)})}))}));
    const std::vector<std::pair<std::string, Scg>> identifiable = {
        {"2a", fixtures::fig2a()}, {"2b", fixtures::fig2b()}, {"2c", fixtures::fig2c()}};
    for (const auto& [name, g] : identifiable) {
        ++o.cases;
        Verdict v = identify(g, {"Y"}, {"X"});
        const auto* id = std::get_if<Identifiable>(&v);
        if (!id) {
            o.fail("fig" + name + " not identified");
            continue;
        }
        const Estimand& want = name == "2b" ? front_door : direct;
        if (!(id->estimand == want)) o.fail("fig" + name + " gave " + estimand_to_text(id->estimand));
        if (!(replay(g, id->derivation) == id->estimand)) o.fail("fig" + name + " derivation does not replay");
    }
    const std::vector<std::pair<std::string, Scg>> hedged = {
        {"1a", fixtures::fig1a()}, {"3a", fixtures::fig3a()}, {"3b", fixtures::fig3b()}, {"3c", fixtures::fig3c()}};
    for (const auto& [name, g] : hedged) {
        ++o.cases;
        Verdict v = identify(g, {"Y"}, {"X"});
        const auto* non = std::get_if<NonIdentifiable>(&v);
        if (!non) {
            o.fail("fig" + name + " not reported non-identifiable");
        } else if (!is_hedge(sc_projection(g), non->hedge, {"X"}, {"Y"})) {
            o.fail("fig" + name + " hedge does not validate");
        }
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    if (ms >= 5000) o.fail("took " + std::to_string(ms) + " ms");
    return o;
}

// ---- 2 --------------------------------------------------------------------

Outcome golden_projection() {
    Outcome o;
    const std::vector<std::tuple<std::string, Scg, Scg>> cases = {{"1a/4a", fixtures::fig1a(), fixtures::fig4a()},
                                                                  {"3a/4b", fixtures::fig3a(), fixtures::fig4b()},
                                                                  {"3b/4c", fixtures::fig3b(), fixtures::fig4c()},
                                                                  {"3c/4d", fixtures::fig3c(), fixtures::fig4d()}};
    for (const auto& [name, g, want] : cases) {
        ++o.cases;
        if (!(sc_projection(g) == want)) o.fail("fig" + name + " differs");
    }
    return o;
}

// ---- 3 --------------------------------------------------------------------

Outcome soundness() {
    Outcome o;
    gen::Rng rng(1001);
    std::size_t separated = 0;
    for (int iter = 0; iter < 200; ++iter) {
        Scg g = gen::random_scg(rng, rng.between(2, 6), rng.unit() * 0.5);
        auto q = gen::random_query(rng, g);
        ++o.cases;
        if (!dsep(g, q.x, q.y, q.cond)) continue;
        ++separated;
        for (const auto& ft : sample_compatible(g, UnrollConfig{0, 4, 2, Sampled{20, rng.raw()}})) {
            if (!dsep_clusters(ft, q.x, q.y, q.cond) || !oracle::augmented_dsep_clusters(ft, q.x, q.y, q.cond)) {
                o.fail("counterexample: " + braces(q.x) + " vs " + braces(q.y) + " given " + braces(q.cond) + " in\n" +
                       serialize_graph(g));
            }
        }
    }
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(separated) + " separated queries";
    return o;
}

// ---- 4 --------------------------------------------------------------------

Outcome completeness() {
    Outcome o;
    gen::Rng rng(1002);
    while (o.cases < 200) {
        Scg g = gen::random_scg(rng, rng.between(2, 6), rng.unit() * 0.5);
        auto q = gen::random_query(rng, g);
        auto path = find_active_path(g, q.x, q.y, q.cond);
        if (!path) continue;
        ++o.cases;
        FtAdmg ft = completeness_witness(g, *path, q.cond);
        if (!is_compatible(ft, g)) o.fail("witness not compatible");
        if (oracle::augmented_dsep_clusters(ft, q.x, q.y, q.cond)) {
            o.fail("witness separates " + braces(q.x) + " and " + braces(q.y));
        }
    }
    return o;
}

// ---- 5 --------------------------------------------------------------------

Outcome mutilation_commutes() {
    Outcome o;
    gen::Rng rng(1003);
    for (int iter = 0; iter < 200; ++iter) {
        ++o.cases;
        Scg g = gen::random_scg(rng, rng.between(1, 6), rng.unit() * 0.5);
        FtAdmg ft = sample_compatible(g, UnrollConfig{0, 4, 2, Sampled{1, rng.raw()}}).front();
        ScgMutilation spec{gen::random_subset(rng, g.vertices(), 0.4), gen::random_subset(rng, g.vertices(), 0.4)};
        if (!(project(ft) == g)) o.fail("sample does not project back");
        if (!(project(mutilate_clusters(ft, spec)) == mutilate(project(ft), spec))) {
            o.fail("mismatch for topbar " + braces(spec.topbar) + ", underbar " + braces(spec.underbar));
        }
    }
    return o;
}

// ---- 6 --------------------------------------------------------------------

Outcome primary_paths() {
    Outcome o;
    gen::Rng rng(1004);
    while (o.cases < 500) {
        Scg g = gen::random_scg(rng, rng.between(2, 6), 0.2 + rng.unit() * 0.3);
        Walk w = gen::random_walk(rng, g, rng.between(1, 12));
        if (w.links.empty()) continue;
        VertexSet cond;
        for (const auto& v : g.vertices()) {
            if (v != w.vertices.front() && v != w.vertices.back() && rng.chance(0.3)) cond.insert(v);
        }
        if (is_blocked(g, w, cond)) continue;
        ++o.cases;
        try {
            Path p = primary_path(w);
            if (p.vertices().front() != w.vertices.front() || p.vertices().back() != w.vertices.back()) {
                o.fail("endpoints changed for " + to_string(w));
            }
            if (is_blocked(g, p, cond)) o.fail("primary path of " + to_string(w) + " is blocked");
        } catch (const Error& e) {
            o.fail(to_string(w) + ": " + e.what());
        }
    }
    return o;
}

// ---- 7 --------------------------------------------------------------------

// Rule separation on a full-time graph, mutilated by the library and
// separated by the augmented-graph oracle.
bool oracle_rule_holds(const FtAdmg& ft, int rule, const CausalQuery& q) {
    const TemporalSet vx = ft.cluster_vertices(q.x), vu = ft.cluster_vertices(q.u);
    MutilationSpec<TemporalVertex> spec{vu, {}};
    if (rule == 2) spec.underbar = vx;
    if (rule == 3) {
        // X(W): members of V^X that are not ancestors of V^W once edges into V^U are cut.
        const FtAdmg cut = mutilate(ft, MutilationSpec<TemporalVertex>{vu, {}});
        const TemporalSet an = oracle::closure(ft.cluster_vertices(q.w), cut.directed_edges(), false);
        for (const auto& v : vx) {
            if (!an.count(v)) spec.topbar.insert(v);
        }
    }
    VertexSet cond = q.u;
    cond.insert(q.w.begin(), q.w.end());
    return oracle::augmented_dsep_clusters(mutilate(ft, spec), q.x, q.y, cond);
}

CausalQuery random_rule_query(gen::Rng& rng, const Scg& g) {
    CausalQuery q;
    std::vector<std::string> vs = g.vertices();
    rng.shuffle(vs);
    q.y.insert(vs[0]);
    q.x.insert(vs[1]);
    for (std::size_t i = 2; i < vs.size(); ++i) {
        int r = rng.between(0, 4);
        if (r == 0) q.y.insert(vs[i]);
        if (r == 1) q.x.insert(vs[i]);
        if (r == 2) q.u.insert(vs[i]);
        if (r == 3) q.w.insert(vs[i]);
    }
    return q;
}

Outcome rule_witnesses() {
    Outcome o;
    gen::Rng rng(1005);
    while (o.cases < 100) {
        Scg g = gen::random_scg(rng, rng.between(2, 5), rng.unit() * 0.5);
        CausalQuery q = random_rule_query(rng, g);
        int rule = rng.between(1, 3);
        if (rule_applicable(g, rule, q).applicable) continue;
        ++o.cases;
        FtAdmg ft = rule_failure_witness(g, rule, q);
        std::string where = "rule " + std::to_string(rule) + " y=" + braces(q.y) + " x=" + braces(q.x) +
                            " u=" + braces(q.u) + " w=" + braces(q.w) + " in\n" + serialize_graph(g);
        if (!is_compatible(ft, g)) o.fail("witness not compatible: " + where);
        if (ft_rule_holds(ft, rule, q) || oracle_rule_holds(ft, rule, q)) o.fail("separation holds: " + where);
    }
    return o;
}

// ---- 8 --------------------------------------------------------------------

Outcome oracle_equivalence() {
    Outcome o;
    gen::Rng rng(1006);
    for (int iter = 0; iter < 50; ++iter) {
        Scg g = gen::random_scg(rng, rng.between(2, 5), rng.unit() * 0.5);
        const auto& vs = g.vertices();
        std::size_t total = 1;
        for (std::size_t i = 0; i < vs.size(); ++i) total *= 4;
        // every assignment of each vertex to x, y, cond or nothing
        for (std::size_t code = 0; code < total; ++code) {
            VertexSet x, y, c;
            std::size_t k = code;
            for (const auto& v : vs) {
                std::size_t r = k % 4;
                k /= 4;
                if (r == 1) x.insert(v);
                if (r == 2) y.insert(v);
                if (r == 3) c.insert(v);
            }
            if (x.empty() || y.empty()) continue;
            ++o.cases;
            if (dsep(g, x, y, c) != oracle::path_dsep(g, x, y, c)) {
                o.fail("dsep mismatch on " + braces(x) + " " + braces(y) + " " + braces(c) + " in\n" +
                       serialize_graph(g));
            }
        }
    }
    for (int iter = 0; iter < 30; ++iter) {
        Scg g = gen::random_scg(rng, rng.between(2, 5), rng.unit() * 0.5);
        const auto& vs = g.vertices();
        std::size_t total = 1;
        for (std::size_t i = 0; i < vs.size(); ++i) total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            VertexSet x, y;
            std::size_t k = code;
            for (const auto& v : vs) {
                std::size_t r = k % 3;
                k /= 3;
                if (r == 1) x.insert(v);
                if (r == 2) y.insert(v);
            }
            if (x.empty() || y.empty()) continue;
            ++o.cases;
            auto h = find_hedge(g, x, y);
            if (h.has_value() != oracle::hedge_exists(g, x, y)) {
                o.fail("hedge mismatch on " + braces(x) + " " + braces(y) + " in\n" + serialize_graph(g));
            }
            if (h && !is_hedge(g, *h, x, y)) o.fail("returned hedge does not validate");
        }
    }
    return o;
}

// ---- 9 --------------------------------------------------------------------

Outcome hedge_blocks_identification() {
    Outcome o;
    gen::Rng rng(1007);
    for (int iter = 0; iter < 100; ++iter) {
        Scg g = gen::random_scg(rng, rng.between(2, 5), rng.unit() * 0.5);
        auto q = gen::random_query(rng, g);
        ++o.cases;
        auto h = find_sc_hedge(g, q.x, q.y);
        Verdict v = identify(g, q.y, q.x);
        if (h && std::holds_alternative<Identifiable>(v)) {
            o.fail("identified despite a hedge: " + braces(q.y) + " do " + braces(q.x) + " in\n" + serialize_graph(g));
        }
    }
    return o;
}

// ---- 10 -------------------------------------------------------------------

// Runs the installed command line; returns its standard output and exit code.
std::pair<std::string, int> shell(const std::string& args) {
    std::string cmd = std::string("\"") + SCGID_CLI_PATH + "\" " + args + " 2>/dev/null";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
    if (!pipe) return {"", -1};
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
    int status = pclose(pipe.release());
    return {out, WIFEXITED(status) ? WEXITSTATUS(status) : -1};
}

Outcome round_trip_and_cli() {
    Outcome o;
    gen::Rng rng(1008);
    for (int iter = 0; iter < 250; ++iter) {
        Scg g = gen::random_scg(rng, rng.between(0, 7), rng.unit() * 0.6);
        o.cases += 2;
        if (!(parse_scg(serialize_graph(g)) == g)) o.fail("scg round trip failed:\n" + serialize_graph(g));
        FtAdmg ft = gen::random_ftadmg(rng, rng.between(1, 4), rng.between(-3, 3), 3, rng.unit() * 0.3);
        if (!(parse_ftadmg(serialize_graph(ft)) == ft)) o.fail("ftadmg round trip failed:\n" + serialize_graph(ft));
    }

    auto expect = [&](const std::string& args, const Json& want) {
        ++o.cases;
        auto [out, code] = shell(args + " --json");
        if (code < 0 || out != dump(want) + "\n") o.fail("CLI output differs for: " + args);
    };
    auto file = [](const char* f) { return "--graph \"" + fixtures::data_path(f) + "\""; };

    const std::vector<std::pair<const char*, Scg>> scgs = {{"fig1a.scg", fixtures::fig1a()}, {"fig2a.scg", fixtures::fig2a()},
                                                           {"fig2b.scg", fixtures::fig2b()}, {"fig2c.scg", fixtures::fig2c()},
                                                           {"fig3a.scg", fixtures::fig3a()}, {"fig3b.scg", fixtures::fig3b()},
                                                           {"fig3c.scg", fixtures::fig3c()}};
    for (const auto& [f, g] : scgs) {
        const VertexSet x{"X"}, y{"Y"}, w = g.contains("W") ? VertexSet{"W"} : VertexSet{};
        const std::string sets = " --x X --y Y" + (w.empty() ? std::string() : " --cond " + join(w));
        expect("dsep " + file(f) + sets, dsep_result(x, y, w, find_active_path(g, x, y, w)));
        for (int rule = 1; rule <= 3; ++rule) {
            CausalQuery q{y, x, {}, w};
            std::string args = "rule " + file(f) + " --rule " + std::to_string(rule) + " --y Y --x X" +
                               (w.empty() ? std::string() : " --w W");
            expect(args, rule_result(q, rule_applicable(g, rule, q)));
        }
        expect("identify " + file(f) + " --x X --y Y", identify_result(y, x, identify(g, y, x)));
        expect("hedge " + file(f) + " --x X --y Y", hedge_result(y, x, find_sc_hedge(g, x, y)));
        expect("scproject " + file(f), graph_result(sc_projection(g)));
        expect("unroll " + file(f) + " --tmax 4 --max-lag 2 --sample 3 --seed 17",
               graphs_result(sample_compatible(g, UnrollConfig{0, 4, 2, Sampled{3, 17}})));
        if (auto path = find_active_path(g, x, y, w)) {
            expect("witness " + file(f) + sets, witness_result(x, y, w, *path, completeness_witness(g, *path, w)));
        }
    }
    expect("unroll " + file("fig3b.scg") + " --tmax 1 --all",
           graphs_result(enumerate_compatible(fixtures::fig3b(), UnrollConfig{0, 1, 1, Exhaustive{}})));
    for (const char* f : {"fig1b.ftg", "fig1c.ftg"}) {
        FtAdmg ft = parse_ftadmg(read_file(fixtures::data_path(f)));
        expect(std::string("project ") + file(f), graph_result(project(ft)));
        expect(std::string("dsep ") + file(f) + " --x X --y Y --cond W",
               dsep_result({"X"}, {"Y"}, {"W"},
                           find_active_path(ft, ft.cluster_vertices({"X"}), ft.cluster_vertices({"Y"}),
                                            ft.cluster_vertices({"W"}))));
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"golden identification of the worked examples", golden_identify},
        {"golden SC-projections", golden_projection},
        {"soundness of SCG d-separation on sampled full-time graphs", soundness},
        {"completeness witnesses are d-connected", completeness},
        {"mutilation commutes with projection", mutilation_commutes},
        {"primary paths of active walks are active", primary_paths},
        {"rule rejections have failing full-time witnesses", rule_witnesses},
        {"reachability and hedge search match exhaustive oracles", oracle_equivalence},
        {"a hedge rules out identification", hedge_blocks_identification},
        {"parser round trip and CLI JSON parity", round_trip_and_cli},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
        std::cout << (o.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " (" << o.cases
                  << " cases, " << ms << " ms)";
        if (!o.detail.empty()) std::cout << ": " << o.detail;
        std::cout << std::endl;
        failed += o.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
