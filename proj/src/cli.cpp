#include "scgid/cli.hpp"

#include <algorithm>
#include <sstream>

#include "CLI11.hpp"
#include "scgid/errors.hpp"
#include "scgid/io.hpp"
#include "scgid/unroll.hpp"

namespace scgid {

namespace {

VertexSet parse_set(const std::string& text, const char* flag) {
    VertexSet out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        if (!is_identifier(item)) throw ArgumentError(std::string("invalid vertex name '") + item + "' in " + flag);
        out.insert(item);
    }
    return out;
}

std::string braces(const VertexSet& s) {
    std::string out = "{";
    for (const auto& v : s) out += (out.size() > 1 ? ", " : "") + v;
    return out + "}";
}

std::string describe(const CForest& f) {
    std::string out = braces(f.vertices);
    for (const auto& [a, b] : f.directed) out += "; " + a + " -> " + b;
    for (const auto& [a, b] : f.bidirected) out += "; " + a + " <-> " + b;
    return out;
}

void print_hedge(std::ostream& out, const Hedge& h) {
    out << "F  = " << describe(h.f) << "\n";
    out << "F' = " << describe(h.f_prime) << "\n";
    out << "R  = " << braces(h.roots) << "\n";
}

struct Options {
    std::string graph;
    bool json = false;
    bool verbose = false;
    std::string x, y, cond, u, w;
    int rule = 0;
    SearchBudget budget;
    bool dot = false;
    int t0 = 0;
    int tmax = 0;
    int max_lag = 1;
    bool all = false;
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    int witness_tmax = -1;
};

class Runner {
public:
    Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

    Graph load() const {
        return parse_graph(read_file(o_.graph));
    }

    Scg load_scg() const {
        Graph g = load();
        if (!std::holds_alternative<Scg>(g)) throw ArgumentError(o_.graph + " is not an scg document");
        return std::get<Scg>(std::move(g));
    }

    void emit(const Json& j) const { out_ << dump(j) << "\n"; }

    int dsep_cmd() const {
        VertexSet x = parse_set(o_.x, "--x"), y = parse_set(o_.y, "--y"), c = parse_set(o_.cond, "--cond");
        Graph g = load();
        if (const auto* ft = std::get_if<FtAdmg>(&g)) {
            auto witness = find_active_path(*ft, ft->cluster_vertices(x), ft->cluster_vertices(y), ft->cluster_vertices(c));
            if (o_.json) {
                emit(dsep_result(x, y, c, witness));
            } else {
                out_ << (witness ? "not separated\nactive path: " + to_string(*witness) : std::string("separated")) << "\n";
            }
            return witness ? exit_no : exit_yes;
        }
        auto witness = find_active_path(std::get<Scg>(g), x, y, c);
        if (o_.json) {
            emit(dsep_result(x, y, c, witness));
        } else {
            out_ << (witness ? "not separated\nactive path: " + to_string(*witness) : std::string("separated")) << "\n";
        }
        return witness ? exit_no : exit_yes;
    }

    int rule_cmd() const {
        CausalQuery q{parse_set(o_.y, "--y"), parse_set(o_.x, "--x"), parse_set(o_.u, "--u"), parse_set(o_.w, "--w")};
        Scg g = load_scg();
        RuleCheck check = rule_applicable(g, o_.rule, q);
        if (o_.json) {
            emit(rule_result(q, check));
        } else {
            out_ << "rule " << check.rule << ": " << (check.applicable ? "applicable" : "not applicable") << "\n";
            out_ << "tested " << braces(check.dsep_y) << " _||_ " << braces(check.dsep_x) << " | "
                 << braces(check.dsep_cond) << " with topbar " << braces(check.mutilation.topbar) << ", underbar "
                 << braces(check.mutilation.underbar) << "\n";
            if (check.witness) out_ << "active path: " << to_string(*check.witness) << "\n";
        }
        return check.applicable ? exit_yes : exit_no;
    }

    int identify_cmd() const {
        VertexSet x = parse_set(o_.x, "--x"), y = parse_set(o_.y, "--y");
        Scg g = load_scg();
        Verdict v = identify(g, y, x, o_.budget);
        if (o_.json) emit(identify_result(y, x, v));
        if (const auto* id = std::get_if<Identifiable>(&v)) {
            if (!o_.json) {
                out_ << "identifiable\n" << estimand_to_text(id->derivation.term) << " = " << estimand_to_text(id->estimand)
                     << "\n";
                if (o_.verbose) {
                    for (const auto& line : derivation_trace(id->derivation)) out_ << "  " << line << "\n";
                }
            }
            return exit_yes;
        }
        if (const auto* non = std::get_if<NonIdentifiable>(&v)) {
            if (!o_.json) {
                out_ << "not identifiable: SC-Hedge\n";
                print_hedge(out_, non->hedge);
            }
            return exit_no;
        }
        const auto& unk = std::get<UnknownWithinBounds>(v);
        if (!o_.json) out_ << "unknown within bounds: " << unk.reason << " (" << unk.explored << " terms explored)\n";
        return exit_unknown;
    }

    int hedge_cmd() const {
        VertexSet x = parse_set(o_.x, "--x"), y = parse_set(o_.y, "--y");
        Scg g = load_scg();
        auto h = find_sc_hedge(g, x, y);
        if (o_.json) {
            emit(hedge_result(y, x, h));
        } else if (h) {
            print_hedge(out_, *h);
        } else {
            out_ << "none\n";
        }
        return h ? exit_yes : exit_no;
    }

    int scproject_cmd() const {
        Scg g = load_scg();
        Scg p = sc_projection(g);
        if (o_.json) {
            emit(graph_result(p));
        } else if (o_.dot) {
            DotHighlights<std::string> hl;
            for (const auto& e : p.bidirected_edges()) {
                if (!g.has_bidirected(e.first, e.second)) hl.bidirected.insert(e);
            }
            out_ << to_dot(p, hl);
        } else {
            out_ << serialize_graph(p);
        }
        return exit_yes;
    }

    int project_cmd() const {
        Graph g = load();
        const auto* ft = std::get_if<FtAdmg>(&g);
        if (!ft) throw ArgumentError(o_.graph + " is not an ftadmg document");
        Scg s = project(*ft);
        if (o_.json) {
            emit(graph_result(s));
        } else if (o_.dot) {
            out_ << to_dot(s);
        } else {
            out_ << serialize_graph(s);
        }
        return exit_yes;
    }

    int unroll_cmd() const {
        Scg g = load_scg();
        UnrollConfig cfg;
        cfg.t0 = o_.t0;
        cfg.tmax = o_.tmax;
        cfg.max_lag = o_.max_lag;
        std::vector<FtAdmg> gs;
        if (o_.all) {
            gs = enumerate_compatible(g, cfg);
        } else {
            cfg.mode = Sampled{o_.sample, o_.seed};
            gs = sample_compatible(g, cfg);
        }
        if (o_.json) {
            emit(graphs_result(gs));
        } else {
            for (std::size_t i = 0; i < gs.size(); ++i) out_ << (i ? "\n" : "") << serialize_graph(gs[i]);
        }
        return exit_yes;
    }

    int witness_cmd(std::ostream& err) const {
        VertexSet x = parse_set(o_.x, "--x"), y = parse_set(o_.y, "--y"), c = parse_set(o_.cond, "--cond");
        Scg g = load_scg();
        auto path = find_active_path(g, x, y, c);
        if (!path) {
            err << "error: " << braces(x) << " and " << braces(y) << " are separated given " << braces(c)
                << ", there is nothing to witness\n";
            return exit_no;
        }
        int tmax = o_.witness_tmax >= 0 ? o_.witness_tmax : static_cast<int>(g.size());
        FtAdmg ft = completeness_witness(g, *path, c, 0, tmax);
        if (o_.json) {
            emit(witness_result(x, y, c, *path, ft));
        } else {
            out_ << "# active path: " << to_string(*path) << "\n" << serialize_graph(ft);
        }
        return exit_yes;
    }

private:
    const Options& o_;
    std::ostream& out_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Identification queries on summary causal graphs", "scgid"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--graph", o.graph, "graph file (.scg or .ftg)")->required();
        sub->add_flag("--json", o.json, "print a JSON result document");
        sub->add_flag("--verbose", o.verbose, "print derivation details");
    };
    auto pair = [&](CLI::App* sub) {
        sub->add_option("--x", o.x, "comma-separated treatment / first set")->required();
        sub->add_option("--y", o.y, "comma-separated outcome / second set")->required();
    };

    auto* dsep_cmd = app.add_subcommand("dsep", "macro d-separation of X and Y given cond");
    common(dsep_cmd);
    pair(dsep_cmd);
    dsep_cmd->add_option("--cond", o.cond, "conditioning set");

    auto* rule_cmd = app.add_subcommand("rule", "check a do-calculus rule on P(y | do(u), do(x), w)");
    common(rule_cmd);
    pair(rule_cmd);
    rule_cmd->add_option("--rule", o.rule, "1, 2 or 3")->required();
    rule_cmd->add_option("--u", o.u, "intervened context");
    rule_cmd->add_option("--w", o.w, "observed context");

    auto* identify_cmd = app.add_subcommand("identify", "identify P(y | do(x))");
    common(identify_cmd);
    pair(identify_cmd);
    identify_cmd->add_option("--max-depth", o.budget.max_depth, "rewrite distance bound")->capture_default_str();
    identify_cmd->add_option("--max-size", o.budget.max_size, "estimand size bound")->capture_default_str();
    identify_cmd->add_option("--max-terms", o.budget.max_terms, "explored term bound")->capture_default_str();

    auto* hedge_cmd = app.add_subcommand("hedge", "search an SC-Hedge for P(y | do(x))");
    common(hedge_cmd);
    pair(hedge_cmd);

    auto* scproject_cmd = app.add_subcommand("scproject", "SC-projection of an scg");
    common(scproject_cmd);
    scproject_cmd->add_flag("--dot", o.dot, "print DOT with added edges highlighted");

    auto* project_cmd = app.add_subcommand("project", "collapse an ftadmg to its scg");
    common(project_cmd);
    project_cmd->add_flag("--dot", o.dot, "print DOT");

    auto* unroll_cmd = app.add_subcommand("unroll", "compatible full-time graphs of an scg");
    common(unroll_cmd);
    unroll_cmd->add_option("--t0", o.t0, "first time index")->capture_default_str();
    unroll_cmd->add_option("--tmax", o.tmax, "last time index")->required();
    unroll_cmd->add_option("--max-lag", o.max_lag, "largest lag")->capture_default_str();
    auto* all = unroll_cmd->add_flag("--all", o.all, "enumerate every compatible graph");
    auto* sample = unroll_cmd->add_option("--sample", o.sample, "number of sampled graphs");
    unroll_cmd->add_option("--seed", o.seed, "sampling seed")->needs(sample);
    all->excludes(sample);

    auto* witness_cmd = app.add_subcommand("witness", "compatible ftadmg in which X and Y are d-connected");
    common(witness_cmd);
    pair(witness_cmd);
    witness_cmd->add_option("--cond", o.cond, "conditioning set");
    witness_cmd->add_option("--tmax", o.witness_tmax, "last time index (default |S|)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_yes;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    if (unroll_cmd->parsed() && !o.all && sample->count() == 0) {
        err << "error: unroll needs --all or --sample\n";
        return exit_usage;
    }

    try {
        Runner r(o, out);
        if (dsep_cmd->parsed()) return r.dsep_cmd();
        if (rule_cmd->parsed()) return r.rule_cmd();
        if (identify_cmd->parsed()) return r.identify_cmd();
        if (hedge_cmd->parsed()) return r.hedge_cmd();
        if (scproject_cmd->parsed()) return r.scproject_cmd();
        if (project_cmd->parsed()) return r.project_cmd();
        if (unroll_cmd->parsed()) return r.unroll_cmd();
        if (witness_cmd->parsed()) return r.witness_cmd(err);
    } catch (const ParseError& e) {
        err << "error: " << o.graph << ":" << e.line() << ":" << e.column() << ": " << e.message() << "\n";
        return exit_usage;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << "\n";
        return exit_resource;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

}  // namespace scgid
