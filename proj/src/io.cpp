#include "scgid/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "scgid/errors.hpp"

namespace scgid {

namespace {

struct Token {
    enum class Type { ident, integer, arrow, biarrow, lbracket, rbracket, equals, semicolon, end };
    Type type = Type::end;
    std::string text;
    std::size_t line = 1, column = 1;
};

const char* describe(Token::Type t) {
    switch (t) {
        case Token::Type::ident: return "a name";
        case Token::Type::integer: return "an integer";
        case Token::Type::arrow: return "'->'";
        case Token::Type::biarrow: return "'<->'";
        case Token::Type::lbracket: return "'['";
        case Token::Type::rbracket: return "']'";
        case Token::Type::equals: return "'='";
        case Token::Type::semicolon: return "';'";
        case Token::Type::end: return "end of input";
    }
    return "?";
}

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto is_alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    auto bump = [&](std::size_t n) {
        i += n;
        col += n;
    };
    while (i < s.size()) {
        char c = s[i];
        if (c == '\n') {
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            bump(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') bump(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        std::size_t start = i;
        if (is_alpha(c)) {
            while (i < s.size() && (is_alpha(s[i]) || is_digit(s[i]))) bump(1);
            t.type = Token::Type::ident;
        } else if (is_digit(c) || (c == '-' && i + 1 < s.size() && is_digit(s[i + 1]))) {
            bump(1);
            while (i < s.size() && is_digit(s[i])) bump(1);
            t.type = Token::Type::integer;
        } else if (s.substr(i, 2) == "->") {
            bump(2);
            t.type = Token::Type::arrow;
        } else if (s.substr(i, 3) == "<->") {
            bump(3);
            t.type = Token::Type::biarrow;
        } else if (c == '[' || c == ']' || c == '=' || c == ';') {
            bump(1);
            t.type = c == '[' ? Token::Type::lbracket
                   : c == ']' ? Token::Type::rbracket
                   : c == '=' ? Token::Type::equals
                              : Token::Type::semicolon;
        } else {
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(s.substr(start, i - start));
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    GraphDocument document() {
        GraphDocument doc;
        keyword("graph");
        const Token& kind = expect(Token::Type::ident);
        if (kind.text == "scg") {
            doc.kind = GraphDocument::Kind::scg;
        } else if (kind.text == "ftadmg") {
            doc.kind = GraphDocument::Kind::ftadmg;
            keyword("t0");
            expect(Token::Type::equals);
            doc.t0 = integer();
            keyword("tmax");
            expect(Token::Type::equals);
            const Token& at = peek();
            doc.tmax = integer();
            if (doc.tmax < doc.t0) throw ParseError(at.line, at.column, "tmax must not be smaller than t0");
        } else {
            throw ParseError(kind.line, kind.column, "expected 'scg' or 'ftadmg', found '" + kind.text + "'");
        }
        const bool timed = doc.kind == GraphDocument::Kind::ftadmg;
        while (peek().type != Token::Type::end) {
            Statement st;
            st.line = peek().line;
            st.column = peek().column;
            if (peek().type == Token::Type::ident && peek().text == "node" &&
                peek(1).type == Token::Type::ident) {
                ++pos_;
                st.kind = Statement::Kind::node;
                st.a.name = expect(Token::Type::ident).text;
            } else {
                st.a = vertex(timed);
                const Token& op = next();
                if (op.type == Token::Type::arrow) {
                    st.kind = Statement::Kind::directed;
                } else if (op.type == Token::Type::biarrow) {
                    st.kind = Statement::Kind::bidirected;
                } else {
                    throw ParseError(op.line, op.column, std::string("expected '->' or '<->', found ") + describe(op.type));
                }
                st.b = vertex(timed);
            }
            if (peek().type == Token::Type::semicolon) ++pos_;
            doc.statements.push_back(std::move(st));
        }
        return doc;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

    const Token& next() {
        const Token& t = peek();
        if (t.type != Token::Type::end) ++pos_;
        return t;
    }

    const Token& expect(Token::Type type) {
        const Token& t = next();
        if (t.type != type) {
            throw ParseError(t.line, t.column, std::string("expected ") + describe(type) + ", found " +
                                                   (t.type == Token::Type::end ? describe(t.type) : "'" + t.text + "'"));
        }
        return t;
    }

    void keyword(const char* word) {
        const Token& t = peek();
        if (t.type != Token::Type::ident || t.text != word) {
            throw ParseError(t.line, t.column, std::string("expected '") + word + "'");
        }
        ++pos_;
    }

    int integer() {
        const Token& t = expect(Token::Type::integer);
        int value = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
            throw ParseError(t.line, t.column, "integer '" + t.text + "' out of range");
        }
        return value;
    }

    TemporalVertex vertex(bool timed) {
        TemporalVertex v;
        v.name = expect(Token::Type::ident).text;
        if (peek().type == Token::Type::lbracket) {
            const Token& open = peek();
            if (!timed) throw ParseError(open.line, open.column, "time index in an scg document");
            ++pos_;
            v.t = integer();
            expect(Token::Type::rbracket);
        } else if (timed) {
            const Token& t = peek();
            throw ParseError(t.line, t.column, "expected '[' with a time index after '" + v.name + "'");
        }
        return v;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

Scg build_scg(const GraphDocument& doc) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    std::set<NamedEdge> directed, bidirected;
    auto declare = [&](const std::string& n) {
        if (seen.insert(n).second) names.push_back(n);
    };
    for (const auto& st : doc.statements) {
        declare(st.a.name);
        if (st.kind == Statement::Kind::node) continue;
        declare(st.b.name);
        if (st.kind == Statement::Kind::directed) {
            if (!directed.emplace(st.a.name, st.b.name).second) {
                throw ParseError(st.line, st.column, "duplicate edge " + st.a.name + " -> " + st.b.name);
            }
        } else {
            auto e = std::minmax(st.a.name, st.b.name);
            if (!bidirected.emplace(e.first, e.second).second) {
                throw ParseError(st.line, st.column, "duplicate edge " + st.a.name + " <-> " + st.b.name);
            }
        }
    }
    return Scg(names, {directed.begin(), directed.end()}, {bidirected.begin(), bidirected.end()});
}

FtAdmg build_ft(const GraphDocument& doc) {
    std::vector<std::string> names;
    std::set<std::string> seen;
    std::set<TemporalEdge> directed, bidirected;
    std::map<TemporalVertex, std::vector<TemporalVertex>> out;
    auto reaches = [&](const TemporalVertex& from, const TemporalVertex& to) {
        std::set<TemporalVertex> visited{from};
        std::vector<TemporalVertex> stack{from};
        while (!stack.empty()) {
            TemporalVertex v = stack.back();
            stack.pop_back();
            if (v == to) return true;
            for (const auto& w : out[v]) {
                if (visited.insert(w).second) stack.push_back(w);
            }
        }
        return false;
    };
    for (const auto& st : doc.statements) {
        auto fail = [&](const std::string& msg) { throw ParseError(st.line, st.column, msg); };
        if (seen.insert(st.a.name).second) names.push_back(st.a.name);
        if (st.kind == Statement::Kind::node) continue;
        if (seen.insert(st.b.name).second) names.push_back(st.b.name);
        for (const auto* v : {&st.a, &st.b}) {
            if (v->t < doc.t0 || v->t > doc.tmax) {
                fail("time index " + std::to_string(v->t) + " of " + v->name + " outside window [" +
                     std::to_string(doc.t0) + ", " + std::to_string(doc.tmax) + "]");
            }
        }
        if (st.a == st.b) fail("self edge at " + to_string(st.a));
        if (st.kind == Statement::Kind::directed) {
            std::string text = to_string(st.a) + " -> " + to_string(st.b);
            if (st.a.t > st.b.t) fail("edge " + text + " goes back in time");
            if (!directed.emplace(st.a, st.b).second) fail("duplicate edge " + text);
            if (reaches(st.b, st.a)) fail("edge " + text + " closes a directed cycle");
            out[st.a].push_back(st.b);
        } else {
            auto e = std::minmax(st.a, st.b);
            if (!bidirected.emplace(e.first, e.second).second) {
                fail("duplicate edge " + to_string(st.a) + " <-> " + to_string(st.b));
            }
        }
    }
    return FtAdmg(names, doc.t0, doc.tmax, {directed.begin(), directed.end()}, {bidirected.begin(), bidirected.end()});
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

const char* highlight_attrs = "color=red, penwidth=2";

template <class G, class V, class F>
std::string dot(const G& g, const std::vector<V>& vertices, const DotHighlights<V>& h, F&& name) {
    std::ostringstream os;
    os << "digraph G {\n";
    for (const auto& v : vertices) {
        os << "  " << quote(name(v));
        if (h.vertices.count(v)) os << " [" << highlight_attrs << "]";
        os << ";\n";
    }
    for (const auto& [a, b] : g.directed_edges()) {
        os << "  " << quote(name(a)) << " -> " << quote(name(b));
        if (h.directed.count({a, b})) os << " [" << highlight_attrs << "]";
        os << ";\n";
    }
    for (const auto& [a, b] : g.bidirected_edges()) {
        bool hl = h.bidirected.count({a, b}) || h.bidirected.count({b, a});
        os << "  " << quote(name(a)) << " -> " << quote(name(b)) << " [dir=both, style=dashed";
        if (hl) os << ", " << highlight_attrs;
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

Json names(const VertexSet& s) { return Json(std::vector<std::string>(s.begin(), s.end())); }

Json edge_list(const std::set<NamedEdge>& edges) {
    Json out = Json::array();
    for (const auto& [a, b] : edges) out.push_back({a, b});
    return out;
}

Json budget_json(const SearchBudget& b) {
    return {{"max_depth", b.max_depth}, {"max_size", b.max_size}, {"max_terms", b.max_terms}};
}

const char* direction_name(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

}  // namespace

GraphDocument parse_document(std::string_view text) { return Parser(lex(text)).document(); }

Graph build_graph(const GraphDocument& doc) {
    if (doc.kind == GraphDocument::Kind::scg) return build_scg(doc);
    return build_ft(doc);
}

Graph parse_graph(std::string_view text) { return build_graph(parse_document(text)); }

Scg parse_scg(std::string_view text) {
    Graph g = parse_graph(text);
    if (!std::holds_alternative<Scg>(g)) throw ParseError(1, 1, "expected an scg document");
    return std::get<Scg>(std::move(g));
}

FtAdmg parse_ftadmg(std::string_view text) {
    Graph g = parse_graph(text);
    if (!std::holds_alternative<FtAdmg>(g)) throw ParseError(1, 1, "expected an ftadmg document");
    return std::get<FtAdmg>(std::move(g));
}

std::string serialize_graph(const Scg& g) {
    std::string out = "graph scg\n";
    for (const auto& v : g.vertices()) out += "node " + v + "\n";
    for (const auto& [a, b] : g.directed_edges()) out += a + " -> " + b + "\n";
    for (const auto& [a, b] : g.bidirected_edges()) out += a + " <-> " + b + "\n";
    return out;
}

std::string serialize_graph(const FtAdmg& g) {
    std::string out = "graph ftadmg t0=" + std::to_string(g.t0()) + " tmax=" + std::to_string(g.tmax()) + "\n";
    for (const auto& v : g.names()) out += "node " + v + "\n";
    for (const auto& [a, b] : g.directed_edges()) out += to_string(a) + " -> " + to_string(b) + "\n";
    for (const auto& [a, b] : g.bidirected_edges()) out += to_string(a) + " <-> " + to_string(b) + "\n";
    return out;
}

std::string serialize_graph(const Graph& g) {
    return std::visit([](const auto& x) { return serialize_graph(x); }, g);
}

std::string to_dot(const Scg& g, const DotHighlights<std::string>& highlights) {
    return dot(g, g.vertices(), highlights, [](const std::string& s) { return s; });
}

std::string to_dot(const FtAdmg& g, const DotHighlights<TemporalVertex>& highlights) {
    std::vector<TemporalVertex> vs;
    for (std::size_t i = 0; i < g.size(); ++i) vs.push_back(g.vertex(i));
    return dot(g, vs, highlights, [](const TemporalVertex& v) { return to_string(v); });
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json to_json(const Scg& g) {
    Json directed = Json::array(), bidirected = Json::array();
    for (const auto& [a, b] : g.directed_edges()) directed.push_back({a, b});
    for (const auto& [a, b] : g.bidirected_edges()) bidirected.push_back({a, b});
    return {{"kind", "scg"}, {"vertices", g.vertices()}, {"directed", directed}, {"bidirected", bidirected}};
}

Json to_json(const FtAdmg& g) {
    Json directed = Json::array(), bidirected = Json::array();
    for (const auto& [a, b] : g.directed_edges()) directed.push_back({to_string(a), to_string(b)});
    for (const auto& [a, b] : g.bidirected_edges()) bidirected.push_back({to_string(a), to_string(b)});
    return {{"kind", "ftadmg"}, {"t0", g.t0()}, {"tmax", g.tmax()}, {"names", g.names()},
            {"directed", directed}, {"bidirected", bidirected}};
}

Json to_json(const Path& p) {
    Json links = Json::array();
    for (Link l : p.links()) links.push_back(link_symbol(l));
    return {{"vertices", p.vertices()}, {"links", links}, {"text", to_string(p)}};
}

Json to_json(const TemporalPath& p) {
    Json links = Json::array(), vertices = Json::array();
    for (Link l : p.links()) links.push_back(link_symbol(l));
    for (const auto& v : p.vertices()) vertices.push_back(to_string(v));
    return {{"vertices", vertices}, {"links", links}, {"text", to_string(p)}};
}

Json to_json(const CForest& f) {
    return {{"vertices", names(f.vertices)},
            {"directed", edge_list(f.directed)},
            {"bidirected", edge_list(f.bidirected)},
            {"roots", names(f.roots)}};
}

Json to_json(const Hedge& h) { return {{"f", to_json(h.f)}, {"f_prime", to_json(h.f_prime)}, {"roots", names(h.roots)}}; }

Json to_json(const RuleCheck& r) {
    return {{"rule", r.rule},
            {"applicable", r.applicable},
            {"mutilation", {{"topbar", names(r.mutilation.topbar)}, {"underbar", names(r.mutilation.underbar)}}},
            {"separation", {{"x", names(r.dsep_x)}, {"y", names(r.dsep_y)}, {"cond", names(r.dsep_cond)}}},
            {"mutilated", to_json(r.mutilated)},
            {"witness", r.witness ? to_json(*r.witness) : Json(nullptr)}};
}

Json to_json(const DerivationNode& d) {
    Json children = Json::array();
    for (const auto& c : d.children) children.push_back(to_json(c));
    Json out = {{"term", estimand_to_text(d.term)}, {"move", move_name(d.move)}, {"children", children}};
    if (d.move != Move::observed) out["clusters"] = names(d.clusters);
    if (d.move == Move::rule) {
        out["rule"] = d.rule;
        out["direction"] = direction_name(d.direction);
    }
    return out;
}

Json to_json(const Verdict& v) {
    if (const auto* id = std::get_if<Identifiable>(&v)) {
        return {{"verdict", "identifiable"},
                {"estimand", estimand_to_text(id->estimand)},
                {"estimand_key", canonical_key(id->estimand)},
                {"cost", derivation_cost(id->derivation)},
                {"derivation", to_json(id->derivation)}};
    }
    if (const auto* non = std::get_if<NonIdentifiable>(&v)) {
        return {{"verdict", "non_identifiable"}, {"hedge", to_json(non->hedge)}};
    }
    const auto& unk = std::get<UnknownWithinBounds>(v);
    return {{"verdict", "unknown"}, {"reason", unk.reason}, {"explored", unk.explored}, {"budget", budget_json(unk.budget)}};
}

Json dsep_result(const VertexSet& x, const VertexSet& y, const VertexSet& cond, const std::optional<Path>& witness) {
    return {{"query", {{"x", names(x)}, {"y", names(y)}, {"cond", names(cond)}}},
            {"separated", !witness.has_value()},
            {"witness", witness ? to_json(*witness) : Json(nullptr)}};
}

Json dsep_result(const VertexSet& x, const VertexSet& y, const VertexSet& cond,
                 const std::optional<TemporalPath>& witness) {
    return {{"query", {{"x", names(x)}, {"y", names(y)}, {"cond", names(cond)}}},
            {"separated", !witness.has_value()},
            {"witness", witness ? to_json(*witness) : Json(nullptr)}};
}

Json rule_result(const CausalQuery& q, const RuleCheck& check) {
    return {{"query", {{"y", names(q.y)}, {"x", names(q.x)}, {"u", names(q.u)}, {"w", names(q.w)}}},
            {"check", to_json(check)}};
}

Json identify_result(const VertexSet& y, const VertexSet& x, const Verdict& v) {
    return {{"query", {{"y", names(y)}, {"x", names(x)}}}, {"result", to_json(v)}};
}

Json hedge_result(const VertexSet& y, const VertexSet& x, const std::optional<Hedge>& h) {
    return {{"query", {{"y", names(y)}, {"x", names(x)}}}, {"found", h.has_value()},
            {"hedge", h ? to_json(*h) : Json(nullptr)}};
}

Json graph_result(const Graph& g) {
    return std::visit([](const auto& x) { return Json{{"graph", to_json(x)}, {"text", serialize_graph(x)}}; }, g);
}

Json graphs_result(const std::vector<FtAdmg>& gs) {
    Json list = Json::array();
    for (const auto& g : gs) list.push_back({{"graph", to_json(g)}, {"text", serialize_graph(g)}});
    return {{"count", gs.size()}, {"graphs", list}};
}

Json witness_result(const VertexSet& x, const VertexSet& y, const VertexSet& cond, const Path& path, const FtAdmg& ft) {
    return {{"query", {{"x", names(x)}, {"y", names(y)}, {"cond", names(cond)}}},
            {"path", to_json(path)},
            {"witness", {{"graph", to_json(ft)}, {"text", serialize_graph(ft)}}}};
}

std::string dump(const Json& j) { return j.dump(2); }

}  // namespace scgid
