#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "scgid/docalculus.hpp"
#include "scgid/dsep.hpp"
#include "scgid/graph.hpp"
#include "scgid/hedge.hpp"

namespace scgid {

using Graph = std::variant<Scg, FtAdmg>;

struct Statement {
    enum class Kind { node, directed, bidirected };
    Kind kind = Kind::node;
    TemporalVertex a;  // t is only meaningful in full-time documents
    TemporalVertex b;
    std::size_t line = 1;
    std::size_t column = 1;
};

/// Syntax tree of a graph file. Positions are 1-based.
struct GraphDocument {
    enum class Kind { scg, ftadmg };
    Kind kind = Kind::scg;
    int t0 = 0;
    int tmax = 0;
    std::vector<Statement> statements;
};

/// Grammar:
///   document  := header statement*
///   header    := 'graph' 'scg' | 'graph' 'ftadmg' 't0' '=' INT 'tmax' '=' INT
///   statement := ('node' NAME | vertex ('->' | '<->') vertex) ';'?
///   vertex    := NAME | NAME '[' INT ']'
/// `#` starts a comment running to the end of the line.
/// Throws ParseError on syntax errors.
GraphDocument parse_document(std::string_view text);

// Semantic checks (time indices, duplicates, cycles) with statement positions.
Graph build_graph(const GraphDocument& doc);

Graph parse_graph(std::string_view text);
Scg parse_scg(std::string_view text);
FtAdmg parse_ftadmg(std::string_view text);

// Header, sorted `node` lines, sorted directed edges, sorted bidirected edges.
std::string serialize_graph(const Scg& g);
std::string serialize_graph(const FtAdmg& g);
std::string serialize_graph(const Graph& g);

template <class V>
struct DotHighlights {
    std::set<V> vertices;
    std::set<std::pair<V, V>> directed;
    std::set<std::pair<V, V>> bidirected;  // either orientation matches
};

std::string to_dot(const Scg& g, const DotHighlights<std::string>& highlights = {});
std::string to_dot(const FtAdmg& g, const DotHighlights<TemporalVertex>& highlights = {});

// Reads a file; throws ArgumentError if it cannot be opened.
std::string read_file(const std::string& path);

// ---- JSON result documents ---------------------------------------------------
// Objects use sorted keys; edge and vertex lists are sorted.

using Json = nlohmann::json;

Json to_json(const Scg& g);
Json to_json(const FtAdmg& g);
Json to_json(const Path& p);
Json to_json(const TemporalPath& p);
Json to_json(const CForest& f);
Json to_json(const Hedge& h);
Json to_json(const RuleCheck& r);
Json to_json(const DerivationNode& d);
Json to_json(const Verdict& v);

Json dsep_result(const VertexSet& x, const VertexSet& y, const VertexSet& cond, const std::optional<Path>& witness);
Json dsep_result(const VertexSet& x, const VertexSet& y, const VertexSet& cond,
                 const std::optional<TemporalPath>& witness);
Json rule_result(const CausalQuery& q, const RuleCheck& check);
Json identify_result(const VertexSet& y, const VertexSet& x, const Verdict& v);
Json hedge_result(const VertexSet& y, const VertexSet& x, const std::optional<Hedge>& h);
Json graph_result(const Graph& g);
Json graphs_result(const std::vector<FtAdmg>& gs);
Json witness_result(const VertexSet& x, const VertexSet& y, const VertexSet& cond, const Path& path, const FtAdmg& ft);

// Serialization used by the command line for every JSON payload.
std::string dump(const Json& j);

}  // namespace scgid
