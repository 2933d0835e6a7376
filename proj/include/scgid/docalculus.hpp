#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scgid/dsep.hpp"
#include "scgid/estimand.hpp"
#include "scgid/graph.hpp"
#include "scgid/hedge.hpp"

namespace scgid {

/// P(y | do(u), do(x), w) over cluster sets; the sets must be pairwise
/// disjoint.
struct CausalQuery {
    VertexSet y;
    VertexSet x;
    VertexSet u;
    VertexSet w;

    friend bool operator==(const CausalQuery&, const CausalQuery&) = default;
};

// Members of x that are not ancestors of w once u's incoming edges are cut.
VertexSet x_given_w(const Scg& g, const VertexSet& x, const VertexSet& w, const VertexSet& u);

struct RuleCheck {
    int rule = 0;
    ScgMutilation mutilation;
    Scg mutilated;
    // The tested separation: dsep_y ⟂ dsep_x | dsep_cond in `mutilated`.
    VertexSet dsep_x;
    VertexSet dsep_y;
    VertexSet dsep_cond;
    bool applicable = false;
    std::optional<Path> witness;  // active path when not applicable
};

/// Rule 1 tests (Y ⟂ X | U, W) in G_{Ū}; rule 2 in G_{Ū, X̲}; rule 3 in
/// G_{Ū, X(W)‾}. An empty x is vacuously applicable.
/// Throws ArgumentError for a bad rule id, overlapping sets or empty y.
RuleCheck rule_applicable(const Scg& g, int rule, const CausalQuery& q);

// The same test on a full-time graph over every time slice of the clusters.
// For rule 3 the non-ancestor set is computed among temporal vertices.
bool ft_rule_holds(const FtAdmg& ft, int rule, const CausalQuery& q);

enum class Direction { forward, backward };

/// Which leaf to rewrite and how. Forward directions: rule 1 drops
/// observed `clusters`, rule 2 turns do(clusters) into observations, rule 3
/// drops do(clusters). Backward undoes each.
struct RuleBinding {
    std::size_t term_index = 0;  // pre-order leaf index
    int rule = 0;
    VertexSet clusters;
    Direction direction = Direction::forward;
};

/// Throws RewriteError when the binding does not fit the selected term and
/// ContractError when the rule's separation does not hold in g.
Estimand apply_rule(const Scg& g, const Estimand& expr, const RuleBinding& binding);

// P(T | do D, C) -> Σ_b P(T | do D, C, b) P(b | do D, C)
Estimand marginalize(const Estimand& expr, std::size_t term_index, const std::string& cluster);

// P(T | do D, C) -> P(T \ b | do D, C, b) P(b | do D, C) for b in T, |T| >= 2
Estimand chain_split(const Estimand& expr, std::size_t term_index, const std::string& cluster);

struct SearchBudget {
    std::size_t max_depth = 12;      // rewrite distance from the query
    std::size_t max_size = 64;       // leaves in any candidate estimand
    std::size_t max_terms = 200000;  // distinct terms explored

    friend bool operator==(const SearchBudget&, const SearchBudget&) = default;
};

enum class Move { observed, rule, marginalize, chain };

const char* move_name(Move m);

/// One solved term. `term` is a single cluster-level probability term;
/// children are the terms the move produced, in order.
struct DerivationNode {
    Estimand term;
    Move move = Move::observed;
    int rule = 0;
    Direction direction = Direction::forward;
    VertexSet clusters;
    std::vector<DerivationNode> children;
};

// Number of moves in the derivation.
std::size_t derivation_cost(const DerivationNode& d);

/// Re-checks every step against g and rebuilds the estimand.
/// Throws ContractError or RewriteError on the first invalid step.
Estimand replay(const Scg& g, const DerivationNode& d);

// Indented one-line-per-step rendering.
std::vector<std::string> derivation_trace(const DerivationNode& d);

struct Identifiable {
    Estimand estimand;
    DerivationNode derivation;
};

struct NonIdentifiable {
    Hedge hedge;
};

struct UnknownWithinBounds {
    SearchBudget budget;
    std::string reason;
    std::size_t explored = 0;
};

using Verdict = std::variant<Identifiable, NonIdentifiable, UnknownWithinBounds>;

/// Decides P(y | do(x)).
///
/// An SC-Hedge settles non-identifiability first. Otherwise the search works
/// on single terms P(T | do D, C): every move rewrites one term into one or
/// two terms, so terms form an AND-OR graph. Terms within max_depth moves of
/// the query are explored; then a cheapest derivation (one unit per move,
/// observational terms free) is extracted bottom-up, ties broken by the
/// canonical key of the resulting estimand.
Verdict identify(const Scg& g, const VertexSet& y, const VertexSet& x, const SearchBudget& budget = {});

}  // namespace scgid
