#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace scgid {

// A cluster variable inside an estimand; primes distinguish bound copies.
struct Symbol {
    std::string cluster;
    int primes = 0;

    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using SymbolSet = std::set<Symbol>;

// `v^y`, `v^{x'}`, `v^{ab}`.
std::string to_text(const Symbol& s);

/// P(targets | do(interventions), conditioning).
struct ProbTerm {
    SymbolSet targets;
    SymbolSet conditioning;
    SymbolSet interventions;

    friend bool operator==(const ProbTerm&, const ProbTerm&) = default;
};

/// Symbolic expression tree over probability terms. Value type.
class Estimand {
public:
    enum class Kind { term, sum, product, quotient };

    static Estimand term(ProbTerm t);
    static Estimand sum(Symbol bound, Estimand body);
    static Estimand product(std::vector<Estimand> factors);
    static Estimand quotient(Estimand numerator, Estimand denominator);

    Kind kind() const noexcept { return kind_; }

    // Accessors throw ArgumentError when used on the wrong kind.
    const ProbTerm& as_term() const;
    const Symbol& bound() const;
    const Estimand& body() const;
    const std::vector<Estimand>& factors() const;
    const Estimand& numerator() const;
    const Estimand& denominator() const;

    // Structural equality after canonicalization.
    friend bool operator==(const Estimand& a, const Estimand& b);

private:
    Kind kind_ = Kind::product;
    ProbTerm term_;
    Symbol bound_;
    std::vector<Estimand> children_;
};

/// Renames binders to the fewest primes free of clashes, flattens products,
/// cancels quotient denominators matched by a sibling factor and sorts
/// factors (terms first, then by key).
Estimand canonicalize(const Estimand& e);

// Human-readable text with lower-cased cluster names, e.g. `P(v^y | do(v^x), v^w)`.
std::string estimand_to_text(const Estimand& e);

// Exact-name encoding of the canonical form; equal iff the estimands are equal.
std::string canonical_key(const Estimand& e);

SymbolSet free_symbols(const Estimand& e);
bool is_observational(const Estimand& e);
std::size_t intervention_count(const Estimand& e);

// Number of probability-term leaves.
std::size_t term_count(const Estimand& e);

// Leaves in pre-order.
std::vector<ProbTerm> terms(const Estimand& e);

// Replaces the pre-order `index`th leaf. Throws RewriteError if out of range.
Estimand replace_term(const Estimand& e, std::size_t index, const Estimand& replacement);

}  // namespace scgid
