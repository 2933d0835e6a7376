#include "scgid/estimand.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "scgid/errors.hpp"

namespace scgid {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string exact(const Symbol& s) { return s.cluster + std::string(static_cast<std::size_t>(s.primes), '\''); }

std::string join_exact(const SymbolSet& s) {
    std::string out;
    for (const auto& sym : s) {
        if (!out.empty()) out += ',';
        out += exact(sym);
    }
    return out;
}

std::string raw_key(const Estimand& e) {
    switch (e.kind()) {
        case Estimand::Kind::term: {
            const auto& t = e.as_term();
            return "P(" + join_exact(t.targets) + "|" + join_exact(t.interventions) + "|" + join_exact(t.conditioning) + ")";
        }
        case Estimand::Kind::sum:
            return "S[" + exact(e.bound()) + "](" + raw_key(e.body()) + ")";
        case Estimand::Kind::product: {
            std::string out = "M(";
            for (std::size_t i = 0; i < e.factors().size(); ++i) {
                if (i > 0) out += '*';
                out += raw_key(e.factors()[i]);
            }
            return out + ")";
        }
        case Estimand::Kind::quotient:
            return "Q(" + raw_key(e.numerator()) + "/" + raw_key(e.denominator()) + ")";
    }
    return {};
}

void collect_free(const Estimand& e, SymbolSet& bound, SymbolSet& out) {
    switch (e.kind()) {
        case Estimand::Kind::term: {
            const auto& t = e.as_term();
            for (const auto* set : {&t.targets, &t.conditioning, &t.interventions}) {
                for (const auto& s : *set) {
                    if (!bound.count(s)) out.insert(s);
                }
            }
            break;
        }
        case Estimand::Kind::sum: {
            bool fresh = bound.insert(e.bound()).second;
            collect_free(e.body(), bound, out);
            if (fresh) bound.erase(e.bound());
            break;
        }
        case Estimand::Kind::product:
            for (const auto& f : e.factors()) collect_free(f, bound, out);
            break;
        case Estimand::Kind::quotient:
            collect_free(e.numerator(), bound, out);
            collect_free(e.denominator(), bound, out);
            break;
    }
}

SymbolSet rename_set(const SymbolSet& s, const std::map<Symbol, Symbol>& env) {
    SymbolSet out;
    for (const auto& sym : s) {
        auto it = env.find(sym);
        out.insert(it == env.end() ? sym : it->second);
    }
    return out;
}

Estimand rename(const Estimand& e, const SymbolSet& global_free, std::map<Symbol, Symbol> env, SymbolSet scope) {
    switch (e.kind()) {
        case Estimand::Kind::term: {
            const auto& t = e.as_term();
            return Estimand::term({rename_set(t.targets, env), rename_set(t.conditioning, env),
                                   rename_set(t.interventions, env)});
        }
        case Estimand::Kind::sum: {
            Symbol fresh{e.bound().cluster, 0};
            while (global_free.count(fresh) || scope.count(fresh)) ++fresh.primes;
            env[e.bound()] = fresh;
            scope.insert(fresh);
            return Estimand::sum(fresh, rename(e.body(), global_free, env, scope));
        }
        case Estimand::Kind::product: {
            std::vector<Estimand> fs;
            for (const auto& f : e.factors()) fs.push_back(rename(f, global_free, env, scope));
            return Estimand::product(std::move(fs));
        }
        case Estimand::Kind::quotient:
            return Estimand::quotient(rename(e.numerator(), global_free, env, scope),
                                      rename(e.denominator(), global_free, env, scope));
    }
    return e;
}

int kind_rank(Estimand::Kind k) {
    switch (k) {
        case Estimand::Kind::term: return 0;
        case Estimand::Kind::sum: return 1;
        case Estimand::Kind::quotient: return 2;
        case Estimand::Kind::product: return 3;
    }
    return 4;
}

std::vector<Estimand> flatten(std::vector<Estimand> in) {
    std::vector<Estimand> out;
    for (auto& f : in) {
        if (f.kind() == Estimand::Kind::product) {
            for (const auto& g : f.factors()) out.push_back(g);
        } else {
            out.push_back(std::move(f));
        }
    }
    return out;
}

Estimand normalize(const Estimand& e) {
    switch (e.kind()) {
        case Estimand::Kind::term: return e;
        case Estimand::Kind::sum: return Estimand::sum(e.bound(), normalize(e.body()));
        case Estimand::Kind::quotient: {
            Estimand num = normalize(e.numerator()), den = normalize(e.denominator());
            if (raw_key(num) == raw_key(den)) return Estimand::product({});
            return Estimand::quotient(std::move(num), std::move(den));
        }
        case Estimand::Kind::product: break;
    }
    std::vector<Estimand> fs;
    for (const auto& f : e.factors()) fs.push_back(normalize(f));
    fs = flatten(std::move(fs));

    // a * (b / a) -> b
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < fs.size() && !changed; ++i) {
            if (fs[i].kind() != Estimand::Kind::quotient) continue;
            std::string den = raw_key(fs[i].denominator());
            for (std::size_t j = 0; j < fs.size(); ++j) {
                if (j == i || raw_key(fs[j]) != den) continue;
                Estimand num = fs[i].numerator();
                fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
                fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
                fs.push_back(std::move(num));
                fs = flatten(std::move(fs));
                changed = true;
                break;
            }
        }
    }

    if (fs.size() == 1) return fs.front();
    std::vector<std::pair<std::pair<int, std::string>, Estimand>> keyed;
    for (auto& f : fs) keyed.push_back({{kind_rank(f.kind()), raw_key(f)}, std::move(f)});
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    fs.clear();
    for (auto& [k, f] : keyed) fs.push_back(std::move(f));
    return Estimand::product(std::move(fs));
}

std::string display_set(const ProbTerm& t) {
    std::string out;
    auto add = [&](const std::string& s) {
        if (!out.empty()) out += ", ";
        out += s;
    };
    for (const auto& s : t.interventions) add("do(" + to_text(s) + ")");
    for (const auto& s : t.conditioning) add(to_text(s));
    return out;
}

std::string text(const Estimand& e) {
    switch (e.kind()) {
        case Estimand::Kind::term: {
            const auto& t = e.as_term();
            std::string targets;
            for (const auto& s : t.targets) targets += (targets.empty() ? "" : ", ") + to_text(s);
            std::string given = display_set(t);
            return "P(" + targets + (given.empty() ? "" : " | " + given) + ")";
        }
        case Estimand::Kind::sum: {
            std::string body = text(e.body());
            if (e.body().kind() != Estimand::Kind::term) body = "(" + body + ")";
            return "Σ_{" + to_text(e.bound()) + "} " + body;
        }
        case Estimand::Kind::product: {
            if (e.factors().empty()) return "1";
            std::string out;
            for (std::size_t i = 0; i < e.factors().size(); ++i) {
                const Estimand& f = e.factors()[i];
                bool last = i + 1 == e.factors().size();
                bool bare = f.kind() == Estimand::Kind::term || (last && f.kind() == Estimand::Kind::sum);
                if (i > 0) out += ' ';
                out += bare ? text(f) : "(" + text(f) + ")";
            }
            return out;
        }
        case Estimand::Kind::quotient: {
            auto wrap = [](const Estimand& x) {
                return x.kind() == Estimand::Kind::term ? text(x) : "(" + text(x) + ")";
            };
            return wrap(e.numerator()) + " / " + wrap(e.denominator());
        }
    }
    return {};
}

void collect_terms(const Estimand& e, std::vector<ProbTerm>& out) {
    switch (e.kind()) {
        case Estimand::Kind::term: out.push_back(e.as_term()); break;
        case Estimand::Kind::sum: collect_terms(e.body(), out); break;
        case Estimand::Kind::product:
            for (const auto& f : e.factors()) collect_terms(f, out);
            break;
        case Estimand::Kind::quotient:
            collect_terms(e.numerator(), out);
            collect_terms(e.denominator(), out);
            break;
    }
}

Estimand replace_at(const Estimand& e, std::size_t& index, const Estimand& replacement, bool& done) {
    switch (e.kind()) {
        case Estimand::Kind::term:
            if (index == 0 && !done) {
                done = true;
                return replacement;
            }
            --index;
            return e;
        case Estimand::Kind::sum:
            return Estimand::sum(e.bound(), replace_at(e.body(), index, replacement, done));
        case Estimand::Kind::product: {
            std::vector<Estimand> fs;
            for (const auto& f : e.factors()) fs.push_back(done ? f : replace_at(f, index, replacement, done));
            return Estimand::product(std::move(fs));
        }
        case Estimand::Kind::quotient: {
            Estimand num = replace_at(e.numerator(), index, replacement, done);
            Estimand den = done ? e.denominator() : replace_at(e.denominator(), index, replacement, done);
            return Estimand::quotient(std::move(num), std::move(den));
        }
    }
    return e;
}

}  // namespace

std::string to_text(const Symbol& s) {
    std::string name = lower(s.cluster) + std::string(static_cast<std::size_t>(s.primes), '\'');
    return name.size() == 1 ? "v^" + name : "v^{" + name + "}";
}

Estimand Estimand::term(ProbTerm t) {
    if (t.targets.empty()) throw ArgumentError("probability term needs at least one target");
    for (const auto& s : t.targets) {
        if (t.conditioning.count(s) || t.interventions.count(s)) throw ArgumentError("symbol " + exact(s) + " repeated in term");
    }
    for (const auto& s : t.conditioning) {
        if (t.interventions.count(s)) throw ArgumentError("symbol " + exact(s) + " repeated in term");
    }
    Estimand e;
    e.kind_ = Kind::term;
    e.term_ = std::move(t);
    return e;
}

Estimand Estimand::sum(Symbol bound, Estimand body) {
    Estimand e;
    e.kind_ = Kind::sum;
    e.bound_ = std::move(bound);
    e.children_.push_back(std::move(body));
    return e;
}

Estimand Estimand::product(std::vector<Estimand> factors) {
    Estimand e;
    e.kind_ = Kind::product;
    e.children_ = std::move(factors);
    return e;
}

Estimand Estimand::quotient(Estimand numerator, Estimand denominator) {
    Estimand e;
    e.kind_ = Kind::quotient;
    e.children_.push_back(std::move(numerator));
    e.children_.push_back(std::move(denominator));
    return e;
}

const ProbTerm& Estimand::as_term() const {
    if (kind_ != Kind::term) throw ArgumentError("estimand is not a probability term");
    return term_;
}

const Symbol& Estimand::bound() const {
    if (kind_ != Kind::sum) throw ArgumentError("estimand is not a sum");
    return bound_;
}

const Estimand& Estimand::body() const {
    if (kind_ != Kind::sum) throw ArgumentError("estimand is not a sum");
    return children_.front();
}

const std::vector<Estimand>& Estimand::factors() const {
    if (kind_ != Kind::product) throw ArgumentError("estimand is not a product");
    return children_;
}

const Estimand& Estimand::numerator() const {
    if (kind_ != Kind::quotient) throw ArgumentError("estimand is not a quotient");
    return children_[0];
}

const Estimand& Estimand::denominator() const {
    if (kind_ != Kind::quotient) throw ArgumentError("estimand is not a quotient");
    return children_[1];
}

bool operator==(const Estimand& a, const Estimand& b) { return canonical_key(a) == canonical_key(b); }

SymbolSet free_symbols(const Estimand& e) {
    SymbolSet bound, out;
    collect_free(e, bound, out);
    return out;
}

Estimand canonicalize(const Estimand& e) { return normalize(rename(e, free_symbols(e), {}, {})); }

std::string estimand_to_text(const Estimand& e) { return text(canonicalize(e)); }

std::string canonical_key(const Estimand& e) { return raw_key(canonicalize(e)); }

std::vector<ProbTerm> terms(const Estimand& e) {
    std::vector<ProbTerm> out;
    collect_terms(e, out);
    return out;
}

std::size_t term_count(const Estimand& e) { return terms(e).size(); }

std::size_t intervention_count(const Estimand& e) {
    std::size_t n = 0;
    for (const auto& t : terms(e)) n += t.interventions.size();
    return n;
}

bool is_observational(const Estimand& e) { return intervention_count(e) == 0; }

Estimand replace_term(const Estimand& e, std::size_t index, const Estimand& replacement) {
    if (index >= term_count(e)) throw RewriteError("term index " + std::to_string(index) + " is out of range");
    bool done = false;
    return replace_at(e, index, replacement, done);
}

}  // namespace scgid
