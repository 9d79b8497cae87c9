#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ik4/bitset.hpp"
#include "ik4/errors.hpp"

namespace ik4 {

enum class Kind : std::uint8_t { Atom, Top, Bot, Implies, And, Or, Box, Dia };

/// A formula of the modal language. Values are interned: two formulas are
/// structurally equal iff they hold the same node pointer, so equality,
/// hashing and map keys are O(1). Negation is not a constructor; ~A is
/// shorthand for A -> F and is desugared by the parser.
class Formula {
public:
    Formula() = default;  // null handle; only valid() formulas may be queried

    static Formula atom(std::string_view name);
    static Formula top();
    static Formula bot();
    static Formula implies(Formula lhs, Formula rhs);
    static Formula conj(Formula lhs, Formula rhs);
    static Formula disj(Formula lhs, Formula rhs);
    static Formula box(Formula body);
    static Formula dia(Formula body);
    static Formula neg(Formula body) { return implies(body, bot()); }

    bool valid() const { return node_ != nullptr; }
    Kind kind() const;
    const std::string& atom_name() const;  // Atom only
    Formula lhs() const;                   // Implies/And/Or
    Formula rhs() const;                   // Implies/And/Or
    Formula body() const;                  // Box/Dia

    bool is_modal() const { return kind() == Kind::Box || kind() == Kind::Dia; }
    bool is_binary() const {
        Kind k = kind();
        return k == Kind::Implies || k == Kind::And || k == Kind::Or;
    }

    /// Stable intern sequence number; deterministic within one process run.
    std::size_t id() const;

    bool operator==(const Formula&) const = default;
    /// Orders by intern id. Deterministic for a fixed construction order.
    bool operator<(const Formula& o) const { return id() < o.id(); }

    std::string str() const;

    struct Node;
    const Node* raw() const { return node_; }

private:
    explicit Formula(const Node* n) : node_(n) {}
    const Node* node_ = nullptr;
};

struct FormulaHash {
    std::size_t operator()(const Formula& f) const {
        return std::hash<const void*>{}(static_cast<const void*>(f.raw()));
    }
};

/// Parses the ASCII surface syntax. Grammar, loosest to tightest:
/// implication (`->`, right associative), disjunction (`|`), conjunction
/// (`&`), prefixes (`~`, `[]`, `<>`), then atoms `[a-z][a-z0-9_]*`, the
/// constants `T` and `F`, and parenthesised formulas. `~A` is read as
/// `A -> F`. Throws ParseError with a byte position.
Formula parse_formula(std::string_view text);

/// Minimal-parenthesisation printer; parse(render(f)) == f.
std::string render(const Formula& f);

/// Symbol count of the fully parenthesised word: atoms and constants count 1,
/// prefixes add 1, and each binary connective adds 3 (operator plus the pair
/// of parentheses).
std::size_t symbol_length(Formula f);

/// Sorted names of the atoms occurring in f.
std::vector<std::string> atoms_of(Formula f);

/// The least subformula-closed set containing a seed formula, with a stable
/// membership index so that sets of members can live in machine-word bitsets.
/// Members are ordered by breadth-first discovery from the seed.
class ClosureSet {
public:
    explicit ClosureSet(Formula seed);

    Formula seed() const { return seed_; }
    std::size_t size() const { return members_.size(); }
    const std::vector<Formula>& members() const { return members_; }
    Formula member(std::size_t i) const { return members_.at(i); }
    std::optional<std::size_t> index_of(Formula f) const;
    bool contains(Formula f) const { return index_of(f).has_value(); }

private:
    Formula seed_;
    std::vector<Formula> members_;
    std::unordered_map<Formula, std::size_t, FormulaHash> index_;
};

ClosureSet closure(Formula f);

/// A label is either the bottom sentinel (the root label, printed -1) or a
/// set of closure positions.
class Label {
public:
    static Label root() { return Label(); }
    static Label set(Bitset formulas) { return Label(std::move(formulas)); }

    bool is_root() const { return root_; }
    const Bitset& formulas() const {
        if (root_) throw std::invalid_argument("root label carries no formula set");
        return set_;
    }
    std::size_t width() const { return root_ ? 0 : set_.width(); }

    bool operator==(const Label&) const = default;
    auto operator<=>(const Label&) const = default;

    std::string to_string() const { return root_ ? "-1" : set_.to_string(); }

    std::size_t hash_value() const { return root_ ? 0x5bd1e995u : set_.hash_value(); }

private:
    Label() : root_(true) {}
    explicit Label(Bitset s) : root_(false), set_(std::move(s)) {}
    bool root_;
    Bitset set_;
};

/// Order on labels over a common width: the root sentinel sits below every
/// label, and set labels compare by inclusion.
bool label_leq(const Label& a, const Label& b, std::size_t width);
bool label_less(const Label& a, const Label& b, std::size_t width);

/// The label universe of a closure set: the sentinel plus all subsets of the
/// closure, ordered by label_leq.
class LabelPoset {
public:
    explicit LabelPoset(ClosureSet closure) : closure_(std::move(closure)) {}

    const ClosureSet& closure() const { return closure_; }
    std::size_t width() const { return closure_.size(); }
    /// 1 + 2^width; throws std::overflow_error when it does not fit 64 bits.
    std::uint64_t cardinality() const;

    bool leq(const Label& a, const Label& b) const { return label_leq(a, b, width()); }
    bool less(const Label& a, const Label& b) const { return label_less(a, b, width()); }

private:
    ClosureSet closure_;
};

}  // namespace ik4
