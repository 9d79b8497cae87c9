#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ik4/formula.hpp"

namespace ik4 {

/// A named axiom pattern; atoms in the pattern act as metavariables ranging
/// over arbitrary formulas.
struct Schema {
    std::string name;
    Formula pattern;
};

/// The eight modal schemata: C[], C<>, N[], N<>, 4[], 4<>, Ad, Af.
const std::vector<Schema>& modal_schemata();
/// A ten-schema propositional basis (ipl-k, ipl-s, conjunction and
/// disjunction rules, ex falso, verum).
const std::vector<Schema>& ipl_schemata();
const Schema* find_schema(std::string_view name);

using Substitution = std::map<std::string, Formula>;

/// Substitution sending the pattern onto the formula, or absent.
std::optional<Substitution> match_schema(const Schema& s, Formula f);

/// Uniform substitution of atoms by formulas; unmapped atoms stay themselves.
Formula apply_substitution(Formula f, const Substitution& sub);

/// Replaces every maximal modal subformula with a fresh atom, identical
/// occurrences sharing the atom. The result is propositional.
Formula freeze_modal(Formula f);

/// Intuitionistic propositional validity by terminating contraction-free
/// backward proof search. The input must be propositional (freeze modal
/// operators first); throws std::invalid_argument otherwise.
bool ipl_valid(Formula f);

namespace just {
struct Axiom {
    std::string name;
    std::optional<Substitution> substitution;  // verified if given, inferred otherwise
};
struct ModusPonens {
    std::size_t antecedent;   // line proving A
    std::size_t implication;  // line proving A -> current
};
struct RuleBox {
    std::size_t premise;  // A -> B; current must be []A -> []B
};
struct RuleDia {
    std::size_t premise;  // A -> B; current must be <>A -> <>B
};
struct Substituted {
    std::size_t premise;
    Substitution substitution;
};
struct IplConsequence {
    std::vector<std::size_t> cited;  // conjunction of cited lines must IPL-imply current
};
struct Hypothesis {};
}  // namespace just

using Justification = std::variant<just::Axiom, just::ModusPonens, just::RuleBox, just::RuleDia,
                                   just::Substituted, just::IplConsequence, just::Hypothesis>;

struct ProofLine {
    Formula formula;
    Justification justification;
};

struct Proof {
    std::vector<ProofLine> lines;
};

/// Proof file lines: `n. <formula> ; <justification>` with justifications
///   AX <name> [sub p=<formula>, q=<formula>, ...]
///   MP i j | RBOX i | RDIA i | SUBST i p=<formula>,... | IPL i,j,... | HYP
/// Line numbers and citations are 1-based; blank lines and `#` comments are
/// ignored. Throws FileFormatError.
Proof parse_proof(std::string_view text);
std::string format_proof(const Proof& p);

struct ProofCheck {
    bool ok = true;
    std::size_t first_bad_line = 0;  // 1-based; 0 when ok
    std::string reason;
};

ProofCheck check_proof(const Proof& p);

}  // namespace ik4
