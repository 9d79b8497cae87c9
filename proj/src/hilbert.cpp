#include "ik4/hilbert.hpp"

#include <algorithm>
#include <sstream>

#include "ik4/errors.hpp"

namespace ik4 {

namespace {

std::vector<Schema> make_modal_schemata() {
    auto f = [](const char* s) { return parse_formula(s); };
    return {
        {"C[]", f("[]p & []q -> [](p & q)")},
        {"C<>", f("<>(p | q) -> <>p | <>q")},
        {"N[]", f("[]T")},
        {"N<>", f("~<>F")},
        {"4[]", f("[]p -> [][]p")},
        {"4<>", f("<><>p -> <>p")},
        {"Ad", f("[](p | q) -> <>p | []q")},
        {"Af", f("<>(p -> q) -> ([]p -> <>q)")},
    };
}

std::vector<Schema> make_ipl_schemata() {
    auto f = [](const char* s) { return parse_formula(s); };
    return {
        {"ipl-k", f("p -> (q -> p)")},
        {"ipl-s", f("(p -> (q -> r)) -> ((p -> q) -> (p -> r))")},
        {"ipl-and-l", f("p & q -> p")},
        {"ipl-and-r", f("p & q -> q")},
        {"ipl-and-i", f("p -> (q -> p & q)")},
        {"ipl-or-l", f("p -> p | q")},
        {"ipl-or-r", f("q -> p | q")},
        {"ipl-or-e", f("(p -> r) -> ((q -> r) -> (p | q -> r))")},
        {"ipl-efq", f("F -> p")},
        {"ipl-top", f("T")},
    };
}

}  // namespace

const std::vector<Schema>& modal_schemata() {
    static const std::vector<Schema> schemata = make_modal_schemata();
    return schemata;
}

const std::vector<Schema>& ipl_schemata() {
    static const std::vector<Schema> schemata = make_ipl_schemata();
    return schemata;
}

const Schema* find_schema(std::string_view name) {
    for (const Schema& s : modal_schemata())
        if (s.name == name) return &s;
    for (const Schema& s : ipl_schemata())
        if (s.name == name) return &s;
    return nullptr;
}

namespace {

bool match_into(Formula pattern, Formula target, Substitution& sub) {
    switch (pattern.kind()) {
        case Kind::Atom: {
            auto [it, inserted] = sub.emplace(pattern.atom_name(), target);
            return inserted || it->second == target;
        }
        case Kind::Top:
        case Kind::Bot: return pattern.kind() == target.kind();
        case Kind::Box:
        case Kind::Dia:
            return pattern.kind() == target.kind() && match_into(pattern.body(), target.body(), sub);
        default:
            return pattern.kind() == target.kind() && match_into(pattern.lhs(), target.lhs(), sub) &&
                   match_into(pattern.rhs(), target.rhs(), sub);
    }
}

}  // namespace

std::optional<Substitution> match_schema(const Schema& s, Formula f) {
    Substitution sub;
    if (match_into(s.pattern, f, sub)) return sub;
    return std::nullopt;
}

Formula apply_substitution(Formula f, const Substitution& sub) {
    switch (f.kind()) {
        case Kind::Atom: {
            auto it = sub.find(f.atom_name());
            return it == sub.end() ? f : it->second;
        }
        case Kind::Top:
        case Kind::Bot: return f;
        case Kind::Box: return Formula::box(apply_substitution(f.body(), sub));
        case Kind::Dia: return Formula::dia(apply_substitution(f.body(), sub));
        case Kind::Implies:
            return Formula::implies(apply_substitution(f.lhs(), sub),
                                    apply_substitution(f.rhs(), sub));
        case Kind::And:
            return Formula::conj(apply_substitution(f.lhs(), sub), apply_substitution(f.rhs(), sub));
        case Kind::Or:
            return Formula::disj(apply_substitution(f.lhs(), sub), apply_substitution(f.rhs(), sub));
    }
    throw InvariantError("unreachable formula kind");
}

namespace {

Formula freeze_walk(Formula f, std::map<Formula, Formula>& frozen) {
    if (f.is_modal()) {
        auto it = frozen.find(f);
        if (it == frozen.end()) {
            Formula fresh = Formula::atom("#" + std::to_string(frozen.size()));
            it = frozen.emplace(f, fresh).first;
        }
        return it->second;
    }
    switch (f.kind()) {
        case Kind::Atom:
        case Kind::Top:
        case Kind::Bot: return f;
        case Kind::Implies:
            return Formula::implies(freeze_walk(f.lhs(), frozen), freeze_walk(f.rhs(), frozen));
        case Kind::And:
            return Formula::conj(freeze_walk(f.lhs(), frozen), freeze_walk(f.rhs(), frozen));
        case Kind::Or:
            return Formula::disj(freeze_walk(f.lhs(), frozen), freeze_walk(f.rhs(), frozen));
        default: throw InvariantError("unreachable in freeze");
    }
}

}  // namespace

Formula freeze_modal(Formula f) {
    std::map<Formula, Formula> frozen;
    return freeze_walk(f, frozen);
}

// ---------------------------------------------------------------------------
// Contraction-free sequent search for propositional validity
// ---------------------------------------------------------------------------

namespace {

bool has_modal(Formula f) {
    switch (f.kind()) {
        case Kind::Atom:
        case Kind::Top:
        case Kind::Bot: return false;
        case Kind::Box:
        case Kind::Dia: return true;
        default: return has_modal(f.lhs()) || has_modal(f.rhs());
    }
}

using Context = std::vector<Formula>;  // kept deduplicated

bool contains(const Context& ctx, Formula f) {
    return std::find(ctx.begin(), ctx.end(), f) != ctx.end();
}

void add(Context& ctx, Formula f) {
    if (!contains(ctx, f)) ctx.push_back(f);
}

Context without(const Context& ctx, std::size_t index) {
    Context out = ctx;
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(index));
    return out;
}

/// Provability of ctx => goal. Invertible rules run to saturation; the only
/// branch points left are the right disjunction and the nested-implication
/// left rule.
bool prove(Context ctx, Formula goal) {
    for (bool changed = true; changed;) {
        changed = false;
        if (goal.kind() == Kind::Top) return true;
        if (contains(ctx, goal)) return true;
        if (contains(ctx, Formula::bot())) return true;

        for (std::size_t k = 0; k < ctx.size() && !changed; ++k) {
            Formula f = ctx[k];
            switch (f.kind()) {
                case Kind::And: {
                    Context next = without(ctx, k);
                    add(next, f.lhs());
                    add(next, f.rhs());
                    ctx = std::move(next);
                    changed = true;
                    break;
                }
                case Kind::Top:
                    ctx = without(ctx, k);
                    changed = true;
                    break;
                case Kind::Implies: {
                    Formula a = f.lhs(), b = f.rhs();
                    if (a.kind() == Kind::Top) {
                        Context next = without(ctx, k);
                        add(next, b);
                        ctx = std::move(next);
                        changed = true;
                    } else if (a.kind() == Kind::Bot) {
                        ctx = without(ctx, k);
                        changed = true;
                    } else if (a.kind() == Kind::And) {
                        Context next = without(ctx, k);
                        add(next, Formula::implies(a.lhs(), Formula::implies(a.rhs(), b)));
                        ctx = std::move(next);
                        changed = true;
                    } else if (a.kind() == Kind::Or) {
                        Context next = without(ctx, k);
                        add(next, Formula::implies(a.lhs(), b));
                        add(next, Formula::implies(a.rhs(), b));
                        ctx = std::move(next);
                        changed = true;
                    } else if (a.kind() == Kind::Atom && contains(ctx, a)) {
                        Context next = without(ctx, k);
                        add(next, b);
                        ctx = std::move(next);
                        changed = true;
                    }
                    break;
                }
                default: break;
            }
        }
        if (changed) continue;

        if (goal.kind() == Kind::Implies) {
            add(ctx, goal.lhs());
            goal = goal.rhs();
            changed = true;
            continue;
        }
        if (goal.kind() == Kind::And)
            return prove(ctx, goal.lhs()) && prove(ctx, goal.rhs());
        for (std::size_t k = 0; k < ctx.size(); ++k)
            if (ctx[k].kind() == Kind::Or) {
                Formula f = ctx[k];
                Context left = without(ctx, k), right = without(ctx, k);
                add(left, f.lhs());
                add(right, f.rhs());
                return prove(std::move(left), goal) && prove(std::move(right), goal);
            }
    }

    // ctx now holds atoms, stuck atomic implications and nested implications
    if (goal.kind() == Kind::Or) {
        if (prove(ctx, goal.lhs())) return true;
        if (prove(ctx, goal.rhs())) return true;
    }
    for (std::size_t k = 0; k < ctx.size(); ++k) {
        Formula f = ctx[k];
        if (f.kind() != Kind::Implies || f.lhs().kind() != Kind::Implies) continue;
        Formula d = f.lhs().rhs(), b = f.rhs();
        Context premise = without(ctx, k);
        add(premise, Formula::implies(d, b));
        if (!prove(std::move(premise), f.lhs())) continue;
        Context conclusion = without(ctx, k);
        add(conclusion, b);
        if (prove(std::move(conclusion), goal)) return true;
    }
    return false;
}

}  // namespace

bool ipl_valid(Formula f) {
    if (has_modal(f))
        throw std::invalid_argument("propositional validity needs a modal-free formula");
    return prove({}, f);
}

// ---------------------------------------------------------------------------
// Proof files
// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

std::size_t parse_index(const std::string& tok, std::size_t lineno) {
    try {
        std::size_t pos = 0;
        unsigned long v = std::stoul(tok, &pos);
        if (pos != tok.size() || v == 0) throw std::invalid_argument(tok);
        return v;
    } catch (...) {
        throw FileFormatError("expected a line index, got '" + tok + "'", lineno);
    }
}

Substitution parse_substitution(const std::string& text, std::size_t lineno) {
    Substitution sub;
    std::size_t depth = 0, start = 0;
    std::vector<std::string> parts;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || (text[i] == ',' && depth == 0)) {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        } else if (text[i] == '(') {
            ++depth;
        } else if (text[i] == ')') {
            if (depth == 0) throw FileFormatError("unbalanced ')' in substitution", lineno);
            --depth;
        }
    }
    for (const std::string& part : parts) {
        std::string entry = trim(part);
        if (entry.empty()) continue;
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw FileFormatError("substitution entry needs 'atom=formula'", lineno);
        std::string name = trim(entry.substr(0, eq));
        std::string body = trim(entry.substr(eq + 1));
        if (name.empty() || body.empty())
            throw FileFormatError("substitution entry needs 'atom=formula'", lineno);
        try {
            sub[name] = parse_formula(body);
        } catch (const ParseError& e) {
            throw FileFormatError(std::string("bad substitution formula: ") + e.what(), lineno);
        }
    }
    return sub;
}

Justification parse_justification(const std::string& text, std::size_t lineno) {
    std::istringstream in(text);
    std::string head;
    if (!(in >> head)) throw FileFormatError("missing justification", lineno);
    std::string rest;
    std::getline(in, rest);
    rest = trim(rest);

    if (head == "AX") {
        std::istringstream args(rest);
        std::string name;
        if (!(args >> name)) throw FileFormatError("AX needs a schema name", lineno);
        std::string tail;
        std::getline(args, tail);
        tail = trim(tail);
        just::Axiom ax{name, std::nullopt};
        if (!tail.empty()) {
            if (!tail.starts_with("sub"))
                throw FileFormatError("AX takes an optional 'sub ...' clause", lineno);
            ax.substitution = parse_substitution(trim(tail.substr(3)), lineno);
        }
        return ax;
    }
    if (head == "MP") {
        std::istringstream args(rest);
        std::string a, b;
        if (!(args >> a >> b)) throw FileFormatError("MP needs two line indices", lineno);
        return just::ModusPonens{parse_index(a, lineno), parse_index(b, lineno)};
    }
    if (head == "RBOX" || head == "RDIA") {
        std::istringstream args(rest);
        std::string a;
        if (!(args >> a)) throw FileFormatError(head + " needs a line index", lineno);
        std::size_t idx = parse_index(a, lineno);
        if (head == "RBOX") return just::RuleBox{idx};
        return just::RuleDia{idx};
    }
    if (head == "SUBST") {
        std::istringstream args(rest);
        std::string a;
        if (!(args >> a)) throw FileFormatError("SUBST needs a line index", lineno);
        std::string tail;
        std::getline(args, tail);
        return just::Substituted{parse_index(a, lineno), parse_substitution(trim(tail), lineno)};
    }
    if (head == "IPL") {
        just::IplConsequence ipl;
        std::string item;
        for (char& ch : rest)
            if (ch == ',') ch = ' ';
        std::istringstream args(rest);
        while (args >> item) ipl.cited.push_back(parse_index(item, lineno));
        return ipl;
    }
    if (head == "HYP") return just::Hypothesis{};
    throw FileFormatError("unknown justification '" + head + "'", lineno);
}

}  // namespace

Proof parse_proof(std::string_view text) {
    Proof proof;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;

        std::size_t dot = body.find('.');
        if (dot == std::string::npos) throw FileFormatError("missing 'n.' line number", lineno);
        std::size_t declared = parse_index(trim(body.substr(0, dot)), lineno);
        if (declared != proof.lines.size() + 1)
            throw FileFormatError("expected line number " + std::to_string(proof.lines.size() + 1),
                                  lineno);
        std::size_t semi = body.find(';', dot);
        if (semi == std::string::npos)
            throw FileFormatError("missing ';' before justification", lineno);
        Formula formula;
        try {
            formula = parse_formula(body.substr(dot + 1, semi - dot - 1));
        } catch (const ParseError& e) {
            throw FileFormatError(std::string("bad formula: ") + e.what(), lineno);
        }
        proof.lines.push_back(
            ProofLine{formula, parse_justification(trim(body.substr(semi + 1)), lineno)});
    }
    return proof;
}

std::string format_proof(const Proof& p) {
    std::ostringstream out;
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        const ProofLine& line = p.lines[i];
        out << (i + 1) << ". " << render(line.formula) << " ; ";
        std::visit(
            [&](const auto& j) {
                using T = std::decay_t<decltype(j)>;
                if constexpr (std::is_same_v<T, just::Axiom>) {
                    out << "AX " << j.name;
                    if (j.substitution) {
                        out << " sub ";
                        bool first = true;
                        for (const auto& [name, f] : *j.substitution) {
                            if (!first) out << ", ";
                            out << name << "=" << render(f);
                            first = false;
                        }
                    }
                } else if constexpr (std::is_same_v<T, just::ModusPonens>) {
                    out << "MP " << j.antecedent << " " << j.implication;
                } else if constexpr (std::is_same_v<T, just::RuleBox>) {
                    out << "RBOX " << j.premise;
                } else if constexpr (std::is_same_v<T, just::RuleDia>) {
                    out << "RDIA " << j.premise;
                } else if constexpr (std::is_same_v<T, just::Substituted>) {
                    out << "SUBST " << j.premise;
                    bool first = true;
                    for (const auto& [name, f] : j.substitution) {
                        out << (first ? " " : ", ") << name << "=" << render(f);
                        first = false;
                    }
                } else if constexpr (std::is_same_v<T, just::IplConsequence>) {
                    out << "IPL";
                    for (std::size_t k = 0; k < j.cited.size(); ++k)
                        out << (k ? "," : " ") << j.cited[k];
                } else {
                    out << "HYP";
                }
            },
            line.justification);
        out << "\n";
    }
    return out.str();
}

namespace {

struct LineFailure {
    std::string reason;
};

std::optional<LineFailure> check_line(const Proof& p, std::size_t index) {
    const ProofLine& line = p.lines[index];
    std::size_t lineno = index + 1;
    auto cited = [&](std::size_t n) -> const ProofLine& {
        if (n == 0 || n >= lineno)
            throw FileFormatError("citation must reference an earlier line", lineno);
        return p.lines[n - 1];
    };

    return std::visit(
        [&](const auto& j) -> std::optional<LineFailure> {
            using T = std::decay_t<decltype(j)>;
            if constexpr (std::is_same_v<T, just::Axiom>) {
                const Schema* schema = find_schema(j.name);
                if (!schema) return LineFailure{"unknown schema '" + j.name + "'"};
                if (j.substitution) {
                    if (apply_substitution(schema->pattern, *j.substitution) != line.formula)
                        return LineFailure{"substitution does not yield the stated formula"};
                    return std::nullopt;
                }
                if (!match_schema(*schema, line.formula))
                    return LineFailure{"formula is not an instance of " + j.name};
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, just::ModusPonens>) {
                const ProofLine& a = cited(j.antecedent);
                const ProofLine& imp = cited(j.implication);
                if (imp.formula.kind() != Kind::Implies ||
                    imp.formula.lhs() != a.formula || imp.formula.rhs() != line.formula)
                    return LineFailure{"cited lines do not form a modus ponens step"};
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, just::RuleBox> ||
                                 std::is_same_v<T, just::RuleDia>) {
                constexpr bool boxed = std::is_same_v<T, just::RuleBox>;
                const ProofLine& prem = cited(j.premise);
                if (prem.formula.kind() != Kind::Implies)
                    return LineFailure{"premise is not an implication"};
                Formula want =
                    boxed ? Formula::implies(Formula::box(prem.formula.lhs()),
                                             Formula::box(prem.formula.rhs()))
                          : Formula::implies(Formula::dia(prem.formula.lhs()),
                                             Formula::dia(prem.formula.rhs()));
                if (line.formula != want)
                    return LineFailure{"conclusion does not match the premise under the rule"};
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, just::Substituted>) {
                if (apply_substitution(cited(j.premise).formula, j.substitution) != line.formula)
                    return LineFailure{"substitution of the premise does not yield the formula"};
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, just::IplConsequence>) {
                Formula goal = line.formula;
                // (cited_1 & ... & cited_k) -> current, modalities frozen
                for (std::size_t k = j.cited.size(); k-- > 0;) {
                    Formula prem = cited(j.cited[k]).formula;
                    goal = Formula::implies(prem, goal);
                }
                if (!ipl_valid(freeze_modal(goal)))
                    return LineFailure{"not a propositional consequence of the cited lines"};
                return std::nullopt;
            } else {
                return std::nullopt;  // hypothesis
            }
        },
        line.justification);
}

}  // namespace

ProofCheck check_proof(const Proof& p) {
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        std::optional<LineFailure> failure;
        try {
            failure = check_line(p, i);
        } catch (const FileFormatError& e) {
            failure = LineFailure{e.what()};
        }
        if (failure) return ProofCheck{false, i + 1, failure->reason};
    }
    return ProofCheck{true, 0, ""};
}

}  // namespace ik4
