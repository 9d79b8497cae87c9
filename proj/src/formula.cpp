#include "ik4/formula.hpp"

#include <cctype>
#include <deque>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>

namespace ik4 {

struct Formula::Node {
    Kind kind;
    std::string name;       // Atom
    const Node* left = nullptr;
    const Node* right = nullptr;
    std::size_t seq = 0;
};

namespace {

struct InternKey {
    Kind kind;
    std::string_view name;
    const Formula::Node* left;
    const Formula::Node* right;
    bool operator==(const InternKey&) const = default;
};

struct InternKeyHash {
    std::size_t operator()(const InternKey& k) const {
        std::size_t h = static_cast<std::size_t>(k.kind);
        h = h * 1000003u ^ std::hash<std::string_view>{}(k.name);
        h = h * 1000003u ^ std::hash<const void*>{}(k.left);
        h = h * 1000003u ^ std::hash<const void*>{}(k.right);
        return h;
    }
};

class Interner {
public:
    const Formula::Node* get(Kind kind, std::string_view name, const Formula::Node* l,
                             const Formula::Node* r) {
        std::lock_guard lock(mutex_);
        InternKey key{kind, name, l, r};
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
        nodes_.push_back(Formula::Node{kind, std::string(name), l, r, nodes_.size()});
        const Formula::Node* node = &nodes_.back();
        table_.emplace(InternKey{kind, node->name, l, r}, node);
        return node;
    }

    static Interner& instance() {
        static Interner interner;
        return interner;
    }

private:
    std::mutex mutex_;
    std::deque<Formula::Node> nodes_;
    std::unordered_map<InternKey, const Formula::Node*, InternKeyHash> table_;
};

const Formula::Node* require(const Formula::Node* n) {
    if (!n) throw std::invalid_argument("null formula");
    return n;
}

}  // namespace

Formula Formula::atom(std::string_view name) {
    if (name.empty()) throw std::invalid_argument("empty atom name");
    return Formula(Interner::instance().get(Kind::Atom, name, nullptr, nullptr));
}
Formula Formula::top() { return Formula(Interner::instance().get(Kind::Top, {}, nullptr, nullptr)); }
Formula Formula::bot() { return Formula(Interner::instance().get(Kind::Bot, {}, nullptr, nullptr)); }
Formula Formula::implies(Formula l, Formula r) {
    return Formula(Interner::instance().get(Kind::Implies, {}, require(l.node_), require(r.node_)));
}
Formula Formula::conj(Formula l, Formula r) {
    return Formula(Interner::instance().get(Kind::And, {}, require(l.node_), require(r.node_)));
}
Formula Formula::disj(Formula l, Formula r) {
    return Formula(Interner::instance().get(Kind::Or, {}, require(l.node_), require(r.node_)));
}
Formula Formula::box(Formula b) {
    return Formula(Interner::instance().get(Kind::Box, {}, require(b.node_), nullptr));
}
Formula Formula::dia(Formula b) {
    return Formula(Interner::instance().get(Kind::Dia, {}, require(b.node_), nullptr));
}

Kind Formula::kind() const { return require(node_)->kind; }
const std::string& Formula::atom_name() const {
    if (kind() != Kind::Atom) throw std::invalid_argument("not an atom");
    return node_->name;
}
Formula Formula::lhs() const {
    if (!is_binary()) throw std::invalid_argument("not a binary formula");
    return Formula(node_->left);
}
Formula Formula::rhs() const {
    if (!is_binary()) throw std::invalid_argument("not a binary formula");
    return Formula(node_->right);
}
Formula Formula::body() const {
    if (!is_modal()) throw std::invalid_argument("not a modal formula");
    return Formula(node_->left);
}
std::size_t Formula::id() const { return require(node_)->seq; }
std::string Formula::str() const { return render(*this); }

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Formula parse() {
        Formula f = implication();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    Formula implication() {
        Formula lhs = disjunction();
        skip_ws();
        if (try_consume("->")) return Formula::implies(lhs, implication());
        return lhs;
    }

    Formula disjunction() {
        Formula f = conjunction();
        skip_ws();
        while (peek() == '|') {
            ++pos_;
            f = Formula::disj(f, conjunction());
            skip_ws();
        }
        return f;
    }

    Formula conjunction() {
        Formula f = prefix();
        skip_ws();
        while (peek() == '&') {
            ++pos_;
            f = Formula::conj(f, prefix());
            skip_ws();
        }
        return f;
    }

    Formula prefix() {
        skip_ws();
        if (try_consume("~")) return Formula::neg(prefix());
        if (try_consume("[]")) return Formula::box(prefix());
        if (try_consume("<>")) return Formula::dia(prefix());
        return primary();
    }

    Formula primary() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            Formula f = implication();
            skip_ws();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return f;
        }
        if (c == 'T') {
            ++pos_;
            return Formula::top();
        }
        if (c == 'F') {
            ++pos_;
            return Formula::bot();
        }
        if (c >= 'a' && c <= 'z') {
            std::size_t start = pos_;
            ++pos_;
            while (pos_ < text_.size()) {
                char d = text_[pos_];
                if ((d >= 'a' && d <= 'z') || (d >= '0' && d <= '9') || d == '_')
                    ++pos_;
                else
                    break;
            }
            return Formula::atom(text_.substr(start, pos_ - start));
        }
        fail(pos_ == text_.size() ? "unexpected end of input" : "unexpected character");
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool try_consume(std::string_view tok) {
        skip_ws();
        if (text_.substr(pos_).starts_with(tok)) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// Printing precedence levels; higher binds tighter.
int precedence(Kind k) {
    switch (k) {
        case Kind::Implies: return 0;
        case Kind::Or: return 1;
        case Kind::And: return 2;
        case Kind::Box:
        case Kind::Dia: return 3;
        default: return 4;
    }
}

void render_to(const Formula& f, int min_prec, std::string& out) {
    int p = precedence(f.kind());
    bool parens = p < min_prec;
    if (parens) out += '(';
    switch (f.kind()) {
        case Kind::Atom: out += f.atom_name(); break;
        case Kind::Top: out += 'T'; break;
        case Kind::Bot: out += 'F'; break;
        case Kind::Implies:
            render_to(f.lhs(), 1, out);
            out += " -> ";
            render_to(f.rhs(), 0, out);
            break;
        case Kind::Or:
            render_to(f.lhs(), 1, out);
            out += " | ";
            render_to(f.rhs(), 2, out);
            break;
        case Kind::And:
            render_to(f.lhs(), 2, out);
            out += " & ";
            render_to(f.rhs(), 3, out);
            break;
        case Kind::Box:
            out += "[]";
            render_to(f.body(), 3, out);
            break;
        case Kind::Dia:
            out += "<>";
            render_to(f.body(), 3, out);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string render(const Formula& f) {
    std::string out;
    render_to(f, 0, out);
    return out;
}

std::size_t symbol_length(Formula f) {
    switch (f.kind()) {
        case Kind::Atom:
        case Kind::Top:
        case Kind::Bot: return 1;
        case Kind::Box:
        case Kind::Dia: return 1 + symbol_length(f.body());
        default: return symbol_length(f.lhs()) + symbol_length(f.rhs()) + 3;
    }
}

std::vector<std::string> atoms_of(Formula f) {
    std::set<std::string> names;
    std::vector<Formula> stack{f};
    std::unordered_map<Formula, bool, FormulaHash> seen;
    while (!stack.empty()) {
        Formula g = stack.back();
        stack.pop_back();
        if (seen[g]) continue;
        seen[g] = true;
        switch (g.kind()) {
            case Kind::Atom: names.insert(g.atom_name()); break;
            case Kind::Top:
            case Kind::Bot: break;
            case Kind::Box:
            case Kind::Dia: stack.push_back(g.body()); break;
            default:
                stack.push_back(g.lhs());
                stack.push_back(g.rhs());
        }
    }
    return {names.begin(), names.end()};
}

ClosureSet::ClosureSet(Formula seed) : seed_(seed) {
    if (!seed.valid()) throw std::invalid_argument("null closure seed");
    std::queue<Formula> pending;
    auto add = [&](Formula f) {
        if (index_.emplace(f, members_.size()).second) {
            members_.push_back(f);
            pending.push(f);
        }
    };
    add(seed);
    while (!pending.empty()) {
        Formula f = pending.front();
        pending.pop();
        switch (f.kind()) {
            case Kind::Implies:
            case Kind::And:
            case Kind::Or:
                add(f.lhs());
                add(f.rhs());
                break;
            case Kind::Box:
            case Kind::Dia: add(f.body()); break;
            default: break;
        }
    }
}

std::optional<std::size_t> ClosureSet::index_of(Formula f) const {
    auto it = index_.find(f);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

ClosureSet closure(Formula f) { return ClosureSet(f); }

bool label_leq(const Label& a, const Label& b, std::size_t width) {
    if (!a.is_root() && a.width() != width)
        throw std::invalid_argument("label width mismatch with poset");
    if (!b.is_root() && b.width() != width)
        throw std::invalid_argument("label width mismatch with poset");
    if (a.is_root()) return true;
    if (b.is_root()) return false;
    return a.formulas().subset_of(b.formulas());
}

bool label_less(const Label& a, const Label& b, std::size_t width) {
    return label_leq(a, b, width) && !label_leq(b, a, width);
}

std::uint64_t LabelPoset::cardinality() const {
    if (width() >= 64) throw std::overflow_error("label universe exceeds 64-bit count");
    return 1 + (std::uint64_t{1} << width());
}

}  // namespace ik4
