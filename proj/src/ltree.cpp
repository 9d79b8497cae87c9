#include "ik4/ltree.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "ik4/errors.hpp"

namespace ik4 {

std::size_t LabelledTree::root() const {
    std::size_t r = tree_npos;
    for (std::size_t i = 0; i < parent.size(); ++i)
        if (parent[i] == tree_npos) {
            if (r != tree_npos) throw std::invalid_argument("tree has two roots");
            r = i;
        }
    if (r == tree_npos) throw std::invalid_argument("tree has no root");
    return r;
}

std::vector<std::size_t> LabelledTree::children(std::size_t node) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < parent.size(); ++i)
        if (parent[i] == node) out.push_back(i);
    return out;
}

bool LabelledTree::descendant_or_self(std::size_t ancestor, std::size_t node) const {
    for (std::size_t cur = node;; cur = parent[cur]) {
        if (cur == ancestor) return true;
        if (parent.at(cur) == tree_npos) return false;
    }
}

void validate_tree(const LabelledTree& t) {
    if (t.parent.size() != t.labels.size())
        throw std::invalid_argument("parent/label size mismatch");
    if (t.parent.empty()) throw std::invalid_argument("empty tree");
    std::size_t root = t.root();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t.parent[i] != tree_npos && t.parent[i] >= t.size())
            throw std::invalid_argument("parent index out of range");
        if (!t.labels[i].is_root() && t.labels[i].width() != t.width)
            throw std::invalid_argument("label width mismatch");
        // every node must reach the root without revisiting itself
        std::size_t steps = 0;
        for (std::size_t cur = i; cur != root; cur = t.parent[cur])
            if (++steps > t.size()) throw std::invalid_argument("parent chain has a cycle");
    }
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.parent[i] != tree_npos && !label_leq(t.labels[t.parent[i]], t.labels[i], t.width))
            throw std::invalid_argument("labels are not monotone along an edge");
}

bool is_strict(const LabelledTree& t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t.parent[i] != tree_npos && !label_less(t.labels[t.parent[i]], t.labels[i], t.width))
            return false;
    return true;
}

namespace {

std::string subtree_code(const LabelledTree& t, std::size_t node) {
    std::vector<std::string> child_codes;
    for (std::size_t c : t.children(node)) child_codes.push_back(subtree_code(t, c));
    std::sort(child_codes.begin(), child_codes.end());
    std::string code = "(" + t.labels[node].to_string();
    for (auto& cc : child_codes) code += cc;
    code += ")";
    return code;
}

}  // namespace

bool is_nice(const LabelledTree& t) {
    if (!is_strict(t)) return false;
    for (std::size_t k = 0; k < t.size(); ++k) {
        std::vector<std::string> codes;
        for (std::size_t c : t.children(k)) codes.push_back(subtree_code(t, c));
        std::sort(codes.begin(), codes.end());
        if (std::adjacent_find(codes.begin(), codes.end()) != codes.end()) return false;
    }
    return true;
}

bool check_embedding(const LabelledTree& source, const LabelledTree& target, const Embedding& map) {
    if (map.size() != source.size()) return false;
    for (std::size_t k = 0; k < source.size(); ++k) {
        if (map[k] >= target.size()) return false;
        if (source.labels[k] != target.labels[map[k]]) return false;
    }
    for (std::size_t j = 0; j < source.size(); ++j) {
        std::size_t i = source.parent[j];
        if (i == tree_npos) continue;
        if (!target.descendant_or_self(map[i], map[j])) return false;
    }
    return true;
}

std::string canonical_code(const LabelledTree& t) { return subtree_code(t, t.root()); }

// ---------------------------------------------------------------------------
// Duplicate and triplicate elimination
// ---------------------------------------------------------------------------

namespace {

/// Shared scaffolding: nodes of the input tree are marked dead instead of
/// renumbered while the elimination loop runs; `redirect` carries every input
/// node to its surviving representative.
struct Workspace {
    explicit Workspace(const LabelledTree& input)
        : tree(input), alive(input.size(), true), redirect(input.size()) {
        std::iota(redirect.begin(), redirect.end(), std::size_t{0});
    }

    LabelledTree tree;  // parent[] rewritten in place; dead slots linger
    std::vector<bool> alive;
    std::vector<std::size_t> redirect;  // input node -> current representative

    std::vector<std::size_t> live_children(std::size_t node) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < tree.size(); ++i)
            if (alive[i] && tree.parent[i] == node) out.push_back(i);
        return out;
    }

    std::string live_code(std::size_t node) const {
        std::vector<std::string> child_codes;
        for (std::size_t c : live_children(node)) child_codes.push_back(live_code(c));
        std::sort(child_codes.begin(), child_codes.end());
        std::string code = "(" + tree.labels[node].to_string();
        for (auto& cc : child_codes) code += cc;
        code += ")";
        return code;
    }

    Reduction finish(const LabelledTree& input) {
        std::vector<std::size_t> compact(tree.size(), tree_npos);
        Reduction out;
        out.tree.width = tree.width;
        for (std::size_t i = 0; i < tree.size(); ++i) {
            if (!alive[i]) continue;
            compact[i] = out.tree.parent.size();
            out.tree.parent.push_back(tree.parent[i]);  // fixed up below
            out.tree.labels.push_back(tree.labels[i]);
            out.into_input.push_back(i);
        }
        for (auto& p : out.tree.parent)
            if (p != tree_npos) p = compact[p];
        out.into_result.resize(input.size());
        for (std::size_t i = 0; i < input.size(); ++i) {
            std::size_t rep = i;
            while (!alive[rep]) rep = redirect[rep];
            out.into_result[i] = compact[rep];
        }
        return out;
    }
};

}  // namespace

Reduction strictify(const LabelledTree& input) {
    validate_tree(input);
    Workspace ws(input);
    while (true) {
        // lowest duplicate edge (i, j) by (i, j)
        std::size_t di = tree_npos, dj = tree_npos;
        for (std::size_t j = 0; j < ws.tree.size() && di == tree_npos; ++j) {
            if (!ws.alive[j]) continue;
            std::size_t i = ws.tree.parent[j];
            if (i == tree_npos) continue;
            if (ws.tree.labels[i] == ws.tree.labels[j]) {
                di = i;
                dj = j;
            }
        }
        if (di == tree_npos) break;
        // delete j; its children move to i
        ws.alive[dj] = false;
        ws.redirect[dj] = di;
        for (std::size_t k = 0; k < ws.tree.size(); ++k)
            if (ws.alive[k] && ws.tree.parent[k] == dj) ws.tree.parent[k] = di;
    }
    Reduction out = ws.finish(input);
    if (!is_strict(out.tree)) throw InvariantError("strictify produced a non-strict tree");
    return out;
}

namespace {

/// Bijection between two isomorphic live subtrees, pairing children in
/// (code, id) order.
void match_isomorphic(const Workspace& ws, std::size_t a, std::size_t b,
                      std::map<std::size_t, std::size_t>& onto) {
    onto[a] = b;
    auto order = [&](std::vector<std::size_t> nodes) {
        std::vector<std::pair<std::string, std::size_t>> keyed;
        for (std::size_t n : nodes) keyed.emplace_back(ws.live_code(n), n);
        std::sort(keyed.begin(), keyed.end());
        return keyed;
    };
    auto ca = order(ws.live_children(a));
    auto cb = order(ws.live_children(b));
    if (ca.size() != cb.size()) throw InvariantError("isomorphic subtrees with unequal arity");
    for (std::size_t k = 0; k < ca.size(); ++k) match_isomorphic(ws, ca[k].second, cb[k].second, onto);
}

}  // namespace

Reduction nicify(const LabelledTree& input) {
    validate_tree(input);
    if (!is_strict(input)) throw std::invalid_argument("nicify requires a strict tree");
    Workspace ws(input);
    while (true) {
        // least (k, i, j) with children i < j of k carrying isomorphic subtrees
        std::size_t ti = tree_npos, tj = tree_npos;
        for (std::size_t k = 0; k < ws.tree.size() && ti == tree_npos; ++k) {
            if (!ws.alive[k]) continue;
            auto kids = ws.live_children(k);
            std::vector<std::string> codes;
            for (std::size_t c : kids) codes.push_back(ws.live_code(c));
            for (std::size_t x = 0; x < kids.size() && ti == tree_npos; ++x)
                for (std::size_t y = x + 1; y < kids.size(); ++y)
                    if (codes[x] == codes[y]) {
                        ti = kids[x];
                        tj = kids[y];
                        break;
                    }
        }
        if (ti == tree_npos) break;
        // nodes of the deleted subtree redirect through the isomorphism
        std::map<std::size_t, std::size_t> onto;  // kept subtree -> deleted subtree
        match_isomorphic(ws, ti, tj, onto);
        for (auto [a, b] : onto) {
            ws.alive[b] = false;
            ws.redirect[b] = a;
        }
    }
    Reduction out = ws.finish(input);
    if (!is_nice(out.tree)) throw InvariantError("nicify produced a non-nice tree");
    return out;
}

// ---------------------------------------------------------------------------
// Embedding search
// ---------------------------------------------------------------------------

namespace {

struct EmbedSearch {
    const LabelledTree& s;
    const LabelledTree& t;
    std::vector<std::vector<std::size_t>> s_children;
    std::vector<std::vector<std::size_t>> t_desc;  // descendant-or-self, ascending
    std::vector<signed char> memo;                 // 0 unknown, 1 yes, -1 no

    EmbedSearch(const LabelledTree& s, const LabelledTree& t)
        : s(s), t(t), memo(s.size() * t.size(), 0) {
        s_children.resize(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) s_children[i] = s.children(i);
        t_desc.resize(t.size());
        for (std::size_t d = 0; d < t.size(); ++d)
            for (std::size_t a = 0; a < t.size(); ++a)
                if (t.descendant_or_self(a, d)) t_desc[a].push_back(d);
    }

    bool can(std::size_t sn, std::size_t tn) {
        signed char& m = memo[sn * t.size() + tn];
        if (m != 0) return m > 0;
        bool ok = s.labels[sn] == t.labels[tn];
        if (ok) {
            for (std::size_t c : s_children[sn]) {
                bool found = false;
                for (std::size_t d : t_desc[tn])
                    if (can(c, d)) {
                        found = true;
                        break;
                    }
                if (!found) {
                    ok = false;
                    break;
                }
            }
        }
        m = ok ? 1 : -1;
        return ok;
    }

    void assign(std::size_t sn, std::size_t tn, Embedding& map) {
        map[sn] = tn;
        for (std::size_t c : s_children[sn])
            for (std::size_t d : t_desc[tn])
                if (can(c, d)) {
                    assign(c, d, map);
                    break;
                }
    }
};

}  // namespace

std::optional<Embedding> embeds_into(const LabelledTree& source, const LabelledTree& target) {
    if (source.width != target.width) throw std::invalid_argument("tree label width mismatch");
    EmbedSearch search(source, target);
    std::size_t root = source.root();
    for (std::size_t tn = 0; tn < target.size(); ++tn) {
        if (!search.can(root, tn)) continue;
        Embedding map(source.size(), tree_npos);
        search.assign(root, tn, map);
        if (!check_embedding(source, target, map))
            throw InvariantError("embedding reconstruction failed");
        return map;
    }
    return std::nullopt;
}

std::optional<MutualEmbedding> equivalent_sim(const LabelledTree& a, const LabelledTree& b) {
    auto fwd = embeds_into(a, b);
    if (!fwd) return std::nullopt;
    auto bwd = embeds_into(b, a);
    if (!bwd) return std::nullopt;
    return MutualEmbedding{std::move(*fwd), std::move(*bwd)};
}

std::optional<std::size_t> is_dreary(std::span<const LabelledTree> family) {
    std::size_t n = family.size();
    if (n < 2) return std::nullopt;
    for (std::size_t m = 1; m < n; ++m)
        if (equivalent_sim(family[m - 1], family[n - 1])) return m;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// BigNat and the nice-tree count recurrence
// ---------------------------------------------------------------------------

void BigNat::trim() {
    while (words_.size() > 1 && words_.back() == 0) words_.pop_back();
}

BigNat BigNat::pow2(std::size_t exponent) {
    BigNat out;
    out.words_.assign(exponent / 64 + 1, 0);
    out.words_.back() = std::uint64_t{1} << (exponent % 64);
    return out;
}

BigNat& BigNat::operator*=(std::uint64_t small) {
    unsigned __int128 carry = 0;
    for (auto& w : words_) {
        unsigned __int128 prod = static_cast<unsigned __int128>(w) * small + carry;
        w = static_cast<std::uint64_t>(prod);
        carry = prod >> 64;
    }
    if (carry) words_.push_back(static_cast<std::uint64_t>(carry));
    trim();
    return *this;
}

BigNat& BigNat::operator<<=(std::size_t bits) {
    if (*this == BigNat(0)) return *this;
    std::size_t word_shift = bits / 64, bit_shift = bits % 64;
    std::vector<std::uint64_t> out(words_.size() + word_shift + 1, 0);
    for (std::size_t i = 0; i < words_.size(); ++i) {
        out[i + word_shift] |= words_[i] << bit_shift;
        if (bit_shift) out[i + word_shift + 1] |= words_[i] >> (64 - bit_shift);
    }
    words_ = std::move(out);
    trim();
    return *this;
}

std::uint64_t BigNat::as_u64() const {
    if (!fits_u64()) throw std::overflow_error("value exceeds 64 bits");
    return words_[0];
}

std::size_t BigNat::bit_size() const {
    std::uint64_t top = words_.back();
    std::size_t bits = (words_.size() - 1) * 64;
    while (top) {
        ++bits;
        top >>= 1;
    }
    return bits;
}

int BigNat::compare(const BigNat& o) const {
    if (words_.size() != o.words_.size()) return words_.size() < o.words_.size() ? -1 : 1;
    for (std::size_t i = words_.size(); i-- > 0;)
        if (words_[i] != o.words_[i]) return words_[i] < o.words_[i] ? -1 : 1;
    return 0;
}

std::string BigNat::to_string() const {
    std::vector<std::uint64_t> work = words_;
    std::string digits;
    auto all_zero = [&] {
        for (auto w : work)
            if (w) return false;
        return true;
    };
    while (!all_zero()) {
        // divide by 10^9 in place
        std::uint64_t rem = 0;
        for (std::size_t i = work.size(); i-- > 0;) {
            unsigned __int128 cur = (static_cast<unsigned __int128>(rem) << 64) | work[i];
            work[i] = static_cast<std::uint64_t>(cur / 1000000000u);
            rem = static_cast<std::uint64_t>(cur % 1000000000u);
        }
        for (int k = 0; k < 9; ++k) {
            digits += static_cast<char>('0' + rem % 10);
            rem /= 10;
        }
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    if (digits.empty()) digits = "0";
    std::reverse(digits.begin(), digits.end());
    return digits;
}

BigNat nlt_bound(std::size_t height, std::uint64_t card_p) {
    constexpr std::size_t kMaxBits = std::size_t{1} << 24;  // ~2 MiB of number
    BigNat value(card_p);
    for (std::size_t h = 1; h <= height; ++h) {
        if (!value.fits_u64() || value.as_u64() > kMaxBits)
            throw std::overflow_error("tree-count bound exceeds representable size");
        BigNat next = BigNat::pow2(static_cast<std::size_t>(value.as_u64()));
        next *= card_p;
        value = std::move(next);
    }
    return value;
}

// ---------------------------------------------------------------------------
// Nice-tree enumeration
// ---------------------------------------------------------------------------

namespace {

LabelledTree graft(std::size_t width, const Label& root_label,
                   const std::vector<const LabelledTree*>& subtrees) {
    LabelledTree out;
    out.width = width;
    out.parent.push_back(tree_npos);
    out.labels.push_back(root_label);
    for (const LabelledTree* sub : subtrees) {
        std::size_t offset = out.size();
        for (std::size_t i = 0; i < sub->size(); ++i) {
            std::size_t p = sub->parent[i];
            out.parent.push_back(p == tree_npos ? 0 : p + offset);
            out.labels.push_back(sub->labels[i]);
        }
    }
    return out;
}

}  // namespace

void enumerate_nice_trees_over(std::span<const Label> labels, std::size_t width,
                               std::size_t max_height,
                               const std::function<bool(const LabelledTree&)>& yield) {
    constexpr std::size_t kMaxPool = 22;
    std::size_t m = labels.size();
    std::vector<std::vector<std::size_t>> above(m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (label_less(labels[a], labels[b], width)) above[a].push_back(b);

    // reps[l]: one tree per isomorphism class rooted at label l, height <= h
    std::vector<std::vector<LabelledTree>> reps(m);
    for (std::size_t l = 0; l < m; ++l) reps[l].push_back(LabelledTree::single(width, labels[l]));

    for (std::size_t h = 1; h <= max_height; ++h) {
        std::vector<std::vector<LabelledTree>> next(m);
        for (std::size_t l = 0; l < m; ++l) {
            std::vector<const LabelledTree*> pool;
            for (std::size_t b : above[l])
                for (const LabelledTree& tr : reps[b]) pool.push_back(&tr);
            if (pool.size() > kMaxPool)
                throw std::overflow_error("nice-tree population too large to enumerate");
            std::uint64_t subsets = std::uint64_t{1} << pool.size();
            for (std::uint64_t mask = 0; mask < subsets; ++mask) {
                std::vector<const LabelledTree*> chosen;
                for (std::size_t k = 0; k < pool.size(); ++k)
                    if ((mask >> k) & 1) chosen.push_back(pool[k]);
                next[l].push_back(graft(width, labels[l], chosen));
            }
        }
        reps = std::move(next);
    }
    for (std::size_t l = 0; l < m; ++l)
        for (const LabelledTree& tr : reps[l])
            if (!yield(tr)) return;
}

void enumerate_nice_trees(std::size_t width, std::size_t max_height,
                          const std::function<bool(const LabelledTree&)>& yield) {
    if (width > 10) throw std::invalid_argument("label universe too wide to enumerate");
    std::vector<Label> labels;
    labels.push_back(Label::root());
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << width); ++mask)
        labels.push_back(Label::set(Bitset::from_word(width, mask)));
    enumerate_nice_trees_over(labels, width, max_height, yield);
}

// ---------------------------------------------------------------------------
// Tree expressions
// ---------------------------------------------------------------------------

namespace {

class TreeParser {
public:
    TreeParser(std::string_view text, std::size_t width) : text_(text), width_(width) {}

    LabelledTree parse() {
        out_.width = width_;
        skip_ws();
        node(tree_npos);
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        validate_tree(out_);
        return std::move(out_);
    }

private:
    void node(std::size_t parent) {
        skip_ws();
        expect('(');
        std::size_t index = out_.size();
        out_.parent.push_back(parent);
        out_.labels.push_back(label());
        skip_ws();
        while (peek() == '(') {
            node(index);
            skip_ws();
        }
        expect(')');
    }

    Label label() {
        skip_ws();
        if (text_.substr(pos_).starts_with("-1")) {
            pos_ += 2;
            return Label::root();
        }
        expect('{');
        Bitset set(width_);
        skip_ws();
        if (peek() == '}') {
            ++pos_;
            return Label::set(std::move(set));
        }
        while (true) {
            set.set(number());
            skip_ws();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect('}');
            return Label::set(std::move(set));
        }
    }

    std::size_t number() {
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a closure position");
        std::size_t v = 0, start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) v = v * 10 + (text_[pos_++] - '0');
        if (v >= width_) throw ParseError("closure position out of range", start);
        return v;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    std::string_view text_;
    std::size_t width_;
    std::size_t pos_ = 0;
    LabelledTree out_;
};

void format_node(const LabelledTree& t, std::size_t node, std::string& out) {
    out += "(" + t.labels[node].to_string();
    for (std::size_t c : t.children(node)) {
        out += " ";
        format_node(t, c, out);
    }
    out += ")";
}

}  // namespace

LabelledTree parse_tree(std::string_view text, std::size_t width) {
    return TreeParser(text, width).parse();
}

std::string format_tree(const LabelledTree& t) {
    std::string out;
    format_node(t, t.root(), out);
    return out;
}

}  // namespace ik4
