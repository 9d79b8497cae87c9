#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ik4/formula.hpp"

namespace ik4 {

inline constexpr std::size_t tree_npos = std::numeric_limits<std::size_t>::max();

/// Finite tree with monotone labels: along every edge the parent label sits
/// at or below the child label in the label order (`label_leq` over `width`).
/// Nodes are 0..size-1; the root has parent tree_npos.
struct LabelledTree {
    std::size_t width = 0;  // bitmask width of set labels
    std::vector<std::size_t> parent;
    std::vector<Label> labels;

    std::size_t size() const { return parent.size(); }
    std::size_t root() const;
    std::vector<std::size_t> children(std::size_t node) const;
    bool descendant_or_self(std::size_t ancestor, std::size_t node) const;

    static LabelledTree single(std::size_t width, Label label) {
        return LabelledTree{width, {tree_npos}, {std::move(label)}};
    }
};

/// Throws std::invalid_argument when the structure is not a labelled tree
/// (bad parent indices, not exactly one root, a cycle, or a non-monotone
/// edge).
void validate_tree(const LabelledTree& t);

/// Every edge strictly increases the label.
bool is_strict(const LabelledTree& t);

/// Strict, and no node has two distinct children with isomorphic subtrees.
bool is_nice(const LabelledTree& t);

/// Node map witnessing a tree embedding: edges go to descendant-or-self
/// pairs and labels are preserved. Not required to be injective.
using Embedding = std::vector<std::size_t>;

bool check_embedding(const LabelledTree& source, const LabelledTree& target, const Embedding& map);

struct Reduction {
    LabelledTree tree;
    Embedding into_result;  // input node -> result node
    Embedding into_input;   // result node -> input node
};

/// Contracts duplicate edges (equal labels along an edge) until the tree is
/// strict. Node count never increases; the returned embeddings witness
/// mutual embeddability with the input. Duplicates are processed lowest node
/// ids first.
Reduction strictify(const LabelledTree& t);

/// Deletes, among children of a common parent with isomorphic subtrees, the
/// higher-id subtree until no such pair remains. Input must be strict.
Reduction nicify(const LabelledTree& t);

/// AHU-style canonical code; equal codes iff the trees are isomorphic
/// (respecting labels, ignoring sibling order).
std::string canonical_code(const LabelledTree& t);

/// Exhaustive embedding search, memoised per (source node, target node).
/// Widths must agree.
std::optional<Embedding> embeds_into(const LabelledTree& source, const LabelledTree& target);

struct MutualEmbedding {
    Embedding forward;   // a -> b
    Embedding backward;  // b -> a
};

/// Mutual embeddability (the similarity relation between trees).
std::optional<MutualEmbedding> equivalent_sim(const LabelledTree& a, const LabelledTree& b);

/// Least index m (1-based) with family[m] similar to the last member, for a
/// family indexed 1..n. Empty or singleton families are never dreary.
std::optional<std::size_t> is_dreary(std::span<const LabelledTree> family);

/// Unsigned arbitrary-precision natural, just enough for the tree-count
/// recurrence.
class BigNat {
public:
    BigNat() : words_{0} {}
    explicit BigNat(std::uint64_t v) : words_{v} {}

    static BigNat pow2(std::size_t exponent);

    BigNat& operator*=(std::uint64_t small);
    BigNat& operator<<=(std::size_t bits);

    bool fits_u64() const { return words_.size() == 1; }
    std::uint64_t as_u64() const;
    std::size_t bit_size() const;

    int compare(const BigNat& o) const;
    bool operator==(const BigNat& o) const { return compare(o) == 0; }
    bool operator<(const BigNat& o) const { return compare(o) < 0; }
    bool operator<=(const BigNat& o) const { return compare(o) <= 0; }

    std::string to_string() const;  // decimal

private:
    void trim();
    std::vector<std::uint64_t> words_;  // little-endian
};

/// The exact recurrence bounding the number of nice trees of height at most
/// h over a label universe of the given cardinality: card_p at h=0, then
/// card_p * 2^previous. An upper bound on isomorphism classes, not the exact
/// count (strictness makes it an overcount). Throws std::overflow_error once
/// the value would exceed a practical size limit.
BigNat nlt_bound(std::size_t height, std::uint64_t card_p);

/// Yields exactly one representative per isomorphism class of nice trees of
/// height at most max_height, over the label universe {root sentinel} plus
/// all subsets of the given width. Return false from the callback to stop.
/// Throws std::overflow_error when an intermediate population exceeds an
/// internal limit.
void enumerate_nice_trees(std::size_t width, std::size_t max_height,
                          const std::function<bool(const LabelledTree&)>& yield);

/// Same enumeration over an explicit list of labels (ordered by label_leq
/// at the given width).
void enumerate_nice_trees_over(std::span<const Label> labels, std::size_t width,
                               std::size_t max_height,
                               const std::function<bool(const LabelledTree&)>& yield);

/// Textual tree expression: `(label child child ...)` with labels `-1` or
/// `{i,j,...}` over closure positions. Throws ParseError.
LabelledTree parse_tree(std::string_view text, std::size_t width);
std::string format_tree(const LabelledTree& t);

}  // namespace ik4
