#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ik4/formula.hpp"
#include "ik4/relation.hpp"

namespace ik4 {

/// Birelational frame: an intuitionistic preorder `leq` (stored already
/// reflexively-transitively closed) and a modal relation `rel` (stored raw).
class Frame {
public:
    Frame(Relation leq, Relation rel);

    std::size_t size() const { return leq_.size(); }
    const Relation& leq() const { return leq_; }
    const Relation& rel() const { return rel_; }

    bool operator==(const Frame&) const = default;

private:
    Relation leq_;
    Relation rel_;
};

/// Builds a frame from generator pairs: `le` pairs are closed
/// reflexive-transitively, `r` pairs are taken verbatim.
Frame frame_from_generators(std::size_t n,
                            const std::vector<std::pair<std::size_t, std::size_t>>& le,
                            const std::vector<std::pair<std::size_t, std::size_t>>& r);

/// The up-closed subsets of the preorder, in ascending bitmask order.
/// These are exactly the admissible atom extensions.
std::vector<Bitset> upward_closed_subsets(const Relation& leq);

class Valuation {
public:
    Valuation() = default;

    void assign(const std::string& atom, Bitset worlds) { map_[atom] = std::move(worlds); }
    /// Worlds where the atom holds; unassigned atoms are empty.
    Bitset worlds(const std::string& atom, std::size_t n) const;
    const std::map<std::string, Bitset>& assignments() const { return map_; }

    bool operator==(const Valuation&) const = default;

private:
    std::map<std::string, Bitset> map_;
};

/// Frame plus valuation. Construction checks that every assigned world set is
/// up-closed under the frame preorder.
class Model {
public:
    Model(Frame frame, Valuation valuation);

    const Frame& frame() const { return frame_; }
    const Valuation& valuation() const { return valuation_; }
    std::size_t size() const { return frame_.size(); }

    bool operator==(const Model&) const = default;

private:
    Frame frame_;
    Valuation valuation_;
};

/// The four satisfiability readings of the modal clauses. BD evaluates both
/// modalities at the current world; FS, P and W route the box through
/// ≤-successors first and differ on the diamond.
enum class Variant { BD, FS, P, W };

constexpr std::array<Variant, 4> all_variants{Variant::BD, Variant::FS, Variant::P, Variant::W};
const char* variant_name(Variant v);
std::optional<Variant> variant_from_name(std::string_view name);

/// Satisfaction-set evaluator for one model and variant, memoised over the
/// interned formula DAG. Reusable across formulas sharing subterms.
class Evaluator {
public:
    Evaluator(const Model& model, Variant variant) : model_(&model), variant_(variant) {}

    const Bitset& satisfied(Formula f);
    bool forces(std::size_t world, Formula f);

private:
    Bitset compute(Formula f);

    const Model* model_;
    Variant variant_;
    std::unordered_map<Formula, Bitset, FormulaHash> memo_;
};

bool forces(const Model& m, std::size_t world, Formula f, Variant v = Variant::BD);
bool true_in_model(const Model& m, Formula f, Variant v = Variant::BD);

enum class FrameCondition { Transitive, Upward, Downward, Forward };

const char* frame_condition_name(FrameCondition c);

struct ConditionCheck {
    bool holds = true;
    std::array<std::size_t, 3> witness{};  // meaningful only when !holds
};

/// Checks one of the four named relational inclusions, returning a witness
/// triple (s,t,u) on failure:
///   transitive: sRt, tRu, not sRu
///   upward:     sRt, u<=t, and no v with v<=s and vRu
///   downward:   s<=t, tRu, and no v with sRv and v<=u
///   forward:    t<=s, tRu, and no v with sRv and u<=v
ConditionCheck check_frame_condition(const Frame& f, FrameCondition c);

struct ValidityCheck {
    bool valid = true;
    std::optional<Valuation> valuation;  // falsifying, when invalid
    std::size_t world = 0;
};

/// Validity over all valuations of the atoms occurring in the formula, each
/// atom ranging over the up-closed subsets. Restricting to occurring atoms is
/// sufficient: satisfaction only inspects the valuation at those atoms.
ValidityCheck valid_in_frame(const Frame& f, Formula a, Variant v = Variant::BD);

struct HeredityViolation {
    Formula formula;
    std::size_t from;
    std::size_t to;
};

/// Worlds s<=t with s forcing a pool formula that t does not (BD reading).
std::vector<HeredityViolation> check_heredity(const Model& m, std::span<const Formula> pool);

/// Line-oriented model file:
///   worlds N
///   le i j        (preorder generators; closed on load)
///   r i j         (modal relation, verbatim)
///   val p i j ... (worlds where atom p holds)
/// Blank lines and lines starting with '#' are ignored.
Model parse_model(std::string_view text);
std::string format_model(const Model& m);

}  // namespace ik4
