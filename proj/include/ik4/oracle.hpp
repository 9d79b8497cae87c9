#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ik4/formula.hpp"
#include "ik4/semantics.hpp"

namespace ik4 {

/// Answers the existence queries the saturation engine makes about worlds:
/// satisfaction of closure members, maximal refuting extensions, modal
/// witnesses and confluence witnesses. Implementations must present a
/// transitive, downward confluent and forward confluent frame on which
/// heredity holds, so every witness a genuine defect demands exists.
class WorldOracle {
public:
    virtual ~WorldOracle() = default;

    virtual std::size_t world_count() const = 0;
    virtual const ClosureSet& closure() const = 0;

    virtual bool world_leq(std::size_t s, std::size_t t) const = 0;
    virtual bool world_rel(std::size_t s, std::size_t t) const = 0;

    /// Whether the closure member holds at the world. The formula must be a
    /// closure member.
    virtual bool member_forced(std::size_t world, Formula member) const = 0;

    /// Set label of exactly the closure members forced at the world.
    virtual Label trace(std::size_t world) const = 0;

    /// Whether the atom holds at the world (drives the saturated valuation).
    virtual bool atom_true(std::size_t world, const std::string& atom) const = 0;

    /// A strict successor refuting the member and maximal with respect to it
    /// (all of its own strict successors force it); absent when the world is
    /// already maximal with respect to the member. Ties break to the least
    /// world id.
    virtual std::optional<std::size_t> maximal_extension(std::size_t world, Formula member) const = 0;

    struct Witness {
        enum class Kind { BoxRefuter, DiaSupporter, DownwardTo, ForwardFrom };
        Kind kind;
        Formula formula;     // modal kinds: the body B
        std::size_t target;  // confluence kinds: the world u

        static Witness box_refuter(Formula b) { return {Kind::BoxRefuter, b, 0}; }
        static Witness dia_supporter(Formula b) { return {Kind::DiaSupporter, b, 0}; }
        static Witness downward_to(std::size_t u) { return {Kind::DownwardTo, {}, u}; }
        static Witness forward_from(std::size_t u) { return {Kind::ForwardFrom, {}, u}; }
    };

    /// Least R-successor meeting the request:
    ///   box_refuter(B):  t with sRt and t not forcing B (absent iff s forces box B)
    ///   dia_supporter(B): t with sRt and t forcing B (absent iff s refutes dia B)
    ///   downward_to(u):  v with sRv and v <= u; requires some t with s <= t and tRu
    ///   forward_from(u): v with sRv and u <= v; requires some t with t <= s and tRu
    /// Confluence requests whose trigger fails raise OracleContractError; a
    /// valid trigger always yields a witness.
    virtual std::optional<std::size_t> successor_witness(std::size_t world,
                                                         const Witness& request) const = 0;
};

/// The concrete oracle over a finite model. Construction validates the frame
/// (transitive, downward confluent, forward confluent) and heredity of every
/// closure member, then memoises the satisfaction of all members.
class FiniteModelOracle final : public WorldOracle {
public:
    FiniteModelOracle(Model model, ClosureSet closure);

    const Model& model() const { return model_; }

    std::size_t world_count() const override { return model_.size(); }
    const ClosureSet& closure() const override { return closure_; }
    bool world_leq(std::size_t s, std::size_t t) const override;
    bool world_rel(std::size_t s, std::size_t t) const override;
    bool member_forced(std::size_t world, Formula member) const override;
    Label trace(std::size_t world) const override;
    bool atom_true(std::size_t world, const std::string& atom) const override;
    std::optional<std::size_t> maximal_extension(std::size_t world, Formula member) const override;
    std::optional<std::size_t> successor_witness(std::size_t world,
                                                 const Witness& request) const override;

private:
    std::size_t member_index(Formula f) const;
    bool strictly_below(std::size_t s, std::size_t t) const;  // s < t in the preorder

    Model model_;
    ClosureSet closure_;
    std::vector<Bitset> member_sat_;  // closure index -> world set
    std::vector<Label> traces_;
};

}  // namespace ik4
