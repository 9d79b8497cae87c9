#include "ik4/oracle.hpp"

#include "ik4/errors.hpp"

namespace ik4 {

FiniteModelOracle::FiniteModelOracle(Model model, ClosureSet closure)
    : model_(std::move(model)), closure_(std::move(closure)) {
    for (FrameCondition c :
         {FrameCondition::Transitive, FrameCondition::Downward, FrameCondition::Forward}) {
        auto check = check_frame_condition(model_.frame(), c);
        if (!check.holds)
            throw std::invalid_argument(std::string("oracle model frame is not ") +
                                        frame_condition_name(c));
    }
    Evaluator ev(model_, Variant::BD);
    std::size_t n = model_.size();
    for (Formula f : closure_.members()) {
        const Bitset& sat = ev.satisfied(f);
        for (std::size_t s = 0; s < n; ++s)
            if (sat.test(s) && !model_.frame().leq().row(s).subset_of(sat))
                throw std::invalid_argument("oracle model violates heredity for " + render(f));
        member_sat_.push_back(sat);
    }
    for (std::size_t s = 0; s < n; ++s) {
        Bitset mask(closure_.size());
        for (std::size_t k = 0; k < closure_.size(); ++k)
            if (member_sat_[k].test(s)) mask.set(k);
        traces_.push_back(Label::set(std::move(mask)));
    }
}

std::size_t FiniteModelOracle::member_index(Formula f) const {
    auto idx = closure_.index_of(f);
    if (!idx) throw std::invalid_argument("formula is not a closure member: " + render(f));
    return *idx;
}

bool FiniteModelOracle::world_leq(std::size_t s, std::size_t t) const {
    return model_.frame().leq().at(s, t);
}
bool FiniteModelOracle::world_rel(std::size_t s, std::size_t t) const {
    return model_.frame().rel().at(s, t);
}

bool FiniteModelOracle::member_forced(std::size_t world, Formula member) const {
    if (world >= world_count()) throw std::invalid_argument("world out of range");
    return member_sat_[member_index(member)].test(world);
}

Label FiniteModelOracle::trace(std::size_t world) const {
    if (world >= world_count()) throw std::invalid_argument("world out of range");
    return traces_[world];
}

bool FiniteModelOracle::atom_true(std::size_t world, const std::string& atom) const {
    if (world >= world_count()) throw std::invalid_argument("world out of range");
    return model_.valuation().worlds(atom, world_count()).test(world);
}

bool FiniteModelOracle::strictly_below(std::size_t s, std::size_t t) const {
    return world_leq(s, t) && !world_leq(t, s);
}

std::optional<std::size_t> FiniteModelOracle::maximal_extension(std::size_t world,
                                                                Formula member) const {
    std::size_t n = world_count();
    if (world >= n) throw std::invalid_argument("world out of range");
    const Bitset& sat = member_sat_[member_index(member)];
    // candidates: strict successors refuting the member
    std::vector<std::size_t> refuting;
    for (std::size_t t = 0; t < n; ++t)
        if (strictly_below(world, t) && !sat.test(t)) refuting.push_back(t);
    if (refuting.empty()) return std::nullopt;
    // a candidate with no strictly greater candidate; finite scan replaces
    // the choice principle of the infinite setting
    for (std::size_t t : refuting) {
        bool maximal = true;
        for (std::size_t u : refuting)
            if (strictly_below(t, u)) {
                maximal = false;
                break;
            }
        if (maximal) return t;
    }
    throw InvariantError("strict order without a maximal element");
}

std::optional<std::size_t> FiniteModelOracle::successor_witness(std::size_t world,
                                                                const Witness& request) const {
    std::size_t n = world_count();
    if (world >= n) throw std::invalid_argument("world out of range");
    const Relation& rel = model_.frame().rel();
    switch (request.kind) {
        case Witness::Kind::BoxRefuter: {
            const Bitset& sat = member_sat_[member_index(request.formula)];
            for (std::size_t t = 0; t < n; ++t)
                if (rel.at(world, t) && !sat.test(t)) return t;
            return std::nullopt;
        }
        case Witness::Kind::DiaSupporter: {
            const Bitset& sat = member_sat_[member_index(request.formula)];
            for (std::size_t t = 0; t < n; ++t)
                if (rel.at(world, t) && sat.test(t)) return t;
            return std::nullopt;
        }
        case Witness::Kind::DownwardTo: {
            std::size_t u = request.target;
            bool triggered = false;
            for (std::size_t t = 0; t < n && !triggered; ++t)
                if (world_leq(world, t) && rel.at(t, u)) triggered = true;
            if (!triggered)
                throw OracleContractError("downward witness requested without a trigger");
            for (std::size_t v = 0; v < n; ++v)
                if (rel.at(world, v) && world_leq(v, u)) return v;
            throw OracleContractError("downward confluent model yielded no witness");
        }
        case Witness::Kind::ForwardFrom: {
            std::size_t u = request.target;
            bool triggered = false;
            for (std::size_t t = 0; t < n && !triggered; ++t)
                if (world_leq(t, world) && rel.at(t, u)) triggered = true;
            if (!triggered)
                throw OracleContractError("forward witness requested without a trigger");
            for (std::size_t v = 0; v < n; ++v)
                if (rel.at(world, v) && world_leq(u, v)) return v;
            throw OracleContractError("forward confluent model yielded no witness");
        }
    }
    throw InvariantError("unreachable witness kind");
}

}  // namespace ik4
