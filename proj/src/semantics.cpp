#include "ik4/semantics.hpp"

#include <sstream>

#include "ik4/errors.hpp"

namespace ik4 {

Frame::Frame(Relation leq, Relation rel) : leq_(std::move(leq)), rel_(std::move(rel)) {
    if (leq_.size() != rel_.size()) throw std::invalid_argument("frame relation size mismatch");
    if (leq_.size() == 0) throw std::invalid_argument("frame needs at least one world");
    if (!leq_.is_preorder()) throw std::invalid_argument("frame order is not a preorder");
}

Frame frame_from_generators(std::size_t n,
                            const std::vector<std::pair<std::size_t, std::size_t>>& le,
                            const std::vector<std::pair<std::size_t, std::size_t>>& r) {
    return Frame(Relation::from_pairs(n, le).reflexive_transitive_closure(),
                 Relation::from_pairs(n, r));
}

std::vector<Bitset> upward_closed_subsets(const Relation& leq) {
    std::size_t n = leq.size();
    std::vector<Bitset> out;
    if (n > 20) throw std::invalid_argument("too many worlds to enumerate subsets");
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        Bitset set = Bitset::from_word(n, mask);
        bool closed = true;
        for (std::size_t i = 0; i < n && closed; ++i)
            if (set.test(i) && !leq.row(i).subset_of(set)) closed = false;
        if (closed) out.push_back(std::move(set));
    }
    return out;
}

Bitset Valuation::worlds(const std::string& atom, std::size_t n) const {
    auto it = map_.find(atom);
    if (it == map_.end()) return Bitset(n);
    if (it->second.width() != n) throw std::invalid_argument("valuation width mismatch");
    return it->second;
}

Model::Model(Frame frame, Valuation valuation)
    : frame_(std::move(frame)), valuation_(std::move(valuation)) {
    for (const auto& [atom, set] : valuation_.assignments()) {
        if (set.width() != frame_.size())
            throw std::invalid_argument("valuation of '" + atom + "' has wrong width");
        for (std::size_t i = 0; i < frame_.size(); ++i)
            if (set.test(i) && !frame_.leq().row(i).subset_of(set))
                throw std::invalid_argument("valuation of '" + atom + "' is not up-closed");
    }
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::BD: return "BD";
        case Variant::FS: return "FS";
        case Variant::P: return "P";
        case Variant::W: return "W";
    }
    return "?";
}

std::optional<Variant> variant_from_name(std::string_view name) {
    if (name == "BD" || name == "bd") return Variant::BD;
    if (name == "FS" || name == "fs") return Variant::FS;
    if (name == "P" || name == "p") return Variant::P;
    if (name == "W" || name == "w") return Variant::W;
    return std::nullopt;
}

const Bitset& Evaluator::satisfied(Formula f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;
    return memo_.emplace(f, compute(f)).first->second;
}

bool Evaluator::forces(std::size_t world, Formula f) {
    if (world >= model_->size()) throw std::invalid_argument("world out of range");
    return satisfied(f).test(world);
}

Bitset Evaluator::compute(Formula f) {
    const Frame& fr = model_->frame();
    std::size_t n = fr.size();
    switch (f.kind()) {
        case Kind::Atom: return model_->valuation().worlds(f.atom_name(), n);
        case Kind::Top: return Bitset::ones(n);
        case Kind::Bot: return Bitset(n);
        case Kind::And: return satisfied(f.lhs()) & satisfied(f.rhs());
        case Kind::Or: return satisfied(f.lhs()) | satisfied(f.rhs());
        case Kind::Implies: {
            // s |= A -> B iff every <=-successor forcing A forces B.
            Bitset a = satisfied(f.lhs());
            Bitset b = satisfied(f.rhs());
            Bitset bad = a & b.complement();
            Bitset out(n);
            for (std::size_t s = 0; s < n; ++s)
                if ((fr.leq().row(s) & bad).none()) out.set(s);
            return out;
        }
        case Kind::Box: {
            Bitset body = satisfied(f.body());
            Bitset here(n);  // worlds whose R-successors all force the body
            for (std::size_t s = 0; s < n; ++s)
                if (fr.rel().row(s).subset_of(body)) here.set(s);
            if (variant_ == Variant::BD) return here;
            // FS/P/W box: quantify over <=-successors first, then R.
            Bitset out(n);
            for (std::size_t s = 0; s < n; ++s)
                if (fr.leq().row(s).subset_of(here)) out.set(s);
            return out;
        }
        case Kind::Dia: {
            Bitset body = satisfied(f.body());
            Bitset here(n);  // worlds with some R-successor forcing the body
            for (std::size_t s = 0; s < n; ++s)
                if ((fr.rel().row(s) & body).any()) here.set(s);
            switch (variant_) {
                case Variant::BD:
                case Variant::FS: return here;
                case Variant::P: {
                    // some <=-predecessor has a supporting R-successor
                    Bitset out(n);
                    Relation geq = fr.leq().transposed();
                    for (std::size_t s = 0; s < n; ++s)
                        if ((geq.row(s) & here).any()) out.set(s);
                    return out;
                }
                case Variant::W: {
                    // every <=-successor has a supporting R-successor
                    Bitset out(n);
                    for (std::size_t s = 0; s < n; ++s)
                        if (fr.leq().row(s).subset_of(here)) out.set(s);
                    return out;
                }
            }
            throw InvariantError("unreachable diamond variant");
        }
    }
    throw InvariantError("unreachable formula kind");
}

bool forces(const Model& m, std::size_t world, Formula f, Variant v) {
    return Evaluator(m, v).forces(world, f);
}

bool true_in_model(const Model& m, Formula f, Variant v) {
    Evaluator ev(m, v);
    return ev.satisfied(f) == Bitset::ones(m.size());
}

const char* frame_condition_name(FrameCondition c) {
    switch (c) {
        case FrameCondition::Transitive: return "transitive";
        case FrameCondition::Upward: return "upward";
        case FrameCondition::Downward: return "downward";
        case FrameCondition::Forward: return "forward";
    }
    return "?";
}

ConditionCheck check_frame_condition(const Frame& f, FrameCondition c) {
    std::size_t n = f.size();
    const Relation& leq = f.leq();
    const Relation& rel = f.rel();
    Relation geq = leq.transposed();
    ConditionCheck out;

    auto fail = [&](std::size_t s, std::size_t t, std::size_t u) {
        out.holds = false;
        out.witness = {s, t, u};
    };

    switch (c) {
        case FrameCondition::Transitive:
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t t = 0; t < n; ++t) {
                    if (!rel.at(s, t)) continue;
                    for (std::size_t u = 0; u < n; ++u)
                        if (rel.at(t, u) && !rel.at(s, u)) {
                            fail(s, t, u);
                            return out;
                        }
                }
            return out;
        case FrameCondition::Upward: {
            // R∘>= ⊆ >=∘R: sRt and u<=t imply some v<=s with vRu.
            Relation lhs = rel.composed(geq);
            Relation rhs = geq.composed(rel);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t u = 0; u < n; ++u)
                    if (lhs.at(s, u) && !rhs.at(s, u)) {
                        for (std::size_t t = 0; t < n; ++t)
                            if (rel.at(s, t) && leq.at(u, t)) {
                                fail(s, t, u);
                                return out;
                            }
                    }
            return out;
        }
        case FrameCondition::Downward: {
            // <=∘R ⊆ R∘<=: s<=t and tRu imply some v with sRv and v<=u.
            Relation lhs = leq.composed(rel);
            Relation rhs = rel.composed(leq);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t u = 0; u < n; ++u)
                    if (lhs.at(s, u) && !rhs.at(s, u)) {
                        for (std::size_t t = 0; t < n; ++t)
                            if (leq.at(s, t) && rel.at(t, u)) {
                                fail(s, t, u);
                                return out;
                            }
                    }
            return out;
        }
        case FrameCondition::Forward: {
            // >=∘R ⊆ R∘>=: t<=s and tRu imply some v with sRv and u<=v.
            Relation lhs = geq.composed(rel);
            Relation rhs = rel.composed(geq);
            for (std::size_t s = 0; s < n; ++s)
                for (std::size_t u = 0; u < n; ++u)
                    if (lhs.at(s, u) && !rhs.at(s, u)) {
                        for (std::size_t t = 0; t < n; ++t)
                            if (leq.at(t, s) && rel.at(t, u)) {
                                fail(s, t, u);
                                return out;
                            }
                    }
            return out;
        }
    }
    throw InvariantError("unreachable frame condition");
}

ValidityCheck valid_in_frame(const Frame& f, Formula a, Variant v) {
    std::vector<std::string> atoms = atoms_of(a);
    std::vector<Bitset> upsets = upward_closed_subsets(f.leq());
    std::vector<std::size_t> choice(atoms.size(), 0);
    ValidityCheck out;
    while (true) {
        Valuation val;
        for (std::size_t k = 0; k < atoms.size(); ++k) val.assign(atoms[k], upsets[choice[k]]);
        Model m(f, val);
        Evaluator ev(m, v);
        const Bitset& sat = ev.satisfied(a);
        for (std::size_t w = 0; w < f.size(); ++w)
            if (!sat.test(w)) {
                out.valid = false;
                out.valuation = std::move(val);
                out.world = w;
                return out;
            }
        // next valuation choice
        std::size_t k = 0;
        for (; k < atoms.size(); ++k) {
            if (++choice[k] < upsets.size()) break;
            choice[k] = 0;
        }
        if (k == atoms.size()) break;
        if (atoms.empty()) break;
    }
    return out;
}

std::vector<HeredityViolation> check_heredity(const Model& m, std::span<const Formula> pool) {
    std::vector<HeredityViolation> out;
    Evaluator ev(m, Variant::BD);
    std::size_t n = m.size();
    for (Formula f : pool) {
        const Bitset& sat = ev.satisfied(f);
        for (std::size_t s = 0; s < n; ++s) {
            if (!sat.test(s)) continue;
            if (!m.frame().leq().row(s).subset_of(sat)) {
                for (std::size_t t = 0; t < n; ++t)
                    if (m.frame().leq().at(s, t) && !sat.test(t)) out.push_back({f, s, t});
            }
        }
    }
    return out;
}

Model parse_model(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> worlds;
    std::vector<std::pair<std::size_t, std::size_t>> le, r;
    std::vector<std::pair<std::string, std::vector<std::size_t>>> vals;

    auto world_of = [&](const std::string& tok) -> std::size_t {
        std::size_t pos = 0;
        unsigned long w;
        try {
            w = std::stoul(tok, &pos);
        } catch (...) {
            throw FileFormatError("expected world number, got '" + tok + "'", lineno);
        }
        if (pos != tok.size()) throw FileFormatError("expected world number, got '" + tok + "'", lineno);
        if (!worlds) throw FileFormatError("world reference before 'worlds' line", lineno);
        if (w >= *worlds) throw FileFormatError("world " + tok + " out of range", lineno);
        return w;
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head[0] == '#') continue;
        if (head == "worlds") {
            if (worlds) throw FileFormatError("duplicate 'worlds' line", lineno);
            std::size_t n;
            if (!(ls >> n) || n == 0) throw FileFormatError("'worlds' needs a positive count", lineno);
            worlds = n;
        } else if (head == "le" || head == "r") {
            std::string a, b;
            if (!(ls >> a >> b)) throw FileFormatError("'" + head + "' needs two worlds", lineno);
            auto pair = std::make_pair(world_of(a), world_of(b));
            (head == "le" ? le : r).push_back(pair);
        } else if (head == "val") {
            std::string atom;
            if (!(ls >> atom)) throw FileFormatError("'val' needs an atom name", lineno);
            std::vector<std::size_t> ws;
            std::string tok;
            while (ls >> tok) ws.push_back(world_of(tok));
            vals.emplace_back(atom, std::move(ws));
        } else {
            throw FileFormatError("unknown directive '" + head + "'", lineno);
        }
    }
    if (!worlds) throw FileFormatError("missing 'worlds' line", lineno ? lineno : 1);

    Frame frame = frame_from_generators(*worlds, le, r);
    Valuation val;
    for (auto& [atom, ws] : vals) {
        Bitset set(*worlds);
        for (auto w : ws) set.set(w);
        if (auto existing = val.assignments().find(atom); existing != val.assignments().end())
            set |= existing->second;
        val.assign(atom, std::move(set));
    }
    try {
        return Model(std::move(frame), std::move(val));
    } catch (const std::invalid_argument& e) {
        throw FileFormatError(e.what(), lineno);
    }
}

std::string format_model(const Model& m) {
    std::ostringstream out;
    std::size_t n = m.size();
    out << "worlds " << n << "\n";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && m.frame().leq().at(i, j)) out << "le " << i << " " << j << "\n";
    for (auto [i, j] : m.frame().rel().pairs()) out << "r " << i << " " << j << "\n";
    for (const auto& [atom, set] : m.valuation().assignments()) {
        out << "val " << atom;
        for (std::size_t i = 0; i < n; ++i)
            if (set.test(i)) out << " " << i;
        out << "\n";
    }
    return out.str();
}

}  // namespace ik4
