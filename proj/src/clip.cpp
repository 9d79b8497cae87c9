#include "ik4/clip.hpp"

#include <algorithm>

#include "ik4/errors.hpp"

namespace ik4 {

bool Clip::lt(std::size_t i, std::size_t j) const {
    return std::find(lt_.begin(), lt_.end(), std::make_pair(i, j)) != lt_.end();
}
bool Clip::tri(std::size_t i, std::size_t j) const {
    return std::find(tri_.begin(), tri_.end(), std::make_pair(i, j)) != tri_.end();
}

std::optional<std::size_t> Clip::lt_predecessor(std::size_t j) const {
    for (auto [a, b] : lt_)
        if (b == j) return a;
    return std::nullopt;
}
std::optional<std::size_t> Clip::tri_predecessor(std::size_t j) const {
    for (auto [a, b] : tri_)
        if (b == j) return a;
    return std::nullopt;
}

std::vector<std::size_t> Clip::lt_successors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (auto [a, b] : lt_)
        if (a == i) out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}
std::vector<std::size_t> Clip::tri_successors(std::size_t i) const {
    std::vector<std::size_t> out;
    for (auto [a, b] : tri_)
        if (a == i) out.push_back(b);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Clip::add_tip(std::size_t world, std::size_t rank, std::size_t height) {
    std::size_t id = tips_.size();
    tips_.push_back(Tip{id, world, rank, height});
    return id;
}

void Clip::add_lt(std::size_t i, std::size_t j) {
    tips_.at(i);
    tips_.at(j);
    lt_.emplace_back(i, j);
}
void Clip::add_tri(std::size_t i, std::size_t j) {
    tips_.at(i);
    tips_.at(j);
    tri_.emplace_back(i, j);
}

std::size_t Clip::max_rank() const {
    std::size_t m = 0;
    for (const Tip& t : tips_) m = std::max(m, t.rank);
    return m;
}
std::size_t Clip::max_height() const {
    std::size_t m = 0;
    for (const Tip& t : tips_) m = std::max(m, t.height);
    return m;
}
std::size_t Clip::max_height_at_rank(std::size_t rank) const {
    std::size_t m = 0;
    for (const Tip& t : tips_)
        if (t.rank == rank) m = std::max(m, t.height);
    return m;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ClipReport validate(const Clip& c, const WorldOracle& oracle) {
    ClipReport report;
    auto coherence = [&](const std::string& msg) {
        report.coherent = false;
        report.violations.push_back("coherence: " + msg);
    };
    auto regularity = [&](const std::string& msg) {
        report.regular = false;
        report.violations.push_back("regularity: " + msg);
    };

    const auto& tips = c.tips();
    if (tips.empty()) coherence("clip has no tips");
    for (std::size_t k = 0; k < tips.size(); ++k) {
        if (tips[k].id != k) coherence("tip id " + std::to_string(tips[k].id) + " duplicated");
        if (tips[k].world >= oracle.world_count())
            coherence("tip " + std::to_string(k) + " references an unknown world");
    }

    for (auto [i, j] : c.lt_edges()) {
        const Tip &a = c.tip(i), &b = c.tip(j);
        if (i == j) coherence("order edge loops at tip " + std::to_string(i));
        if (!oracle.world_leq(a.world, b.world))
            coherence("order edge " + std::to_string(i) + "->" + std::to_string(j) +
                      " without world order");
        if (b.rank != a.rank)
            coherence("order edge " + std::to_string(i) + "->" + std::to_string(j) +
                      " changes rank");
        if (b.height != a.height + 1)
            coherence("order edge " + std::to_string(i) + "->" + std::to_string(j) +
                      " does not climb one height");
    }
    for (auto [i, j] : c.tri_edges()) {
        const Tip &a = c.tip(i), &b = c.tip(j);
        if (i == j) coherence("modal edge loops at tip " + std::to_string(i));
        if (!oracle.world_rel(a.world, b.world))
            coherence("modal edge " + std::to_string(i) + "->" + std::to_string(j) +
                      " without world relation");
        if (b.rank != a.rank + 1)
            coherence("modal edge " + std::to_string(i) + "->" + std::to_string(j) +
                      " does not climb one rank");
        if (b.height != a.height)
            coherence("modal edge " + std::to_string(i) + "->" + std::to_string(j) +
                      " changes height");
    }

    // at most one predecessor per tip in each relation
    for (std::size_t j = 0; j < tips.size(); ++j) {
        std::size_t lt_preds = 0, tri_preds = 0;
        for (auto [a, b] : c.lt_edges())
            if (b == j) ++lt_preds;
        for (auto [a, b] : c.tri_edges())
            if (b == j) ++tri_preds;
        if (lt_preds > 1) regularity("tip " + std::to_string(j) + " has two order predecessors");
        if (tri_preds > 1) regularity("tip " + std::to_string(j) + " has two modal predecessors");
    }
    // zig: i |> j and k << j imply some l with l << i and l |> k
    for (auto [i, j] : c.tri_edges())
        for (auto [k, j2] : c.lt_edges()) {
            if (j2 != j) continue;
            bool witnessed = false;
            for (std::size_t l = 0; l < tips.size() && !witnessed; ++l)
                if (c.lt(l, i) && c.tri(l, k)) witnessed = true;
            if (!witnessed)
                regularity("modal edge into " + std::to_string(j) +
                           " lacks a zig witness for order predecessor " + std::to_string(k));
        }

    // homomorphism of the induced frame into the oracle frame
    std::size_t n = tips.size();
    Relation lt_rel(n), tri_rel(n);
    for (auto [i, j] : c.lt_edges()) lt_rel.set(i, j);
    for (auto [i, j] : c.tri_edges()) tri_rel.set(i, j);
    Relation lt_star = lt_rel.reflexive_transitive_closure();
    Relation tri_plus = tri_rel.transitive_closure();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (lt_star.at(i, j) && !oracle.world_leq(tips[i].world, tips[j].world))
                coherence("order reachability " + std::to_string(i) + "->" + std::to_string(j) +
                          " is not matched by the world order");
            if (tri_plus.at(i, j) && !oracle.world_rel(tips[i].world, tips[j].world))
                coherence("modal reachability " + std::to_string(i) + "->" + std::to_string(j) +
                          " is not matched by the world relation");
        }
    return report;
}

// ---------------------------------------------------------------------------
// Slices
// ---------------------------------------------------------------------------

Slice slice(const Clip& c, std::size_t rank, const WorldOracle& oracle) {
    Slice out;
    out.tree.width = oracle.closure().size();
    out.tree.parent.push_back(tree_npos);
    out.tree.labels.push_back(Label::root());

    std::vector<std::size_t> node_of(c.size(), tree_npos);
    for (const Tip& t : c.tips()) {
        if (t.rank != rank) continue;
        node_of[t.id] = out.tree.size();
        out.tree.parent.push_back(0);  // adopted by the sentinel unless a predecessor shows up
        out.tree.labels.push_back(oracle.trace(t.world));
        out.tip_ids.push_back(t.id);
    }
    for (auto [i, j] : c.lt_edges()) {
        if (node_of[j] == tree_npos) continue;
        if (node_of[i] == tree_npos)
            throw InvariantError("order edge crosses ranks in a slice");
        if (out.tree.parent[node_of[j]] != 0)
            throw InvariantError("slice tip has two order predecessors");
        out.tree.parent[node_of[j]] = node_of[i];
    }
    validate_tree(out.tree);
    return out;
}

// ---------------------------------------------------------------------------
// Defects
// ---------------------------------------------------------------------------

const char* defect_kind_name(Defect::Kind k) {
    switch (k) {
        case Defect::Kind::Maximality: return "maximality";
        case Defect::Kind::Box: return "box";
        case Defect::Kind::Dia: return "dia";
        case Defect::Kind::DownwardConfluence: return "downward-confluence";
        case Defect::Kind::ForwardConfluence: return "forward-confluence";
    }
    return "?";
}

std::string Defect::describe() const {
    std::string s = defect_kind_name(kind);
    s += " at tip " + std::to_string(tip);
    switch (kind) {
        case Kind::Maximality:
            s += " for " + render(Formula::implies(antecedent, consequent));
            break;
        case Kind::Box: s += " for " + render(Formula::box(antecedent)); break;
        case Kind::Dia: s += " for " + render(Formula::dia(antecedent)); break;
        default:
            s += " via " + std::to_string(tip_j) + "," + std::to_string(tip_k);
    }
    s += " (rank " + std::to_string(rank) + ", height " + std::to_string(height) + ")";
    return s;
}

namespace {

/// Whether the only mutable part of a defect's definition (absence of a
/// witness) still holds; tips and satisfaction facts never change once a
/// defect has been observed.
bool still_current(const Clip& c, const Defect& d, const WorldOracle& oracle) {
    switch (d.kind) {
        case Defect::Kind::Maximality: {
            Formula member = Formula::implies(d.antecedent, d.consequent);
            for (std::size_t j : c.lt_successors(d.tip))
                if (!oracle.member_forced(c.tip(j).world, member)) return false;
            return true;
        }
        case Defect::Kind::Box: {
            for (std::size_t j : c.tri_successors(d.tip))
                if (!oracle.member_forced(c.tip(j).world, d.antecedent)) return false;
            return true;
        }
        case Defect::Kind::Dia: {
            for (std::size_t j : c.tri_successors(d.tip))
                if (oracle.member_forced(c.tip(j).world, d.antecedent)) return false;
            return true;
        }
        case Defect::Kind::DownwardConfluence: {
            for (std::size_t l : c.tri_successors(d.tip))
                if (c.lt(l, d.tip_k)) return false;
            return true;
        }
        case Defect::Kind::ForwardConfluence: {
            for (std::size_t l : c.tri_successors(d.tip))
                if (c.lt(d.tip_k, l)) return false;
            return true;
        }
    }
    throw InvariantError("unreachable defect kind");
}

bool not_maximal_for(const WorldOracle& oracle, std::size_t world, Formula member) {
    std::size_t n = oracle.world_count();
    for (std::size_t t = 0; t < n; ++t)
        if (oracle.world_leq(world, t) && !oracle.world_leq(t, world) &&
            !oracle.member_forced(t, member))
            return true;
    return false;
}

}  // namespace

std::vector<Defect> find_defects(const Clip& c, Defect::Kind kind, std::size_t rank,
                                 std::optional<std::size_t> height, const WorldOracle& oracle) {
    std::vector<Defect> out;
    const ClosureSet& sigma = oracle.closure();
    for (const Tip& t : c.tips()) {
        if (t.rank != rank) continue;
        if (height && t.height != *height) continue;
        switch (kind) {
            case Defect::Kind::Maximality:
                for (Formula member : sigma.members()) {
                    if (member.kind() != Kind::Implies) continue;
                    if (oracle.member_forced(t.world, member)) continue;
                    if (!not_maximal_for(oracle, t.world, member)) continue;
                    Defect d{kind, t.id, member.lhs(), member.rhs(), 0, 0, t.rank, t.height};
                    if (still_current(c, d, oracle)) out.push_back(std::move(d));
                }
                break;
            case Defect::Kind::Box:
                for (Formula member : sigma.members()) {
                    if (member.kind() != Kind::Box) continue;
                    if (oracle.member_forced(t.world, member)) continue;
                    Defect d{kind, t.id, member.body(), Formula(), 0, 0, t.rank, t.height};
                    if (still_current(c, d, oracle)) out.push_back(std::move(d));
                }
                break;
            case Defect::Kind::Dia:
                for (Formula member : sigma.members()) {
                    if (member.kind() != Kind::Dia) continue;
                    if (!oracle.member_forced(t.world, member)) continue;
                    Defect d{kind, t.id, member.body(), Formula(), 0, 0, t.rank, t.height};
                    if (still_current(c, d, oracle)) out.push_back(std::move(d));
                }
                break;
            case Defect::Kind::DownwardConfluence:
                for (std::size_t j : c.lt_successors(t.id))
                    for (std::size_t k : c.tri_successors(j)) {
                        Defect d{kind, t.id, Formula(), Formula(), j, k, t.rank, t.height};
                        if (still_current(c, d, oracle)) out.push_back(std::move(d));
                    }
                break;
            case Defect::Kind::ForwardConfluence:
                if (auto j = c.lt_predecessor(t.id))
                    for (std::size_t k : c.tri_successors(*j)) {
                        Defect d{kind, t.id, Formula(), Formula(), *j, k, t.rank, t.height};
                        if (still_current(c, d, oracle)) out.push_back(std::move(d));
                    }
                break;
        }
    }
    return out;
}

void repair_defect(Clip& c, const Defect& d, const WorldOracle& oracle) {
    const Tip t = c.tip(d.tip);
    switch (d.kind) {
        case Defect::Kind::Maximality: {
            Formula member = Formula::implies(d.antecedent, d.consequent);
            auto w = oracle.maximal_extension(t.world, member);
            if (!w) throw OracleContractError("no maximal extension for " + d.describe());
            std::size_t fresh = c.add_tip(*w, t.rank, t.height + 1);
            c.add_lt(t.id, fresh);
            break;
        }
        case Defect::Kind::Box: {
            auto w = oracle.successor_witness(t.world,
                                              WorldOracle::Witness::box_refuter(d.antecedent));
            if (!w) throw OracleContractError("no box refuter for " + d.describe());
            std::size_t fresh = c.add_tip(*w, t.rank + 1, t.height);
            c.add_tri(t.id, fresh);
            break;
        }
        case Defect::Kind::Dia: {
            auto w = oracle.successor_witness(t.world,
                                              WorldOracle::Witness::dia_supporter(d.antecedent));
            if (!w) throw OracleContractError("no dia supporter for " + d.describe());
            std::size_t fresh = c.add_tip(*w, t.rank + 1, t.height);
            c.add_tri(t.id, fresh);
            break;
        }
        case Defect::Kind::DownwardConfluence: {
            std::size_t u = c.tip(d.tip_k).world;
            auto w = oracle.successor_witness(t.world, WorldOracle::Witness::downward_to(u));
            if (!w) throw OracleContractError("no downward witness for " + d.describe());
            std::size_t fresh = c.add_tip(*w, t.rank + 1, t.height);
            c.add_tri(t.id, fresh);
            c.add_lt(fresh, d.tip_k);
            break;
        }
        case Defect::Kind::ForwardConfluence: {
            std::size_t u = c.tip(d.tip_k).world;
            auto w = oracle.successor_witness(t.world, WorldOracle::Witness::forward_from(u));
            if (!w) throw OracleContractError("no forward witness for " + d.describe());
            std::size_t fresh = c.add_tip(*w, t.rank + 1, t.height);
            c.add_tri(t.id, fresh);
            c.add_lt(d.tip_k, fresh);
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// Repair procedures
// ---------------------------------------------------------------------------

const char* procedure_name(Procedure p) {
    switch (p) {
        case Procedure::Maximality: return "maximality";
        case Procedure::Accessibility: return "accessibility";
        case Procedure::DownwardConfluence: return "downward-confluence";
        case Procedure::ForwardConfluence: return "forward-confluence";
    }
    return "?";
}

namespace {

std::vector<Defect::Kind> kinds_of(Procedure p) {
    switch (p) {
        case Procedure::Maximality: return {Defect::Kind::Maximality};
        case Procedure::Accessibility: return {Defect::Kind::Box, Defect::Kind::Dia};
        case Procedure::DownwardConfluence: return {Defect::Kind::DownwardConfluence};
        case Procedure::ForwardConfluence: return {Defect::Kind::ForwardConfluence};
    }
    throw InvariantError("unreachable procedure");
}

bool has_defects(const Clip& c, Procedure p, std::size_t rank, const WorldOracle& oracle) {
    for (Defect::Kind k : kinds_of(p))
        if (!find_defects(c, k, rank, std::nullopt, oracle).empty()) return true;
    return false;
}

/// Snapshot the (kind, rank, height) batch, then repair those entries still
/// current; later repairs of the batch can satisfy earlier entries.
void repair_batch(Clip& c, Procedure p, std::size_t rank, std::size_t height,
                  const WorldOracle& oracle, SaturationStats& stats,
                  const SaturationOptions& options) {
    std::vector<Defect> batch;
    for (Defect::Kind k : kinds_of(p)) {
        auto found = find_defects(c, k, rank, height, oracle);
        batch.insert(batch.end(), found.begin(), found.end());
    }
    for (const Defect& d : batch) {
        if (!still_current(c, d, oracle)) continue;
        if (stats.repairs >= options.repair_budget)
            throw InvariantError("repair budget exhausted");
        std::size_t fresh = c.size();
        repair_defect(c, d, oracle);
        ++stats.repairs;
        if (options.record_trace) stats.trace.push_back(RepairEvent{p, d, fresh});
    }
}

void check_staging(const Clip& c, Procedure p, std::size_t rank, const WorldOracle& oracle) {
    auto expect = [&](Procedure q, std::size_t bound) {
        if (!clean_below(c, q, bound, oracle))
            throw InvariantError(std::string("staging violated: not clean for ") +
                                 procedure_name(q) + " below rank " + std::to_string(bound) +
                                 " entering " + procedure_name(p));
    };
    switch (p) {
        case Procedure::Maximality:
            expect(Procedure::Maximality, rank);
            expect(Procedure::Accessibility, rank);
            expect(Procedure::DownwardConfluence, rank);
            expect(Procedure::ForwardConfluence, rank);
            break;
        case Procedure::Accessibility:
            expect(Procedure::Maximality, rank + 1);
            expect(Procedure::Accessibility, rank);
            expect(Procedure::DownwardConfluence, rank);
            expect(Procedure::ForwardConfluence, rank);
            break;
        case Procedure::DownwardConfluence:
            expect(Procedure::Maximality, rank + 1);
            expect(Procedure::Accessibility, rank + 1);
            expect(Procedure::DownwardConfluence, rank);
            expect(Procedure::ForwardConfluence, rank);
            break;
        case Procedure::ForwardConfluence:
            expect(Procedure::Maximality, rank + 1);
            expect(Procedure::Accessibility, rank + 1);
            expect(Procedure::DownwardConfluence, rank + 1);
            expect(Procedure::ForwardConfluence, rank);
            break;
    }
}

}  // namespace

bool clean_below(const Clip& c, Procedure p, std::size_t rank_bound, const WorldOracle& oracle) {
    for (std::size_t rank = 0; rank < rank_bound; ++rank)
        if (has_defects(c, p, rank, oracle)) return false;
    return true;
}

void run_repair_procedure(Clip& c, Procedure p, std::size_t rank, const WorldOracle& oracle,
                          SaturationStats& stats, const SaturationOptions& options) {
    check_staging(c, p, rank, oracle);
    if (p == Procedure::DownwardConfluence) {
        // descending sweep from the rank's top height, with a floor guard
        long height = static_cast<long>(c.max_height_at_rank(rank));
        while (has_defects(c, p, rank, oracle)) {
            if (height < 0)
                throw InvariantError("downward-confluence sweep crossed the height floor");
            repair_batch(c, p, rank, static_cast<std::size_t>(height), oracle, stats, options);
            --height;
        }
        return;
    }
    std::size_t height = 0;
    // maximality may push heights up by at most the closure size; the other
    // ascending sweeps never grow the maximum height
    std::size_t limit = c.max_height() + 1 +
                        (p == Procedure::Maximality ? oracle.closure().size() : 0);
    while (has_defects(c, p, rank, oracle)) {
        if (height > limit) throw InvariantError("height sweep exceeded its bound");
        repair_batch(c, p, rank, height, oracle, stats, options);
        ++height;
    }
}

// ---------------------------------------------------------------------------
// Saturation
// ---------------------------------------------------------------------------

SaturationResult saturate(const WorldOracle& oracle, std::size_t start_world,
                          const SaturationOptions& options) {
    if (start_world >= oracle.world_count()) throw std::invalid_argument("world out of range");
    SaturationResult result;
    result.clip = Clip::initial(start_world);
    Clip& clip = result.clip;

    for (std::size_t rank = 0;; ++rank) {
        if (rank > options.repair_budget) throw InvariantError("rank budget exhausted");
        run_repair_procedure(clip, Procedure::Maximality, rank, oracle, result.stats, options);

        if (rank >= 1) {
            // family of slices 1..rank; halt on the least earlier slice
            // similar to the current one
            Slice current = slice(clip, rank, oracle);
            for (std::size_t beta = 1; beta < rank; ++beta) {
                Slice earlier = slice(clip, beta, oracle);
                auto similar = equivalent_sim(current.tree, earlier.tree);
                if (!similar) continue;
                result.alpha_f = rank;
                result.beta_f = beta;
                const Embedding& f = similar->forward;  // current -> earlier
                if (f[0] != 0) throw InvariantError("slice embedding moved the sentinel");
                for (std::size_t node = 1; node < current.tree.size(); ++node) {
                    if (f[node] == 0)
                        throw InvariantError("slice embedding sent a tip to the sentinel");
                    result.loop_embedding.emplace_back(current.tip_ids[node - 1],
                                                       earlier.tip_ids[f[node] - 1]);
                }
                return result;
            }
        }

        run_repair_procedure(clip, Procedure::Accessibility, rank, oracle, result.stats, options);
        run_repair_procedure(clip, Procedure::DownwardConfluence, rank, oracle, result.stats,
                             options);
        run_repair_procedure(clip, Procedure::ForwardConfluence, rank, oracle, result.stats,
                             options);
    }
}

SaturatedModel build_saturated_model(const SaturationResult& r, const WorldOracle& oracle) {
    const Clip& clip = r.clip;
    std::size_t n = clip.size();

    Relation lt_rel(n);
    for (auto [i, j] : clip.lt_edges()) lt_rel.set(i, j);
    Relation leq = lt_rel.reflexive_transitive_closure();

    Relation tri_rel(n);
    for (auto [i, j] : clip.tri_edges()) tri_rel.set(i, j);
    for (auto [a, b] : r.loop_embedding) {
        if (clip.tip(a).rank != r.alpha_f || clip.tip(b).rank != r.beta_f)
            throw InvariantError("loop embedding pairs tips of unexpected ranks");
        for (std::size_t l : clip.tri_successors(b)) tri_rel.set(a, l);
    }
    Relation rel = tri_rel.transitive_closure();

    Valuation valuation;
    for (const std::string& atom : atoms_of(oracle.closure().seed())) {
        Bitset set(n);
        for (const Tip& t : clip.tips())
            if (oracle.atom_true(t.world, atom)) set.set(t.id);
        valuation.assign(atom, std::move(set));
    }

    Frame frame(std::move(leq), std::move(rel));
    std::optional<Model> model;
    try {
        model.emplace(std::move(frame), std::move(valuation));
    } catch (const std::invalid_argument& e) {
        throw InvariantError(std::string("saturated valuation not hereditary: ") + e.what());
    }
    SaturatedModel out{std::move(*model), {}};
    for (const Tip& t : clip.tips()) out.tip_world.push_back(t.world);
    return out;
}

std::vector<TruthLemmaViolation> check_truth_lemma(const SaturationResult& r,
                                                   const SaturatedModel& m,
                                                   const WorldOracle& oracle) {
    std::vector<TruthLemmaViolation> out;
    Evaluator ev(m.model, Variant::BD);
    for (const Tip& t : r.clip.tips())
        for (Formula member : oracle.closure().members()) {
            bool here = ev.forces(t.id, member);
            bool there = oracle.member_forced(t.world, member);
            if (here != there) out.push_back({t.id, member, here, there});
        }
    return out;
}

}  // namespace ik4
