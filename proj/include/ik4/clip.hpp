#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ik4/ltree.hpp"
#include "ik4/oracle.hpp"

namespace ik4 {

/// One saturation node: a fresh id, an oracle world, a rank (modal depth
/// coordinate) and a height (order depth coordinate).
struct Tip {
    std::size_t id;
    std::size_t world;
    std::size_t rank;
    std::size_t height;
};

/// The saturation state: tips plus two edge relations. `lt` edges stay
/// within a rank and climb one height (order extension); `tri` edges climb
/// one rank at constant height (modal step). Ids are handed out by a
/// monotone counter and never reused, so a tip's id doubles as its index.
class Clip {
public:
    static Clip initial(std::size_t world) {
        Clip c;
        c.tips_.push_back(Tip{0, world, 0, 0});
        return c;
    }

    const std::vector<Tip>& tips() const { return tips_; }
    const Tip& tip(std::size_t id) const { return tips_.at(id); }
    std::size_t size() const { return tips_.size(); }

    const std::vector<std::pair<std::size_t, std::size_t>>& lt_edges() const { return lt_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& tri_edges() const { return tri_; }

    bool lt(std::size_t i, std::size_t j) const;
    bool tri(std::size_t i, std::size_t j) const;
    std::optional<std::size_t> lt_predecessor(std::size_t j) const;
    std::optional<std::size_t> tri_predecessor(std::size_t j) const;
    std::vector<std::size_t> lt_successors(std::size_t i) const;
    std::vector<std::size_t> tri_successors(std::size_t i) const;

    std::size_t add_tip(std::size_t world, std::size_t rank, std::size_t height);
    void add_lt(std::size_t i, std::size_t j);
    void add_tri(std::size_t i, std::size_t j);

    std::size_t max_rank() const;
    std::size_t max_height() const;
    /// Greatest height among tips of the rank; 0 when the rank is empty.
    std::size_t max_height_at_rank(std::size_t rank) const;

private:
    std::vector<Tip> tips_;
    std::vector<std::pair<std::size_t, std::size_t>> lt_;
    std::vector<std::pair<std::size_t, std::size_t>> tri_;
};

struct ClipReport {
    bool coherent = true;
    bool regular = true;
    std::vector<std::string> violations;

    bool ok() const { return coherent && regular; }
};

/// Checks every coherence and regularity clause pointwise, plus the
/// homomorphism property of the induced frame into the oracle frame
/// (lt-reachability implies oracle order, tri-reachability implies the
/// oracle modal relation).
ClipReport validate(const Clip& c, const WorldOracle& oracle);

/// One rank's tips arranged under the lt relation, with a sentinel root
/// (label -1) adopting the tips that have no lt-predecessor; tip labels are
/// their worlds' traces. Node 0 is the sentinel, node k >= 1 is
/// tip_ids[k-1].
struct Slice {
    LabelledTree tree;
    std::vector<std::size_t> tip_ids;
};

Slice slice(const Clip& c, std::size_t rank, const WorldOracle& oracle);

struct Defect {
    enum class Kind { Maximality, Box, Dia, DownwardConfluence, ForwardConfluence };

    Kind kind;
    std::size_t tip;      // the defective tip (i)
    Formula antecedent;   // maximality: B of B->C; box/dia: the body B
    Formula consequent;   // maximality only: C
    std::size_t tip_j = 0;  // confluence kinds
    std::size_t tip_k = 0;  // confluence kinds
    std::size_t rank = 0;
    std::size_t height = 0;

    std::string describe() const;
};

const char* defect_kind_name(Defect::Kind k);

/// All defects of one kind at a rank (and height, when given), in
/// deterministic order: tip id, then closure position of the formula, then
/// the remaining tip ids.
std::vector<Defect> find_defects(const Clip& c, Defect::Kind kind, std::size_t rank,
                                 std::optional<std::size_t> height, const WorldOracle& oracle);

/// Adds the prescribed fresh tip and edge(s) for a current defect, taking
/// the witness from the oracle. Throws OracleContractError when the oracle
/// cannot witness what the defect guarantees.
void repair_defect(Clip& c, const Defect& d, const WorldOracle& oracle);

enum class Procedure { Maximality, Accessibility, DownwardConfluence, ForwardConfluence };

const char* procedure_name(Procedure p);

struct RepairEvent {
    Procedure procedure;
    Defect defect;
    std::size_t new_tip;
};

struct SaturationOptions {
    std::size_t repair_budget = 100000;
    bool record_trace = false;
};

struct SaturationStats {
    std::size_t repairs = 0;
    std::vector<RepairEvent> trace;
};

/// Runs one repair procedure at a rank until that rank has no defects of the
/// procedure's kind(s). Maximality, accessibility and forward confluence
/// sweep heights upward from 0; downward confluence sweeps downward from the
/// rank's maximum height. Each sweep step snapshots the defects at the
/// current height and repairs those still current, in deterministic order.
/// Entry checks the cleanness staging the procedure relies on and throws
/// InvariantError when violated or when the repair budget is exhausted.
void run_repair_procedure(Clip& c, Procedure p, std::size_t rank, const WorldOracle& oracle,
                          SaturationStats& stats, const SaturationOptions& options);

/// Whether the clip has no defects of the given procedure's kind(s) at any
/// rank strictly below the bound.
bool clean_below(const Clip& c, Procedure p, std::size_t rank_bound, const WorldOracle& oracle);

struct SaturationResult {
    Clip clip;
    std::size_t alpha_f = 0;
    std::size_t beta_f = 0;
    /// Tip of the final slice -> tip of the loop-back slice, induced by the
    /// similarity embedding between the two slices (sentinel omitted).
    std::vector<std::pair<std::size_t, std::size_t>> loop_embedding;
    SaturationStats stats;
};

/// The full saturation loop from an initial tip at the start world: repair
/// maximality at the current rank, halt when the family of slices 1..rank
/// has its last member similar to an earlier one (taking the least such
/// witness), otherwise repair accessibility and both confluences and move to
/// the next rank.
SaturationResult saturate(const WorldOracle& oracle, std::size_t start_world,
                          const SaturationOptions& options = {});

struct SaturatedModel {
    Model model;                          // world k is the tip with id k
    std::vector<std::size_t> tip_world;   // tip id -> oracle world
};

/// The finite model over the final clip: order = reflexive-transitive
/// closure of lt; modal relation = transitive closure of tri extended by the
/// loop-back edges through the similarity embedding; valuation inherited
/// from the tips' oracle worlds, restricted to the seed formula's atoms.
SaturatedModel build_saturated_model(const SaturationResult& r, const WorldOracle& oracle);

struct TruthLemmaViolation {
    std::size_t tip;
    Formula formula;
    bool in_saturated;
    bool in_oracle;
};

/// Compares satisfaction of every closure member at every tip of the
/// saturated model against the oracle's verdict at the tip's world.
std::vector<TruthLemmaViolation> check_truth_lemma(const SaturationResult& r,
                                                   const SaturatedModel& m,
                                                   const WorldOracle& oracle);

}  // namespace ik4
