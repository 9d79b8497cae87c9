#include "doctest.h"

#include "ik4/clip.hpp"
#include "ik4/enumeration.hpp"
#include "test_support.hpp"

using namespace ik4;
using ik4::testing::F;

namespace {

FiniteModelOracle box_dia_oracle() {
    Valuation v;
    v.assign("p", Bitset(1));
    Model m(frame_from_generators(1, {}, {}), v);
    return FiniteModelOracle(m, closure(F("[]p -> <>p")));
}

// 0 < 1, no modal edges, p false everywhere; the root world is not maximal
// with respect to p -> q
FiniteModelOracle chain_oracle() {
    Valuation v;
    v.assign("p", Bitset::from_word(2, 0b11));
    Model m(frame_from_generators(2, {{0, 1}}, {}), v);
    return FiniteModelOracle(m, closure(F("p -> q")));
}

// test-side degree measure: closure members the world refutes without being
// maximal for
std::size_t degree(const WorldOracle& oracle, std::size_t world) {
    std::size_t d = 0;
    for (Formula member : oracle.closure().members()) {
        if (oracle.member_forced(world, member)) continue;
        for (std::size_t t = 0; t < oracle.world_count(); ++t)
            if (oracle.world_leq(world, t) && !oracle.world_leq(t, world) &&
                !oracle.member_forced(t, member)) {
                ++d;
                break;
            }
    }
    return d;
}

}  // namespace

TEST_CASE("initial clip") {
    FiniteModelOracle oracle = box_dia_oracle();
    Clip c = Clip::initial(0);
    CHECK(c.size() == 1);
    CHECK(c.lt_edges().empty());
    CHECK(c.tri_edges().empty());
    ClipReport report = validate(c, oracle);
    CHECK(report.coherent);
    CHECK(report.regular);
    for (auto kind : {Defect::Kind::Maximality, Defect::Kind::Box, Defect::Kind::Dia,
                      Defect::Kind::DownwardConfluence, Defect::Kind::ForwardConfluence})
        CHECK(find_defects(c, kind, 0, std::nullopt, oracle).empty());
}

TEST_CASE("validation catches bad edges") {
    Valuation v;
    v.assign("p", Bitset::from_word(2, 0b10));
    Model m(frame_from_generators(2, {{0, 1}}, {{0, 1}, {1, 1}, {0, 0}}), v);
    FiniteModelOracle oracle(m, closure(F("p")));

    Clip equal_rank = Clip::initial(0);
    equal_rank.add_tip(1, 0, 0);  // same rank as the initial tip
    equal_rank.add_tri(0, 1);
    ClipReport r1 = validate(equal_rank, oracle);
    CHECK_FALSE(r1.coherent);

    Clip two_preds = Clip::initial(0);
    two_preds.add_tip(1, 0, 1);
    two_preds.add_tip(1, 0, 1);
    two_preds.add_tip(1, 0, 2);
    two_preds.add_lt(0, 1);
    two_preds.add_lt(0, 2);
    two_preds.add_lt(1, 3);
    two_preds.add_lt(2, 3);
    ClipReport r2 = validate(two_preds, oracle);
    CHECK(r2.coherent);
    CHECK_FALSE(r2.regular);
}

TEST_CASE("slices") {
    FiniteModelOracle oracle = box_dia_oracle();
    Clip c = Clip::initial(0);
    Slice s0 = slice(c, 0, oracle);
    CHECK(s0.tree.size() == 2);
    CHECK(s0.tree.labels[0] == Label::root());
    CHECK(s0.tree.labels[1] == oracle.trace(0));
    CHECK(s0.tip_ids == std::vector<std::size_t>{0});

    Slice s1 = slice(c, 1, oracle);
    CHECK(s1.tree.size() == 1);
    CHECK(s1.tip_ids.empty());
}

TEST_CASE("slices of irregular clips are rejected") {
    FiniteModelOracle oracle = chain_oracle();
    Clip c = Clip::initial(0);
    c.add_tip(0, 0, 0);  // second id at the same coordinates
    c.add_tip(1, 0, 1);
    c.add_lt(0, 2);
    c.add_lt(1, 2);  // two order predecessors
    CHECK_FALSE(validate(c, oracle).regular);
    CHECK_THROWS_AS(slice(c, 0, oracle), InvariantError);
}

TEST_CASE("maximality defects and repairs on the order chain") {
    FiniteModelOracle oracle = chain_oracle();
    Clip c = Clip::initial(0);
    auto defects = find_defects(c, Defect::Kind::Maximality, 0, std::nullopt, oracle);
    REQUIRE(defects.size() == 1);
    CHECK(defects[0].tip == 0);
    CHECK(defects[0].antecedent == F("p"));
    CHECK(defects[0].consequent == F("q"));
    CHECK(defects[0].rank == 0);
    CHECK(defects[0].height == 0);

    std::size_t deg_before = degree(oracle, 0);
    repair_defect(c, defects[0], oracle);
    REQUIRE(c.size() == 2);
    CHECK(c.tip(1).world == 1);
    CHECK(c.tip(1).rank == 0);
    CHECK(c.tip(1).height == 1);
    CHECK(c.lt(0, 1));
    CHECK(validate(c, oracle).ok());
    CHECK(find_defects(c, Defect::Kind::Maximality, 0, std::nullopt, oracle).empty());
    CHECK(degree(oracle, c.tip(1).world) < deg_before);
}

TEST_CASE("box and dia repairs climb one rank at constant height") {
    // world 0 sees 1 (refuting p) and 2 (forcing p)
    Valuation v;
    v.assign("p", Bitset::from_word(3, 0b100));
    Model m(frame_from_generators(3, {}, {{0, 1}, {0, 2}}), v);
    FiniteModelOracle oracle(m, closure(F("[]p & <>p")));

    Clip c = Clip::initial(0);
    auto box = find_defects(c, Defect::Kind::Box, 0, 0, oracle);
    REQUIRE(box.size() == 1);
    repair_defect(c, box[0], oracle);
    CHECK(c.tip(1).world == 1);
    CHECK(c.tip(1).rank == 1);
    CHECK(c.tip(1).height == 0);
    CHECK(c.tri(0, 1));

    // the box refuter does not force p, so the dia defect is still open
    auto dia = find_defects(c, Defect::Kind::Dia, 0, std::nullopt, oracle);
    REQUIRE(dia.size() == 1);
    CHECK(dia[0].antecedent == F("p"));
    repair_defect(c, dia[0], oracle);
    CHECK(c.tip(2).world == 2);
    CHECK(validate(c, oracle).ok());
    CHECK(find_defects(c, Defect::Kind::Box, 0, std::nullopt, oracle).empty());
    CHECK(find_defects(c, Defect::Kind::Dia, 0, std::nullopt, oracle).empty());
}

TEST_CASE("confluence defects and repairs") {
    // worlds 0 < 1, both looping modally to 2; clip edges set up one
    // downward and one forward gap
    Valuation v;
    Model m(frame_from_generators(3, {{0, 1}}, {{0, 2}, {1, 2}, {2, 2}}), v);
    FiniteModelOracle oracle(m, closure(F("p -> q")));

    Clip c = Clip::initial(0);
    c.add_tip(1, 0, 1);  // tip 1
    c.add_lt(0, 1);
    c.add_tip(2, 1, 1);  // tip 2, modal successor of tip 1
    c.add_tri(1, 2);
    REQUIRE(validate(c, oracle).coherent);

    auto dc = find_defects(c, Defect::Kind::DownwardConfluence, 0, std::nullopt, oracle);
    REQUIRE(dc.size() == 1);
    CHECK(dc[0].tip == 0);
    CHECK(dc[0].tip_j == 1);
    CHECK(dc[0].tip_k == 2);
    repair_defect(c, dc[0], oracle);
    const Tip& fresh = c.tip(3);
    CHECK(fresh.rank == 1);
    CHECK(fresh.height == 0);
    CHECK(c.tri(0, 3));
    CHECK(c.lt(3, 2));
    CHECK(validate(c, oracle).ok());
    CHECK(find_defects(c, Defect::Kind::DownwardConfluence, 0, std::nullopt, oracle).empty());

    // the downward repair also closed the would-be forward gap (the new tip
    // is an order predecessor of the modal target)
    CHECK(find_defects(c, Defect::Kind::ForwardConfluence, 0, std::nullopt, oracle).empty());

    // a clip whose modal edge leaves the lower end of the chain has a
    // forward gap at the upper end
    Clip c2 = Clip::initial(0);
    c2.add_tip(1, 0, 1);  // tip 1, order successor of the initial tip
    c2.add_lt(0, 1);
    c2.add_tip(2, 1, 0);  // tip 2, modal successor of the initial tip
    c2.add_tri(0, 2);
    REQUIRE(validate(c2, oracle).ok());

    auto fc = find_defects(c2, Defect::Kind::ForwardConfluence, 0, std::nullopt, oracle);
    REQUIRE(fc.size() == 1);
    CHECK(fc[0].tip == 1);
    CHECK(fc[0].tip_j == 0);
    CHECK(fc[0].tip_k == 2);
    repair_defect(c2, fc[0], oracle);
    const Tip& added = c2.tip(3);
    CHECK(added.rank == 1);
    CHECK(added.height == 1);
    CHECK(c2.tri(1, 3));
    CHECK(c2.lt(2, 3));
    CHECK(validate(c2, oracle).ok());
    CHECK(find_defects(c2, Defect::Kind::ForwardConfluence, 0, std::nullopt, oracle).empty());
}

TEST_CASE("repair procedures") {
    FiniteModelOracle oracle = chain_oracle();
    SaturationStats stats;
    SaturationOptions options;

    Clip untouched = Clip::initial(1);  // world 1 is maximal for everything
    run_repair_procedure(untouched, Procedure::Maximality, 0, oracle, stats, options);
    CHECK(untouched.size() == 1);

    Clip c = Clip::initial(0);
    run_repair_procedure(c, Procedure::Maximality, 0, oracle, stats, options);
    CHECK(c.size() == 2);
    CHECK(find_defects(c, Defect::Kind::Maximality, 0, std::nullopt, oracle).empty());
    CHECK(validate(c, oracle).ok());

    run_repair_procedure(c, Procedure::Accessibility, 0, oracle, stats, options);
    for (const Tip& t : c.tips())
        CHECK(t.rank <= 1);  // the rank-0 pass introduces rank-1 tips only
}

TEST_CASE("saturation of the hand-traced fixture") {
    FiniteModelOracle oracle = box_dia_oracle();
    CHECK_FALSE(oracle.member_forced(0, F("[]p -> <>p")));

    SaturationResult r = saturate(oracle, 0);
    CHECK(r.alpha_f == 2);
    CHECK(r.beta_f == 1);
    CHECK(r.clip.size() == 1);
    CHECK(r.clip.lt_edges().empty());
    CHECK(r.clip.tri_edges().empty());
    CHECK(r.stats.repairs == 0);
    CHECK(slice(r.clip, 1, oracle).tree.size() == 1);
    CHECK(slice(r.clip, 2, oracle).tree.size() == 1);
    CHECK(validate(r.clip, oracle).ok());

    SaturatedModel sm = build_saturated_model(r, oracle);
    CHECK(sm.model.size() == 1);
    CHECK(sm.model.frame().rel() == Relation(1));
    CHECK_FALSE(forces(sm.model, 0, F("[]p -> <>p")));
    CHECK(check_truth_lemma(r, sm, oracle).empty());
}

TEST_CASE("saturation with a self loop exercises the loop-back relation") {
    Valuation v;
    v.assign("p", Bitset::from_word(1, 1));
    Model m(frame_from_generators(1, {}, {{0, 0}}), v);
    FiniteModelOracle oracle(m, closure(F("<>p")));

    SaturationResult r = saturate(oracle, 0);
    CHECK(r.alpha_f == 2);
    CHECK(r.beta_f == 1);
    CHECK(r.clip.size() == 3);
    REQUIRE(r.loop_embedding.size() == 1);
    CHECK(validate(r.clip, oracle).ok());

    SaturatedModel sm = build_saturated_model(r, oracle);
    // the final tip loops back, so the modal relation has a cycle
    CHECK(sm.model.frame().rel().at(2, 2));
    CHECK(check_truth_lemma(r, sm, oracle).empty());

    // dropping the loop-back edge breaks the correspondence for the diamond
    Relation bare(3);
    for (auto [i, j] : r.clip.tri_edges()) bare.set(i, j);
    Model corrupted(Frame(sm.model.frame().leq(), bare.transitive_closure()),
                    sm.model.valuation());
    SaturatedModel broken{corrupted, sm.tip_world};
    auto violations = check_truth_lemma(r, broken, oracle);
    REQUIRE_FALSE(violations.empty());
    bool dia_violation = false;
    for (const auto& viol : violations)
        if (viol.formula.kind() == Kind::Dia) dia_violation = true;
    CHECK(dia_violation);
}

TEST_CASE("clips stay coherent and regular between procedures") {
    // drive the saturation steps by hand, validating after every procedure
    Valuation v;
    v.assign("p", Bitset::from_word(2, 0b10));
    Model m(frame_from_generators(2, {{0, 1}}, {{0, 1}, {1, 1}}), v);
    FiniteModelOracle oracle(m, closure(F("<>p -> []p")));

    SaturationStats stats;
    SaturationOptions options;
    Clip c = Clip::initial(0);
    for (std::size_t rank = 0; rank < 3; ++rank) {
        for (Procedure p : {Procedure::Maximality, Procedure::Accessibility,
                            Procedure::DownwardConfluence, Procedure::ForwardConfluence}) {
            run_repair_procedure(c, p, rank, oracle, stats, options);
            ClipReport report = validate(c, oracle);
            INFO(procedure_name(p), " at rank ", rank);
            CHECK(report.ok());
        }
        for (std::size_t beta = 0; beta <= rank; ++beta) CHECK_NOTHROW(slice(c, beta, oracle));
    }
    CHECK(stats.repairs > 0);
}

TEST_CASE("saturated clips keep the staged cleanness") {
    Valuation v;
    v.assign("p", Bitset::from_word(2, 0b10));
    Model m(frame_from_generators(2, {{0, 1}}, {{0, 1}, {1, 1}, {0, 0}}), v);
    FiniteModelOracle oracle(m, closure(F("[]p -> <>p")));

    SaturationResult r = saturate(oracle, 0);
    CHECK(validate(r.clip, oracle).ok());
    CHECK(clean_below(r.clip, Procedure::Maximality, r.alpha_f + 1, oracle));
    CHECK(clean_below(r.clip, Procedure::Accessibility, r.alpha_f, oracle));
    CHECK(clean_below(r.clip, Procedure::DownwardConfluence, r.alpha_f, oracle));
    CHECK(clean_below(r.clip, Procedure::ForwardConfluence, r.alpha_f, oracle));
    // slices beyond the halting rank are empty
    for (const Tip& t : r.clip.tips()) CHECK(t.rank <= r.alpha_f);

    SaturatedModel sm = build_saturated_model(r, oracle);
    for (FrameCondition c : {FrameCondition::Transitive, FrameCondition::Downward,
                             FrameCondition::Forward})
        CHECK(check_frame_condition(sm.model.frame(), c).holds);
    CHECK(check_truth_lemma(r, sm, oracle).empty());

    // regular clips induce upward confluent frames
    std::size_t n = r.clip.size();
    Relation lt_rel(n), tri_rel(n);
    for (auto [i, j] : r.clip.lt_edges()) lt_rel.set(i, j);
    for (auto [i, j] : r.clip.tri_edges()) tri_rel.set(i, j);
    Frame induced(lt_rel.reflexive_transitive_closure(), tri_rel.transitive_closure());
    CHECK(check_frame_condition(induced, FrameCondition::Upward).holds);
}
