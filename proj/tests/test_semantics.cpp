#include "doctest.h"

#include "ik4/enumeration.hpp"
#include "ik4/semantics.hpp"
#include "test_support.hpp"

using namespace ik4;
using ik4::testing::F;

namespace {

Frame chain2() { return frame_from_generators(2, {{0, 1}}, {}); }

Model chain2_p_at_1() {
    Valuation v;
    v.assign("p", Bitset::from_word(2, 0b10));
    return Model(chain2(), v);
}

}  // namespace

TEST_CASE("relation closures") {
    Relation empty(3);
    CHECK(relation_closure(empty, ClosureMode::Transitive) == empty);

    Relation r = Relation::from_pairs(3, {{0, 1}, {1, 2}});
    Relation rt = relation_closure(r, ClosureMode::Transitive);
    CHECK(rt == Relation::from_pairs(3, {{0, 1}, {1, 2}, {0, 2}}));

    Relation single = Relation::from_pairs(2, {{0, 1}});
    CHECK(relation_closure(single, ClosureMode::ReflexiveTransitive) ==
          Relation::from_pairs(2, {{0, 0}, {1, 1}, {0, 1}}));

    // idempotent and monotone; R ⊆ R+ ⊆ R*
    Relation plus = r.transitive_closure();
    Relation star = r.reflexive_transitive_closure();
    CHECK(plus.transitive_closure() == plus);
    CHECK(star.reflexive_transitive_closure() == star);
    CHECK(r.subset_of(plus));
    CHECK(plus.subset_of(star));
}

TEST_CASE("frame construction") {
    CHECK_THROWS_AS(Frame(Relation::from_pairs(2, {{0, 1}}), Relation(2)), std::invalid_argument);
    CHECK_THROWS_AS(Frame(Relation(0), Relation(0)), std::invalid_argument);
    Frame f = chain2();
    CHECK(f.leq().at(0, 0));
    CHECK(f.leq().at(0, 1));
    CHECK_FALSE(f.leq().at(1, 0));
}

TEST_CASE("upward closed subsets") {
    CHECK(upward_closed_subsets(chain2().leq()).size() == 3);
    CHECK(upward_closed_subsets(Relation::identity(2)).size() == 4);
}

TEST_CASE("valuations must be up-closed") {
    Valuation bad;
    bad.assign("p", Bitset::from_word(2, 0b01));  // contains 0 but not 1
    CHECK_THROWS_AS(Model(chain2(), bad), std::invalid_argument);
}

TEST_CASE("frame conditions with witnesses") {
    Frame trivial = frame_from_generators(1, {}, {});
    for (FrameCondition c : {FrameCondition::Transitive, FrameCondition::Upward,
                             FrameCondition::Downward, FrameCondition::Forward})
        CHECK(check_frame_condition(trivial, c).holds);

    Frame non_dc = frame_from_generators(3, {{0, 1}}, {{1, 2}});
    auto down = check_frame_condition(non_dc, FrameCondition::Downward);
    CHECK_FALSE(down.holds);
    CHECK(down.witness == std::array<std::size_t, 3>{0, 1, 2});

    Frame non_fc = frame_from_generators(3, {{1, 0}}, {{1, 2}});
    auto fwd = check_frame_condition(non_fc, FrameCondition::Forward);
    CHECK_FALSE(fwd.holds);
    CHECK(fwd.witness == std::array<std::size_t, 3>{0, 1, 2});

    Frame non_trans = frame_from_generators(3, {}, {{0, 1}, {1, 2}});
    auto trans = check_frame_condition(non_trans, FrameCondition::Transitive);
    CHECK_FALSE(trans.holds);
    CHECK(trans.witness == std::array<std::size_t, 3>{0, 1, 2});
}

TEST_CASE("forcing on a single reflexive-free world") {
    Model m(frame_from_generators(1, {}, {}), Valuation{});
    for (Variant v : all_variants) {
        CHECK(forces(m, 0, F("[]F"), v));
        CHECK_FALSE(forces(m, 0, F("<>T"), v));
    }
    CHECK_THROWS_AS(forces(m, 1, F("p")), std::invalid_argument);
}

TEST_CASE("two point refutation of excluded middle") {
    Model m = chain2_p_at_1();
    CHECK_FALSE(forces(m, 0, F("p | ~p")));
    CHECK(forces(m, 1, F("p | ~p")));
    CHECK_FALSE(true_in_model(m, F("p")));
}

TEST_CASE("truth of the normality constants") {
    Model m = chain2_p_at_1();
    CHECK(true_in_model(m, F("[]T")));
    CHECK(true_in_model(m, F("~<>F")));
}

TEST_CASE("validity in a frame") {
    CHECK(valid_in_frame(chain2(), F("[]T")).valid);

    Frame reflexive_point = frame_from_generators(1, {}, {{0, 0}});
    CHECK(valid_in_frame(reflexive_point, F("<>p -> p")).valid);

    auto em = valid_in_frame(chain2(), F("p | ~p"));
    CHECK_FALSE(em.valid);
    Model witness(chain2(), *em.valuation);
    CHECK_FALSE(forces(witness, em.world, F("p | ~p")));
}

TEST_CASE("the classical diamond makes the dc axiom frame-insensitive") {
    // With both modal clauses evaluated at the current world, the downward
    // confluence axiom is a pointwise tautology, so even a frame violating
    // downward confluence validates it; the layered-box variants refute it
    // there.
    Frame non_dc = frame_from_generators(3, {{0, 1}}, {{1, 2}});
    Formula ad = F("[](p | q) -> <>p | []q");
    CHECK(valid_in_frame(non_dc, ad, Variant::BD).valid);
    for (Variant v : {Variant::FS, Variant::P, Variant::W}) {
        auto check = valid_in_frame(non_dc, ad, v);
        CHECK_FALSE(check.valid);
        Model witness(non_dc, *check.valuation);
        CHECK_FALSE(forces(witness, check.world, ad, v));
    }
}

TEST_CASE("heredity") {
    std::vector<Formula> pool{F("p"), F("~p"), F("p -> q"), F("[]p"), F("<>p"), F("p & q"),
                              F("p | q")};

    Model single(frame_from_generators(1, {}, {}), Valuation{});
    CHECK(check_heredity(single, pool).empty());

    CHECK(check_heredity(chain2_p_at_1(), pool).empty());

    // a non-dc frame where the diamond loses persistence
    Valuation v;
    v.assign("p", Bitset::from_word(3, 0b100));
    Model leaky(frame_from_generators(3, {{0, 1}}, {{0, 2}}), v);
    auto violations = check_heredity(leaky, pool);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].formula == F("<>p"));
    CHECK(violations[0].from == 0);
    CHECK(violations[0].to == 1);
}

TEST_CASE("variants coincide on confluent frames") {
    std::vector<Formula> pool{F("p"),  F("~p"), F("p -> q"), F("[]p"),      F("<>p"),
                              F("[]p -> <>p"), F("<>(p | q)"), F("[](p -> q)"), F("~<>p")};
    std::vector<std::string> atoms{"p", "q"};
    std::size_t models_checked = 0;
    enumerate_frames(2, FrameFilter::logic_class(), [&](const Frame& f) {
        for (const Valuation& val : enumerate_valuations(f, atoms)) {
            Model m(f, val);
            ++models_checked;
            for (Formula g : pool) {
                bool bd = true;
                for (std::size_t w = 0; w < m.size(); ++w) {
                    bd = forces(m, w, g, Variant::BD);
                    CHECK(forces(m, w, g, Variant::FS) == bd);
                    CHECK(forces(m, w, g, Variant::P) == bd);
                    CHECK(forces(m, w, g, Variant::W) == bd);
                }
            }
        }
        return true;
    });
    CHECK(models_checked > 50);
}

TEST_CASE("model files") {
    const char* text =
        "worlds 3\n"
        "# a comment\n"
        "le 0 1\n"
        "r 1 2\n"
        "val p 2\n";
    Model m = parse_model(text);
    CHECK(m.size() == 3);
    CHECK(m.frame().leq().at(0, 1));
    CHECK(m.frame().leq().at(1, 1));
    CHECK(m.frame().rel().at(1, 2));
    CHECK(m.valuation().worlds("p", 3).test(2));

    Model again = parse_model(format_model(m));
    CHECK(again == m);

    CHECK_THROWS_AS(parse_model("worlds 2\nworlds 2\n"), FileFormatError);
    CHECK_THROWS_AS(parse_model("worlds 2\nle 0 5\n"), FileFormatError);
    CHECK_THROWS_AS(parse_model("le 0 1\nworlds 2\n"), FileFormatError);
    CHECK_THROWS_AS(parse_model("worlds 2\nbogus 1\n"), FileFormatError);
    CHECK_THROWS_AS(parse_model(""), FileFormatError);
    // valuation not up-closed after closing the order
    CHECK_THROWS_AS(parse_model("worlds 2\nle 0 1\nval p 0\n"), FileFormatError);
}
