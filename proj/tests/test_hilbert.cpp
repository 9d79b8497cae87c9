#include "doctest.h"

#include <fstream>
#include <sstream>

#include "ik4/enumeration.hpp"
#include "ik4/hilbert.hpp"
#include "test_support.hpp"

using namespace ik4;
using ik4::testing::F;
using ik4::testing::random_formula;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(IK4_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("schema matching") {
    const Schema* ad = find_schema("Ad");
    REQUIRE(ad);
    auto sub = match_schema(*ad, F("[](([]p) | q) -> <>[]p | []q"));
    REQUIRE(sub.has_value());
    CHECK(sub->at("p") == F("[]p"));
    CHECK(sub->at("q") == F("q"));

    const Schema* nbox = find_schema("N[]");
    REQUIRE(nbox);
    auto empty = match_schema(*nbox, F("[]T"));
    REQUIRE(empty.has_value());
    CHECK(empty->empty());

    CHECK_FALSE(match_schema(*ad, F("[]p -> []p")).has_value());

    // a matched substitution reproduces the instance
    CHECK(apply_substitution(ad->pattern, *sub) == F("[](([]p) | q) -> <>[]p | []q"));
}

TEST_CASE("accepted axiom instances are valid on confluent transitive frames") {
    std::mt19937 rng(42);
    std::vector<Formula> instances;
    for (const Schema& schema : modal_schemata())
        for (int i = 0; i < 2; ++i) {
            Substitution sub;
            sub["p"] = random_formula(rng, 1, {"p", "q"});
            sub["q"] = random_formula(rng, 1, {"p", "q"});
            Formula inst = apply_substitution(schema.pattern, sub);
            REQUIRE(match_schema(schema, inst).has_value());
            instances.push_back(inst);
        }
    enumerate_frames(2, FrameFilter::logic_class(), [&](const Frame& f) {
        for (Formula inst : instances) CHECK(valid_in_frame(f, inst).valid);
        return true;
    });
}

TEST_CASE("modal freezing") {
    Formula f = F("[]p -> ([]p | <>(p -> q))");
    Formula frozen = freeze_modal(f);
    // both box occurrences share one fresh atom
    REQUIRE(frozen.kind() == Kind::Implies);
    CHECK(frozen.lhs() == frozen.rhs().lhs());
    CHECK(frozen.rhs().rhs() != frozen.lhs());
    CHECK_NOTHROW(ipl_valid(frozen));
    CHECK(ipl_valid(frozen));
}

TEST_CASE("propositional validity") {
    CHECK(ipl_valid(F("p -> p")));
    CHECK(ipl_valid(F("F -> p")));
    CHECK(ipl_valid(F("p -> (q -> p)")));
    CHECK(ipl_valid(F("p & q -> q & p")));
    CHECK(ipl_valid(F("p | q -> q | p")));
    CHECK(ipl_valid(F("~~(p | ~p)")));
    CHECK(ipl_valid(F("p | q -> ((p -> q) -> q)")));
    CHECK(ipl_valid(F("(p -> (q -> r)) -> ((p -> q) -> (p -> r))")));

    CHECK_FALSE(ipl_valid(F("p | ~p")));
    CHECK_FALSE(ipl_valid(F("((p -> q) -> p) -> p")));  // Peirce
    CHECK_FALSE(ipl_valid(F("~~p -> p")));
    CHECK_FALSE(ipl_valid(F("(p -> q) | (q -> p)")));

    CHECK_THROWS_AS(ipl_valid(F("[]p -> p")), std::invalid_argument);
}

namespace {

// order-only Kripke refutation search: preorders up to the bound, empty
// modal relation
std::optional<std::pair<Model, std::size_t>> ipl_countermodel(Formula f, std::size_t bound) {
    std::vector<std::string> atoms = atoms_of(f);
    for (std::size_t n = 1; n <= bound; ++n) {
        std::optional<std::pair<Model, std::size_t>> hit;
        enumerate_preorders(n, [&](const Relation& leq) {
            Frame frame(leq, Relation(n));
            for (const Valuation& val : enumerate_valuations(frame, atoms)) {
                Model m(frame, val);
                for (std::size_t w = 0; w < n; ++w)
                    if (!forces(m, w, f)) {
                        hit = {std::move(m), w};
                        return false;
                    }
            }
            return true;
        });
        if (hit) return hit;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("propositional validity agrees with bounded countermodel search") {
    std::mt19937 rng(7);
    std::size_t invalid_count = 0;
    for (int i = 0; i < 300; ++i) {
        Formula f = random_formula(rng, 3, {"p", "q"}, /*allow_modal=*/false);
        bool valid = ipl_valid(f);
        auto search = ipl_countermodel(f, 3);
        if (valid) {
            CHECK_FALSE(search.has_value());
        } else {
            ++invalid_count;
            REQUIRE(search.has_value());
            CHECK_FALSE(forces(search->first, search->second, f));
        }
    }
    CHECK(invalid_count > 30);  // the sample exercises both verdicts
}

TEST_CASE("the bundled derivations check") {
    Proof axiom = parse_proof(slurp("derived-axiom.prf"));
    REQUIRE(axiom.lines.size() == 3);
    ProofCheck r1 = check_proof(axiom);
    CHECK(r1.ok);
    CHECK(r1.first_bad_line == 0);

    Proof rule = parse_proof(slurp("derived-rule.prf"));
    REQUIRE(rule.lines.size() == 5);
    ProofCheck r2 = check_proof(rule);
    INFO(r2.reason);
    CHECK(r2.ok);

    // parse/format round trip preserves checkability
    CHECK(check_proof(parse_proof(format_proof(axiom))).ok);
    CHECK(check_proof(parse_proof(format_proof(rule))).ok);

    // every prefix of a valid proof is valid
    for (const Proof* proof : {&axiom, &rule})
        for (std::size_t n = 1; n <= proof->lines.size(); ++n) {
            Proof prefix;
            prefix.lines.assign(proof->lines.begin(), proof->lines.begin() + n);
            CHECK(check_proof(prefix).ok);
        }
}

TEST_CASE("single line mutations are rejected") {
    Proof axiom = parse_proof(slurp("derived-axiom.prf"));
    // swap the final consequent pair: no longer follows
    Proof broken = axiom;
    broken.lines[2].formula = F("[](p | q) -> (([]q -> <>p) -> []q)");
    ProofCheck r = check_proof(broken);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad_line == 3);

    Proof bad_axiom = axiom;
    bad_axiom.lines[1].formula = F("[](p | q) -> <>q | []q");
    r = check_proof(bad_axiom);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad_line == 2);

    Proof rule = parse_proof(slurp("derived-rule.prf"));
    Proof bad_rdia = rule;
    bad_rdia.lines[2].formula = F("<>p -> <>((p -> r) -> p)");
    r = check_proof(bad_rdia);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad_line == 3);
}

TEST_CASE("line justifications") {
    // modus ponens cites antecedent then implication
    Proof mp;
    mp.lines.push_back({F("p"), just::Hypothesis{}});
    mp.lines.push_back({F("p -> q"), just::Hypothesis{}});
    mp.lines.push_back({F("q"), just::ModusPonens{1, 2}});
    CHECK(check_proof(mp).ok);
    mp.lines[2].justification = just::ModusPonens{2, 1};
    CHECK_FALSE(check_proof(mp).ok);

    Proof rbox;
    rbox.lines.push_back({F("p & q -> p"), just::IplConsequence{}});
    rbox.lines.push_back({F("[](p & q) -> []p"), just::RuleBox{1}});
    rbox.lines.push_back({F("<>(p & q) -> <>p"), just::RuleDia{1}});
    CHECK(check_proof(rbox).ok);

    Proof subst;
    subst.lines.push_back({F("p -> p"), just::IplConsequence{}});
    subst.lines.push_back({F("[]r -> []r"), just::Substituted{1, {{"p", F("[]r")}}}});
    CHECK(check_proof(subst).ok);
    subst.lines[1].formula = F("[]r -> []q");
    CHECK_FALSE(check_proof(subst).ok);

    // forward citations are rejected
    Proof forward;
    forward.lines.push_back({F("q"), just::ModusPonens{1, 2}});
    forward.lines.push_back({F("p -> q"), just::Hypothesis{}});
    CHECK_FALSE(check_proof(forward).ok);
}

TEST_CASE("proof file parsing errors") {
    CHECK_THROWS_AS(parse_proof("1. p ->"), FileFormatError);
    CHECK_THROWS_AS(parse_proof("1. p"), FileFormatError);
    CHECK_THROWS_AS(parse_proof("2. p ; HYP"), FileFormatError);
    CHECK_THROWS_AS(parse_proof("1. p ; NOPE"), FileFormatError);
    CHECK_THROWS_AS(parse_proof("1. p ; MP 1"), FileFormatError);
    CHECK_THROWS_AS(parse_proof("1. p ; AX"), FileFormatError);
    CHECK_NOTHROW(parse_proof(""));
    CHECK_NOTHROW(parse_proof("# only a comment\n"));
}
