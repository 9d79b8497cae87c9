#include "doctest.h"

#include <map>
#include <set>

#include "ik4/ltree.hpp"
#include "test_support.hpp"

using namespace ik4;
using ik4::testing::random_monotone_tree;

namespace {

LabelledTree T(const char* text, std::size_t width = 1) { return parse_tree(text, width); }

}  // namespace

TEST_CASE("tree parsing and formatting") {
    LabelledTree t = T("(-1 ({0}) ({0} ({0,1})))", 2);
    CHECK(t.size() == 4);
    CHECK(t.labels[0] == Label::root());
    CHECK(format_tree(t) == "(-1 ({0}) ({0} ({0,1})))");
    CHECK_THROWS_AS(T("({0}", 1), ParseError);
    CHECK_THROWS_AS(T("({3})", 1), ParseError);
    // non-monotone edge
    CHECK_THROWS_AS(T("({0} ({}))", 1), std::invalid_argument);
    // sentinel below a set label
    CHECK_THROWS_AS(T("({0} (-1))", 1), std::invalid_argument);
}

TEST_CASE("strictness and niceness predicates") {
    CHECK(is_strict(T("({0})")));
    CHECK_FALSE(is_strict(T("({0} ({0}))")));
    CHECK(is_strict(T("(-1 ({}) ({0}))")));
    CHECK(is_nice(T("(-1 ({}) ({0}))")));
    CHECK_FALSE(is_nice(T("(-1 ({0}) ({0}))")));
}

TEST_CASE("strictify contracts duplicate edges") {
    Reduction same = strictify(T("({0})"));
    CHECK(same.tree.size() == 1);

    Reduction pair = strictify(T("({0} ({0}))"));
    CHECK(pair.tree.size() == 1);
    CHECK(pair.tree.labels[0] == T("({0})").labels[0]);

    Reduction chain = strictify(T("(-1 ({0} ({0})))"));
    CHECK(chain.tree.size() == 2);
    CHECK(format_tree(chain.tree) == "(-1 ({0}))");

    for (const Reduction* r : {&same, &pair, &chain}) CHECK(is_strict(r->tree));
}

TEST_CASE("canonical codes ignore sibling order") {
    CHECK(canonical_code(T("({0})")) == canonical_code(T("({0})")));
    CHECK(canonical_code(T("(-1 ({}) ({0,1}))", 2)) == canonical_code(T("(-1 ({0,1}) ({}))", 2)));
    CHECK(canonical_code(T("({0})", 2)) != canonical_code(T("({1})", 2)));
}

TEST_CASE("nicify deletes one of two isomorphic siblings") {
    LabelledTree untouched = T("(-1 ({}) ({0}))");
    CHECK(nicify(untouched).tree.size() == 3);

    Reduction two = nicify(T("(-1 ({0}) ({0}))"));
    CHECK(format_tree(two.tree) == "(-1 ({0}))");

    Reduction xxy = nicify(T("(-1 ({0} ({0,1})) ({0} ({0,1})) ({1}))", 2));
    CHECK(xxy.tree.size() == 4);
    CHECK(is_nice(xxy.tree));

    CHECK_THROWS_AS(nicify(T("({0} ({0}))")), std::invalid_argument);
}

TEST_CASE("embedding search") {
    // a single node embeds wherever its label occurs
    CHECK(embeds_into(T("({0})"), T("(-1 ({}) ({0}))")).has_value());
    // a duplicate chain embeds into the single node (reflexive reachability)
    auto folded = embeds_into(T("({0} ({0}))"), T("({0})"));
    REQUIRE(folded.has_value());
    CHECK((*folded)[0] == 0);
    CHECK((*folded)[1] == 0);
    CHECK_FALSE(embeds_into(T("({0})", 2), T("({1})", 2)).has_value());
    CHECK_THROWS_AS(embeds_into(T("({0})", 1), T("({0})", 2)), std::invalid_argument);
}

TEST_CASE("similarity") {
    LabelledTree t = T("(-1 ({}) ({0}))");
    CHECK(equivalent_sim(t, t).has_value());
    CHECK(equivalent_sim(T("({0} ({0}))"), T("({0})")).has_value());
    CHECK_FALSE(equivalent_sim(T("({0})", 2), T("({1})", 2)).has_value());
}

TEST_CASE("reduction witnesses are valid embeddings") {
    std::mt19937 rng(77);
    for (int i = 0; i < 300; ++i) {
        LabelledTree t = random_monotone_tree(rng, 2, 6);
        validate_tree(t);
        Reduction s = strictify(t);
        CHECK(s.tree.size() <= t.size());
        CHECK(is_strict(s.tree));
        CHECK(check_embedding(t, s.tree, s.into_result));
        CHECK(check_embedding(s.tree, t, s.into_input));

        Reduction n = nicify(s.tree);
        CHECK(n.tree.size() <= s.tree.size());
        CHECK(is_nice(n.tree));
        CHECK(check_embedding(s.tree, n.tree, n.into_result));
        CHECK(check_embedding(n.tree, s.tree, n.into_input));

        // similarity is preserved end to end
        CHECK(equivalent_sim(t, n.tree).has_value());
    }
}

TEST_CASE("similarity is an equivalence on sampled trees") {
    std::mt19937 rng(31);
    std::vector<LabelledTree> pool;
    for (int i = 0; i < 12; ++i) pool.push_back(random_monotone_tree(rng, 1, 4));
    for (const auto& a : pool) CHECK(equivalent_sim(a, a).has_value());
    for (const auto& a : pool)
        for (const auto& b : pool) {
            bool ab = equivalent_sim(a, b).has_value();
            CHECK(ab == equivalent_sim(b, a).has_value());
            for (const auto& c : pool)
                if (ab && equivalent_sim(b, c).has_value())
                    CHECK(equivalent_sim(a, c).has_value());
        }
    // isomorphism refines similarity
    for (const auto& a : pool)
        for (const auto& b : pool)
            if (canonical_code(a) == canonical_code(b)) CHECK(equivalent_sim(a, b).has_value());
}

TEST_CASE("height of strict trees is bounded by the longest label chain") {
    std::mt19937 rng(5);
    for (int i = 0; i < 200; ++i) {
        LabelledTree t = strictify(random_monotone_tree(rng, 2, 7)).tree;
        std::size_t max_depth = 0;
        for (std::size_t node = 0; node < t.size(); ++node) {
            std::size_t d = 0;
            for (std::size_t cur = node; t.parent[cur] != tree_npos; cur = t.parent[cur]) ++d;
            max_depth = std::max(max_depth, d);
        }
        CHECK(max_depth <= 1 + t.width);  // sentinel + a chain of growing subsets
    }
}

TEST_CASE("tree count recurrence") {
    CHECK(nlt_bound(0, 1).to_string() == "1");
    CHECK(nlt_bound(1, 1).to_string() == "2");
    CHECK(nlt_bound(1, 3).to_string() == "24");
    CHECK(nlt_bound(0, 5).to_string() == "5");
    CHECK(nlt_bound(2, 3).to_string() == std::to_string(3ull * (1ull << 24)));
    CHECK(nlt_bound(2, 5).bit_size() == 163);  // 5 * 2^160
    CHECK_THROWS_AS(nlt_bound(3, 5), std::overflow_error);
}

TEST_CASE("nice tree enumeration") {
    // a single incomparable label admits only the leaf
    std::vector<Label> single{Label::set(Bitset::from_word(1, 0b1))};
    std::size_t count = 0;
    enumerate_nice_trees_over(single, 1, 4, [&](const LabelledTree&) {
        ++count;
        return true;
    });
    CHECK(count == 1);

    // two-element chain, height <= 1: both leaves and the edge
    std::vector<Label> chain{Label::set(Bitset::from_word(1, 0b0)),
                             Label::set(Bitset::from_word(1, 0b1))};
    std::vector<std::string> seen;
    enumerate_nice_trees_over(chain, 1, 1, [&](const LabelledTree& t) {
        seen.push_back(format_tree(t));
        return true;
    });
    CHECK(seen == std::vector<std::string>{"({})", "({} ({0}))", "({0})"});

    // full width-1 universe: every tree is nice and unique, counts under the
    // recurrence at each height
    for (std::size_t h = 0; h <= 2; ++h) {
        std::set<std::string> codes;
        std::size_t total = 0;
        enumerate_nice_trees(1, h, [&](const LabelledTree& t) {
            ++total;
            CHECK(is_nice(t));
            codes.insert(canonical_code(t));
            return true;
        });
        CHECK(codes.size() == total);
        CHECK(BigNat(total) <= nlt_bound(h, 3));
    }
    std::size_t full = 0;
    enumerate_nice_trees(1, 2, [&](const LabelledTree&) {
        ++full;
        return true;
    });
    CHECK(full == 11);
}

TEST_CASE("dreary detection") {
    CHECK_FALSE(is_dreary({}).has_value());

    std::vector<LabelledTree> family{LabelledTree::single(1, Label::root()),
                                     LabelledTree::single(1, Label::root())};
    CHECK(is_dreary(family) == 1);

    std::vector<LabelledTree> distinct{LabelledTree::single(2, Label::set(Bitset::from_word(2, 1))),
                                       LabelledTree::single(2, Label::set(Bitset::from_word(2, 2)))};
    CHECK_FALSE(is_dreary(distinct).has_value());

    std::vector<LabelledTree> one{LabelledTree::single(1, Label::root())};
    CHECK_FALSE(is_dreary(one).has_value());
}

TEST_CASE("pigeonhole dreariness on the width-1 universe") {
    // classes of all trees = classes of nice trees; classify the 11 nice
    // representatives by similarity
    std::vector<LabelledTree> nice;
    enumerate_nice_trees(1, 2, [&](const LabelledTree& t) {
        nice.push_back(t);
        return true;
    });
    std::vector<LabelledTree> class_reps;
    for (const auto& t : nice) {
        bool fresh = true;
        for (const auto& rep : class_reps)
            if (equivalent_sim(t, rep)) {
                fresh = false;
                break;
            }
        if (fresh) class_reps.push_back(t);
    }
    std::size_t k = class_reps.size();
    CHECK(k >= 3);

    std::mt19937 rng(2024);
    for (int run = 0; run < 30; ++run) {
        std::vector<LabelledTree> stream;
        std::optional<std::size_t> hit;
        for (std::size_t i = 0; i < k + 1; ++i) {
            stream.push_back(random_monotone_tree(rng, 1, 5));
            if (is_dreary(stream)) {
                hit = stream.size();
                break;
            }
        }
        REQUIRE(hit.has_value());
        CHECK(*hit <= k + 1);
    }
}
