"""Smoke tests for the Python module: one pass over every exposed operation."""

import ik4


def test_formulas():
    f = ik4.parse("[]p -> <>p")
    assert str(f) == "[]p -> <>p"
    assert f.kind == "implies"
    assert ik4.length(f) == 7
    assert f == ik4.Formula.implies(ik4.Formula.box(ik4.parse("p")), ik4.parse("<>p"))
    members = ik4.closure_members(f)
    assert len(members) == 4
    assert ik4.parse("p") in members
    assert ik4.atoms(ik4.parse("p -> q & p")) == ["p", "q"]
    try:
        ik4.parse("p ->")
    except ValueError:
        pass
    else:
        raise AssertionError("expected a syntax error")


def test_models():
    m = ik4.Model.load("worlds 2\nle 0 1\nval p 1\n")
    assert m.worlds == 2
    assert not ik4.forces(m, 0, ik4.parse("p | ~p"))
    assert ik4.forces(m, 1, ik4.parse("p"))
    assert ik4.true_in_model(m, ik4.parse("[]T"))
    holds, witness = ik4.check_condition(m, "downward")
    assert holds and witness is None
    assert ik4.heredity_violations(m, [ik4.parse("p"), ik4.parse("<>p")]) == []
    valid, falsifying, world = ik4.valid_in_frame(m, ik4.parse("p | ~p"))
    assert not valid
    assert falsifying.worlds == 2
    assert not ik4.forces(falsifying, world, ik4.parse("p | ~p"))
    reloaded = ik4.Model.load(m.to_text())
    assert reloaded == m


def test_variants():
    m = ik4.Model.load("worlds 3\nle 0 1\nr 1 2\nval p 2\n")
    ad = ik4.parse("[](p | q) -> <>p | []q")
    assert ik4.valid_in_frame(m, ad, "BD")[0]
    assert not ik4.valid_in_frame(m, ad, "FS")[0]


def test_search_and_saturation():
    hit = ik4.countermodel_search(ik4.parse("[]p -> <>p"), bound=1)
    assert hit.found and hit.model.worlds == 1

    miss = ik4.countermodel_search(ik4.parse("[]T"), bound=2)
    assert not miss.found and miss.model is None

    summary = ik4.saturate(hit.model, ik4.parse("[]p -> <>p"), hit.world)
    assert summary.tips == 1
    assert summary.alpha_f == 2
    assert summary.beta_f == 1
    assert summary.truth_lemma_violations == 0
    assert not ik4.forces(summary.saturated_model, 0, ik4.parse("[]p -> <>p"))


def test_propositional():
    assert ik4.ipl_valid(ik4.parse("p -> p"))
    assert not ik4.ipl_valid(ik4.parse("p | ~p"))
    frozen = ik4.freeze_modal(ik4.parse("[]p -> []p"))
    assert ik4.ipl_valid(frozen)


def test_proofs():
    ok, bad, reason = ik4.check_proof(
        "1. <>p | []q -> ((<>p -> []q) -> []q) ; IPL\n"
        "2. [](p | q) -> <>p | []q ; AX Ad\n"
        "3. [](p | q) -> ((<>p -> []q) -> []q) ; IPL 1 2\n"
    )
    assert ok, reason
    ok, bad, reason = ik4.check_proof("1. p | ~p ; IPL\n")
    assert not ok and bad == 1


def test_trees():
    assert ik4.strictify_tree("(-1 ({0} ({0})))", width=1) == "(-1 ({0}))"
    assert ik4.nicify_tree("(-1 ({0}) ({0}))", width=1) == "(-1 ({0}))"
    assert ik4.tree_equivalent("({0} ({0}))", "({0})", width=1)
    assert ik4.nlt_bound(1, 3) == 24
    assert ik4.nlt_bound(2, 5) == 5 * 2**160


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} smoke test(s) passed")


if __name__ == "__main__":
    main()
