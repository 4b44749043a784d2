import random

import pytest

from nabla.corpus import entry_by_name, load_entry
from nabla.formulas import Always, Atom, Bottom, Hist, Implies
from nabla.gen import DerivationSampler
from nabla.kernel import (
    BAD_DISCHARGE,
    FRESHNESS_VIOLATION,
    SEQUENCE_MISMATCH,
    SHAPE_MISMATCH,
    UNKNOWN_RULE,
    Apply,
    Assume,
    Le,
    Lwff,
    MissingAnnotation,
    NonInjectiveRenaming,
    Succ,
    check,
    is_ltl_derivation,
    labels_of_derivation,
    normalize_generic,
    open_assumptions,
    rename_labels,
    renumber,
    subst_label,
)

P, Q = Atom("p"), Atom("q")


def test_subst_label_examples():
    assert subst_label(Lwff(("b", "c"), P), "c", "d") == Lwff(("b", "d"), P)
    assert subst_label(Le("b", "c"), "b", "d") == Le("d", "c")
    assert subst_label(Lwff(("b", "b"), P), "b", "d") == Lwff(("d", "d"), P)


def test_open_assumptions_basics():
    leaf = Assume(1, Lwff(("b",), P))
    assert open_assumptions(leaf) == frozenset({Lwff(("b",), P)})
    # impI discharging the leaf
    closed = Apply(2, "impI", Lwff(("b",), Implies(P, P)), (leaf,), (leaf,))
    assert open_assumptions(closed) == frozenset()
    # vacuous discharge keeps an unrelated leaf open
    other = Assume(3, Lwff(("b",), Q))
    vac = Assume(4, Lwff(("b",), P))
    node = Apply(5, "impI", Lwff(("b",), Implies(P, Q)), (other,), (vac,))
    assert open_assumptions(node) == frozenset({Lwff(("b",), Q)})
    assert check(node).accepted


def test_check_accepts_and_reports_conclusion():
    report = check(load_entry("A6"))
    assert report.accepted
    assert report.open_assumptions == frozenset()
    assert report.conclusion.seq == ("b",)


def test_check_is_deterministic():
    root = load_entry("A7L")
    r1, r2 = check(root), check(root)
    assert r1 == r2


def test_single_assumption_is_a_derivation():
    leaf = Assume(1, Lwff(("b", "c"), Hist(P)))
    report = check(leaf)
    assert report.accepted and report.conclusion == leaf.formula
    bad = Assume(1, Le("b", "c"))
    assert not check(bad).accepted


def test_kernel_rejects_until_in_judgments():
    from nabla.formulas import Until

    leaf = Assume(1, Lwff(("b",), Until(P, Q)))
    report = check(leaf)
    assert not report.accepted and report.reason == SHAPE_MISMATCH


def test_gi_freshness_constructed():
    # conclusion label reused as eigenlabel
    a = Assume(1, Lwff(("b", "b"), P))
    gi = Apply(2, "GI", Lwff(("b",), Always(P)), (a,))
    assert check(gi).reason == FRESHNESS_VIOLATION
    # eigenlabel occurring in a remaining open assumption
    imp = Assume(3, Lwff(("b", "c"), Implies(Q, P)))
    minor = Assume(4, Lwff(("b", "c"), Q))
    use = Apply(5, "impE", Lwff(("b", "c"), P), (imp, minor))
    gi2 = Apply(6, "GI", Lwff(("b",), Always(P)), (use,))
    assert check(gi2).reason == FRESHNESS_VIOLATION
    # with those assumptions discharged, the same introduction is fine
    closed = Apply(7, "impI", Lwff(("b", "c"), Implies(Q, P)), (use,), (minor, imp))
    assert check(closed).reason == BAD_DISCHARGE  # imp does not match the antecedent slot
    shed = Apply(8, "impI", Lwff(("b", "c"), Implies(Q, P)), (use,), (minor,))
    assert check(shed).accepted


def test_ge_shape_and_sequence():
    a = Assume(1, Lwff(("b",), Always(P)))
    r = Assume(2, Le("b", "c"))
    good = Apply(3, "GE", Lwff(("b", "c"), P), (a, r))
    assert check(good).accepted
    bad_seq = Apply(4, "GE", Lwff(("c", "b"), P), (a, r))
    assert check(bad_seq).reason == SEQUENCE_MISMATCH
    bad_rel = Apply(5, "GE", Lwff(("b", "c"), P), (a, Assume(6, Succ("b", "c"))))
    assert check(bad_rel).reason == SHAPE_MISMATCH


def test_histE_needs_interval_relations():
    a = Assume(1, Lwff(("b", "c"), Hist(P)))
    r1 = Assume(2, Le("b", "d"))
    r2 = Assume(3, Le("d", "c"))
    good = Apply(4, "histE", Lwff(("b", "d"), P), (a, r1, r2))
    assert check(good).accepted
    swapped = Apply(5, "histE", Lwff(("b", "d"), P), (a, r2, r1))
    assert check(swapped).reason == SHAPE_MISMATCH


def test_trans_chain_mismatch():
    d = Assume(1, Lwff(("b",), P))
    r1 = Assume(2, Le("x", "y"))
    r2 = Assume(3, Le("z", "w"))
    node = Apply(4, "transLe", Lwff(("b",), P), (r1, r2, d))
    assert check(node).reason == SHAPE_MISMATCH


def test_unknown_rule_and_double_discharge():
    leaf = Assume(1, Lwff(("b",), P))
    assert check(Apply(2, "mystery", Lwff(("b",), P), (leaf,))).reason == UNKNOWN_RULE
    h = Assume(3, Lwff(("b",), Q))
    inner = Apply(4, "impI", Lwff(("b",), Implies(Q, P)), (leaf,), (h,))
    outer = Apply(5, "impI", Lwff(("b",), Implies(Q, Implies(Q, P))), (inner,), (h,))
    assert check(outer).reason == BAD_DISCHARGE


def test_discharge_must_stay_in_hypothetical_premise():
    # the discharged class matches the slot formula but occurs as a
    # relational premise of the same node: not confined to the hypothetical
    d = Assume(1, Lwff(("b",), P))
    rxz = Assume(2, Le("x", "z"))
    rzz = Assume(3, Le("z", "z"))
    node = Apply(4, "transLe", Lwff(("b",), P), (rxz, rzz, d), (rxz,))
    assert check(node).reason == BAD_DISCHARGE


def test_rename_labels_properties():
    root = load_entry("A6")
    assert rename_labels(root, {}) is not None
    renamed = rename_labels(root, {"b": "b2"})
    report = check(renamed)
    assert report.accepted and report.conclusion.seq == ("b2",)
    with pytest.raises(NonInjectiveRenaming):
        rename_labels(root, {"b": "c"})


def test_rename_bijection_preserves_verdict_on_random_derivations():
    rng = random.Random(17)
    for i in range(25):
        d = DerivationSampler(random.Random(i)).sample(steps=5)
        labs = sorted(labels_of_derivation(d))
        shuffled = labs[:]
        rng.shuffle(shuffled)
        mapping = dict(zip(labs, (f"z{k}_{v}" for k, v in enumerate(shuffled))))
        renamed = rename_labels(d, mapping)
        assert check(renamed).accepted


def test_renumber_keeps_verdict():
    from nabla.kernel import all_nodes

    root = load_entry("A8")
    again = renumber(root)
    assert check(again).accepted
    ids = [n.id for n in all_nodes(again)]
    assert len(ids) == len(set(ids))


def test_is_ltl_derivation_paper_example():
    entry = entry_by_name("A6")
    root = load_entry("A6")
    concl = normalize_generic(check(root).conclusion)
    assert is_ltl_derivation(root, {concl: entry.source})


def test_is_ltl_derivation_accepts_shared_label_with_annotations():
    imp = Assume(1, Lwff(("b",), Implies(P, P)))
    minor = Assume(2, Lwff(("b",), P))
    node = Apply(3, "impE", Lwff(("b",), P), (imp, minor))
    assert check(node).accepted
    sources = {
        normalize_generic(Lwff(("b",), P)): P,
        normalize_generic(Lwff(("b",), Implies(P, P))): Implies(P, P),
    }
    assert is_ltl_derivation(node, sources)


def test_is_ltl_derivation_rejects_mixed_labels():
    leaf = Assume(1, Lwff(("c",), Bottom()))
    two_labels = Apply(2, "botE", Lwff(("b",), P), (leaf,))
    # open assumption c : bot, conclusion b : p
    assert check(two_labels).accepted
    sources = {
        normalize_generic(Lwff(("c",), Bottom())): Bottom(),
        normalize_generic(Lwff(("b",), P)): P,
    }
    assert not is_ltl_derivation(two_labels, sources)


def test_is_ltl_derivation_rejects_open_rwff():
    a = Assume(1, Lwff(("b",), Always(P)))
    r = Assume(2, Le("b", "b"))
    ge = Apply(3, "GE", Lwff(("b", "b"), P), (a, r))
    last = Apply(4, "last", Lwff(("b",), P), (ge,))
    assert check(last).accepted
    sources = {
        normalize_generic(Lwff(("b",), P)): P,
        normalize_generic(Lwff(("b",), Always(P))): Always(P),
    }
    assert not is_ltl_derivation(last, sources)


def test_is_ltl_derivation_missing_annotation():
    leaf = Assume(1, Lwff(("b",), P))
    with pytest.raises(MissingAnnotation):
        is_ltl_derivation(leaf, {})


def test_structural_audit_on_corpus():
    # every discharged class of every accepted corpus proof sits inside the
    # discharging node's own premise subtree (check() enforces this; here we
    # just re-run it over all entries)
    for name in ("A2", "A3", "A4", "A5", "A6", "A7L", "A7R", "A8"):
        assert check(load_entry(name)).accepted


def test_vacuous_and_multiple_discharge():
    h1 = Assume(1, Lwff(("b",), P))
    h2 = Assume(2, Lwff(("b",), P))
    imp = Assume(3, Lwff(("b",), Implies(P, Implies(P, Q))))
    n1 = Apply(4, "impE", Lwff(("b",), Implies(P, Q)), (imp, h1))
    n2 = Apply(5, "impE", Lwff(("b",), Q), (n1, h2))
    both = Apply(6, "impI", Lwff(("b",), Implies(P, Q)), (n2,), (h1, h2))
    report = check(both)
    assert report.accepted
    assert normalize_generic(Lwff(("b",), P)) not in report.open_assumptions


def test_botE_crosses_sequences_and_discharges_negation():
    neg = Assume(1, Lwff(("b",), Implies(P, Bottom())))
    pos = Assume(2, Lwff(("b",), P))
    falsum = Apply(3, "impE", Lwff(("b",), Bottom()), (neg, pos))
    out = Apply(4, "botE", Lwff(("c", "d"), Q), (falsum,))
    assert check(out).accepted  # vacuous reductio, arbitrary target sequence
    # discharging the matching negated-conclusion class
    neg2 = Assume(5, Lwff(("c", "d"), Implies(Q, Bottom())))
    use = Apply(6, "impE", Lwff(("c", "d"), Bottom()), (Assume(7, Lwff(("c", "d"), Implies(Q, Bottom()))), Assume(8, Lwff(("c", "d"), Q))))
    closed = Apply(9, "botE", Lwff(("c", "d"), Q), (use,), (neg2,))
    assert check(closed).accepted  # vacuous for neg2 (it has no occurrence)
    bad = Apply(10, "botE", Lwff(("c",), Q), (pos,))
    assert check(bad).reason == SHAPE_MISMATCH  # premise must prove bot


def test_serS_accepts_and_requires_one_pair():
    d = Assume(1, Lwff(("b",), P))
    s1 = Assume(2, Succ("x", "y"))
    s2 = Assume(3, Succ("x", "z"))
    base1 = Apply(4, "baseLe", Lwff(("b",), P), (s1, d), ())
    node = Apply(5, "serS", Lwff(("b",), P), (base1,), (s1,))
    assert check(node).accepted
    mixed_base = Apply(6, "baseLe", Lwff(("b",), P), (s2, base1), ())
    mixed = Apply(7, "serS", Lwff(("b",), P), (mixed_base,), (s1, s2))
    assert check(mixed).reason == BAD_DISCHARGE


def test_linS_subst_annotation_must_match():
    r1 = Assume(1, Succ("b", "c"))
    r2 = Assume(2, Succ("b", "d"))
    phi = Assume(3, Lwff(("b", "c"), P))
    hyp = Assume(4, Lwff(("b", "d"), P))
    good = Apply(5, "linS", Lwff(("b", "d"), P), (r1, r2, phi, hyp), (hyp,), ("c", "d"))
    assert check(good).accepted
    bad = Apply(6, "linS", Lwff(("b", "d"), P), (r1, r2, phi, hyp), (hyp,), ("d", "c"))
    assert check(bad).reason == SHAPE_MISMATCH
    loose = Apply(7, "linS", Lwff(("b", "d"), P), (r1, r2, phi, hyp), (hyp,))
    assert check(loose).accepted  # annotation is optional; premises fix the roles


def test_linS_rwff_phi_premise():
    r1 = Assume(1, Succ("b", "c"))
    r2 = Assume(2, Succ("b", "d"))
    phi = Assume(3, Le("c", "e"))
    hyp_leaf = Assume(4, Le("d", "e"))
    d = Assume(5, Lwff(("b",), Always(P)))
    use = Apply(6, "GE", Lwff(("b", "e"), P), (d, Assume(7, Le("b", "e"))))
    node = Apply(8, "linS", Lwff(("b", "e"), P), (r1, r2, phi, use), (hyp_leaf,), ("c", "d"))
    # discharged class le(d,e) = phi[d/c]; it has no occurrence (vacuous)
    assert check(node).accepted


def test_reflLe_rejects_mixed_or_irreflexive():
    d = Assume(1, Lwff(("b",), P))
    r = Assume(2, Le("x", "y"))
    node = Apply(3, "reflLe", Lwff(("b",), P), (d,), (r,))
    assert check(node).reason == BAD_DISCHARGE


def test_eqLe_moves_the_last_label():
    base = Assume(1, Lwff(("a", "b"), P))
    r1 = Assume(2, Le("b", "c"))
    r2 = Assume(3, Le("c", "b"))
    node = Apply(4, "eqLe", Lwff(("a", "c"), P), (r1, r2, base))
    assert check(node).accepted
    swapped = Apply(5, "eqLe", Lwff(("a", "c"), P), (r2, r1, base))
    assert check(swapped).reason == SHAPE_MISMATCH
    moved_prefix = Apply(6, "eqLe", Lwff(("c", "b"), P), (r1, r2, base))
    assert check(moved_prefix).reason == SEQUENCE_MISMATCH


def test_splitLe_small_instance():
    # from le(x,y) and the trivial case analyses conclude b : p
    r1 = Assume(1, Le("x", "y"))
    phi = Assume(2, Lwff(("b",), P))
    eq_case = Assume(3, Lwff(("b",), P))
    lt1 = Assume(4, Succ("x", "w"))
    lt2 = Assume(5, Le("w", "y"))
    lt_case = Assume(6, Lwff(("b",), P))
    node = Apply(
        7,
        "splitLe",
        Lwff(("b",), P),
        (r1, phi, eq_case, lt_case),
        (lt1, lt2),
        ("x", "y"),
    )
    # discharged strict-case relations are vacuous; w is fresh
    assert check(node).accepted
    clash = Apply(
        8,
        "splitLe",
        Lwff(("b",), P),
        (r1, phi, eq_case, lt_case),
        (Assume(9, Succ("x", "x")),),
        ("x", "y"),
    )
    assert check(clash).reason == FRESHNESS_VIOLATION


def test_ind_fresh_step_label_cannot_leak():
    base = Assume(1, Lwff(("a", "b0"), P))
    rel = Assume(2, Le("b0", "b"))
    leaky = Assume(3, Lwff(("a", "bj"), P))
    node = Apply(4, "ind", Lwff(("a", "b"), P), (base, rel, leaky), ())
    assert check(node).reason == FRESHNESS_VIOLATION


def _bj_step():
    # derives a bj : p without open assumptions naming bj
    neg = Assume(11, Lwff(("x",), Implies(P, Bottom())))
    pos = Assume(12, Lwff(("x",), P))
    falsum = Apply(13, "impE", Lwff(("x",), Bottom()), (neg, pos))
    return Apply(14, "botE", Lwff(("a", "bj"), P), (falsum,))


def test_ind_shape_rejections():
    base = Assume(1, Lwff(("a", "b0"), P))
    rel = Assume(2, Le("b0", "b"))
    hyp = _bj_step()
    good = Apply(4, "ind", Lwff(("a", "b"), P), (base, rel, hyp), ())
    assert check(good).accepted  # vacuous induction: step ignores the IH
    wrong_rel = Apply(5, "ind", Lwff(("a", "b"), P), (base, Assume(6, Le("b", "b0")), hyp), ())
    assert check(wrong_rel).reason == SHAPE_MISMATCH
    wrong_base = Apply(7, "ind", Lwff(("c", "b0"), P), (base, rel, hyp), ())
    assert check(wrong_base).reason == SEQUENCE_MISMATCH
    mixed_bi = Apply(
        8,
        "ind",
        Lwff(("a", "b"), P),
        (base, rel, hyp),
        (Assume(9, Le("b0", "u1")), Assume(10, Succ("u2", "bj"))),
    )
    assert check(mixed_bi).reason == BAD_DISCHARGE
