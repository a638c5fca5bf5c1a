"""Normality orders: comparison, derivation, explicit relations, behaviors."""

import itertools
import random

import pytest

from actualcause import (
    NormalityError,
    Relation,
    TrivialOrder,
    TypicalitySpec,
    ValueRanking,
    assign_behavior,
    compare,
    derive_from_typicality,
    explicit_order,
)
from actualcause.normality import world_marks

from conftest import random_model, random_typicality


def world_of(model, **values):
    return model.world(values)


# -- compare ---------------------------------------------------------------------


def test_compare_is_reflexive(documents):
    doc = documents["bogus_prevention.scm.txt"]
    order = doc.normality_order()
    w = world_of(doc.model, A=0, B=1, VS=1)
    assert compare(order, w, w) is Relation.EQUALLY_NORMAL


def test_bogus_prevention_worlds_incomparable(documents):
    doc = documents["bogus_prevention.scm.txt"]
    order = doc.normality_order()
    actual = world_of(doc.model, A=0, B=1, VS=1)
    witness = world_of(doc.model, A=1, B=0, VS=0)
    assert compare(order, actual, witness) is Relation.INCOMPARABLE


def test_omission_default_chain(documents):
    doc = documents["omission_a.scm.txt"]
    order = doc.normality_order()
    quiet = world_of(doc.model, H=0, W=0, D=0)
    actual = world_of(doc.model, H=1, W=0, D=1)
    watered = world_of(doc.model, H=1, W=1, D=0)
    assert compare(order, quiet, actual) is Relation.MORE_NORMAL
    assert compare(order, actual, watered) is Relation.MORE_NORMAL
    assert compare(order, quiet, watered) is Relation.MORE_NORMAL


def test_compare_rejects_foreign_worlds(documents):
    bogus = documents["bogus_prevention.scm.txt"]
    pens = documents["office_pens.scm.txt"]
    order = bogus.normality_order()
    with pytest.raises(NormalityError):
        order.compare(
            world_of(bogus.model, A=0, B=1, VS=1),
            world_of(pens.model, PT=1, AT=1, PO=1),
        )


# -- derived orders ----------------------------------------------------------------


def test_background_conditions_ordering(documents):
    doc = documents["background_conditions.scm.txt"]
    order = doc.normality_order()
    no_match = world_of(doc.model, M=0, O=1, F=0)
    actual = world_of(doc.model, M=1, O=1, F=1)
    no_oxygen = world_of(doc.model, M=1, O=0, F=0)
    assert order.admits(no_match, actual)
    assert compare(order, actual, no_oxygen) is Relation.MORE_NORMAL


def test_legal_severity_orders_witnesses(documents):
    doc = documents["legal_fire.scm.txt"]
    order = doc.normality_order()
    careless_only = world_of(doc.model, BM=0, BC=1, BT=1, AN=0, AS=0, F=0)
    negligent_only = world_of(doc.model, BM=0, BC=0, BT=0, AN=1, AS=1, F=0)
    # A lone careless mark outranks a lone negligence mark.
    assert compare(order, careless_only, negligent_only) is Relation.MORE_NORMAL


def test_mechanism_mode_short_circuit_incomparable(documents):
    doc = documents["short_circuit.scm.txt"]
    order = doc.normality_order()
    witness = world_of(doc.model, A=0, P=1, VS=0)
    actual = world_of(doc.model, A=1, P=1, VS=1)
    assert compare(order, witness, actual) is Relation.INCOMPARABLE


def test_same_variable_deeper_rank_is_less_normal(documents):
    doc = documents["short_circuit_intentions.scm.txt"]
    order = doc.normality_order()
    deceitful = world_of(doc.model, A=1, I=1, P=1, VS=1)
    murderous = world_of(doc.model, A=1, I=2, P=1, VS=1)
    assert compare(order, deceitful, murderous) is Relation.MORE_NORMAL


def test_dominance_soundness_random(documents):
    # A strict sub-multiset of marks means strictly more normal.
    rng = random.Random(7)
    for _ in range(40):
        model = random_model(rng)
        spec = random_typicality(rng, model)
        order = derive_from_typicality(model, spec)
        worlds = [
            model.world(dict(zip(model.endogenous, values)))
            for values in itertools.product(
                *(model.range_of(n) for n in model.endogenous)
            )
        ]
        for s in worlds:
            for s2 in worlds:
                marks = world_marks(model, spec, s)
                marks2 = world_marks(model, spec, s2)
                if _submultiset(marks, marks2) and len(marks) < len(marks2):
                    assert compare(order, s, s2) is Relation.MORE_NORMAL
                if sorted(marks) == sorted(marks2):
                    assert compare(order, s, s2) is Relation.EQUALLY_NORMAL


def _submultiset(small, big):
    pool = list(big)
    for item in small:
        if item in pool:
            pool.remove(item)
        else:
            return False
    return True


def test_two_sided_difference_without_severity_is_incomparable():
    rng = random.Random(11)
    for _ in range(40):
        model = random_model(rng)
        spec = TypicalitySpec(
            value_rankings=tuple(
                ValueRanking(n, (0, 1)) for n in model.endogenous
            ),
        )
        order = derive_from_typicality(model, spec)
        worlds = [
            model.world(dict(zip(model.endogenous, values)))
            for values in itertools.product((0, 1), repeat=len(model.endogenous))
        ]
        for s in worlds:
            for s2 in worlds:
                s_extra = [n for n in model.endogenous if s[n] == 1 and s2[n] == 0]
                s2_extra = [n for n in model.endogenous if s2[n] == 1 and s[n] == 0]
                if s_extra and s2_extra:
                    assert compare(order, s, s2) is Relation.INCOMPARABLE


def test_spec_validation_errors(documents):
    model = documents["bogus_prevention.scm.txt"].model
    with pytest.raises(NormalityError):
        derive_from_typicality(model, TypicalitySpec(
            value_rankings=(ValueRanking("NOPE", (0, 1)),)))
    with pytest.raises(NormalityError):
        derive_from_typicality(model, TypicalitySpec(
            value_rankings=(ValueRanking("A", (0,)),)))
    with pytest.raises(NormalityError):
        derive_from_typicality(model, TypicalitySpec(
            value_rankings=(ValueRanking("A", (0, 1)),),
            severity_chains=((("A", 0), ("A", 1)),),  # 0 is the typical value
        ))


def test_renaming_invariance(documents):
    # Renaming variables consistently in model, spec, and worlds preserves
    # every comparison.
    rng = random.Random(23)
    from actualcause import CausalModel, Equation, Variable

    for _ in range(10):
        model = random_model(rng)
        spec = random_typicality(rng, model)
        order = derive_from_typicality(model, spec)
        mapping = {n: f"R_{n}" for n in (model.exogenous + model.endogenous)}
        renamed_model = CausalModel(
            [Variable(mapping[v.name], v.kind, v.range) for v in model.variables],
            [Equation(mapping[t], _rename_expr(eq.body, mapping))
             for t, eq in model.equations.items()],
        )
        renamed_spec = TypicalitySpec(
            value_rankings=tuple(
                ValueRanking(mapping[r.variable], r.ranking)
                for r in spec.value_rankings
            ),
            severity_chains=tuple(
                tuple((mapping[n], v) for n, v in chain)
                for chain in spec.severity_chains
            ),
        )
        renamed_order = derive_from_typicality(renamed_model, renamed_spec)
        worlds = list(itertools.product((0, 1), repeat=len(model.endogenous)))
        for a, b in itertools.product(worlds[:8], repeat=2):
            w1 = model.world(dict(zip(model.endogenous, a)))
            w2 = model.world(dict(zip(model.endogenous, b)))
            r1 = renamed_model.world(dict(zip(renamed_model.endogenous, a)))
            r2 = renamed_model.world(dict(zip(renamed_model.endogenous, b)))
            assert compare(order, w1, w2) == compare(renamed_order, r1, r2)


def _rename_expr(expr, mapping):
    from actualcause import BinOp, Const, Ite, Ref, Table

    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Ref):
        return Ref(mapping[expr.name])
    if isinstance(expr, BinOp):
        return BinOp(expr.op, _rename_expr(expr.left, mapping),
                     _rename_expr(expr.right, mapping))
    if isinstance(expr, Ite):
        return Ite(_rename_expr(expr.left, mapping),
                   _rename_expr(expr.right, mapping),
                   _rename_expr(expr.then, mapping),
                   _rename_expr(expr.other, mapping))
    if isinstance(expr, Table):
        return Table(tuple(mapping[a] for a in expr.args), expr.rows)
    raise TypeError(expr)


# -- explicit orders -----------------------------------------------------------------


def test_explicit_omission_chain_reproduces_verdicts(documents):
    doc = documents["omission_a.scm.txt"]
    model = doc.model
    quiet = {"H": 0, "W": 0, "D": 0}
    actual = {"H": 1, "W": 0, "D": 1}
    watered = {"H": 1, "W": 1, "D": 0}
    order = explicit_order(model, [
        (quiet, ">", actual), (actual, ">", watered),
    ])
    assert compare(order, model.world(quiet), model.world(actual)) \
        is Relation.MORE_NORMAL
    assert compare(order, model.world(actual), model.world(watered)) \
        is Relation.MORE_NORMAL
    assert compare(order, model.world(quiet), model.world(watered)) \
        is Relation.MORE_NORMAL


def test_explicit_transitivity(documents):
    model = documents["omission_a.scm.txt"].model
    a = {"H": 0, "W": 0, "D": 0}
    b = {"H": 0, "W": 1, "D": 0}
    c = {"H": 1, "W": 1, "D": 0}
    order = explicit_order(model, [(a, ">", b), (b, ">", c)])
    assert compare(order, model.world(a), model.world(c)) is Relation.MORE_NORMAL


def test_explicit_strictness_violation(documents):
    model = documents["omission_a.scm.txt"].model
    a = {"H": 0, "W": 0, "D": 0}
    b = {"H": 1, "W": 1, "D": 0}
    with pytest.raises(NormalityError):
        explicit_order(model, [(a, ">", b), (b, ">", a)])


def test_explicit_equivalence_combines_with_strict(documents):
    model = documents["omission_a.scm.txt"].model
    a = {"H": 0, "W": 0, "D": 0}
    b = {"H": 1, "W": 1, "D": 0}
    c = {"H": 1, "W": 0, "D": 1}
    order = explicit_order(model, [(a, "==", b), (b, ">", c)])
    assert compare(order, model.world(a), model.world(b)) \
        is Relation.EQUALLY_NORMAL
    assert compare(order, model.world(a), model.world(c)) is Relation.MORE_NORMAL


def test_unmentioned_worlds_are_incomparable(documents):
    model = documents["omission_a.scm.txt"].model
    a = {"H": 0, "W": 0, "D": 0}
    b = {"H": 1, "W": 1, "D": 0}
    order = explicit_order(model, [(a, ">", b)])
    stray = model.world({"H": 0, "W": 1, "D": 1})
    assert compare(order, stray, model.world(a)) is Relation.INCOMPARABLE
    assert compare(order, stray, stray) is Relation.EQUALLY_NORMAL


# -- behavior assignment ----------------------------------------------------------------


def test_assign_behavior_actual_short_circuit_world(documents):
    doc = documents["short_circuit.scm.txt"]
    labels = assign_behavior(doc.model, doc.typicality,
                             world_of(doc.model, A=1, P=1, VS=1))
    assert labels == {"P": "mirrors antidote"}


def test_assign_behavior_unprompted_poisoning(documents):
    doc = documents["short_circuit.scm.txt"]
    labels = assign_behavior(doc.model, doc.typicality,
                             world_of(doc.model, A=0, P=1, VS=0))
    assert labels == {"P": "poison regardless"}


def test_assign_behavior_prefers_most_typical(documents):
    # Both "no poison" and "mirrors antidote" fit; the more typical one wins.
    doc = documents["short_circuit.scm.txt"]
    labels = assign_behavior(doc.model, doc.typicality,
                             world_of(doc.model, A=0, P=0, VS=1))
    assert labels == {"P": "no poison"}


def test_assign_behavior_requires_mechanism(documents):
    doc = documents["bogus_prevention.scm.txt"]
    with pytest.raises(NormalityError):
        assign_behavior(doc.model, doc.typicality,
                        world_of(doc.model, A=0, B=1, VS=1))


def test_no_consistent_behavior_is_an_error(documents):
    doc = documents["short_circuit.scm.txt"]
    from actualcause import Behavior, BehaviorRanking, Const

    narrow = TypicalitySpec(
        mechanism=True,
        behavior_rankings=(BehaviorRanking("P", (Behavior("zero", Const(0)),)),),
    )
    with pytest.raises(NormalityError):
        assign_behavior(doc.model, narrow, world_of(doc.model, A=0, P=1, VS=0))


# -- preorder axioms ------------------------------------------------------------------


def _fixture_orders(documents):
    for name, doc in documents.items():
        if doc.has_normality():
            yield name, doc


def test_preorder_axioms_on_fixture_orders(documents):
    rng = random.Random(5)
    for name, doc in _fixture_orders(documents):
        model = doc.model
        order = doc.normality_order()
        spaces = [model.range_of(n) for n in model.endogenous]
        worlds = [
            model.world(dict(zip(model.endogenous, values)))
            for values in itertools.product(*spaces)
        ]
        for w in worlds:
            assert order.at_least_as_normal(w, w), name
        if len(worlds) <= 16:
            triples = itertools.product(worlds, repeat=3)
        else:
            triples = (tuple(rng.choice(worlds) for _ in range(3))
                       for _ in range(3000))
        for a, b, c in triples:
            if order.at_least_as_normal(a, b) and order.at_least_as_normal(b, c):
                assert order.at_least_as_normal(a, c), name


def test_trivial_order_equates_everything(documents):
    doc = documents["poisoning.scm.txt"]
    order = TrivialOrder(doc.model)
    w1 = world_of(doc.model, A=1, R=1, B=0, D=1)
    w2 = world_of(doc.model, A=0, R=0, B=0, D=0)
    assert compare(order, w1, w2) is Relation.EQUALLY_NORMAL
