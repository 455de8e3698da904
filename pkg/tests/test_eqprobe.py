import math

import pytest

from ppbass.bass import IndexedFamily, build_system, pure_free_truncation
from ppbass.chains import PpChain
from ppbass.eqprobe import (
    ClosedThrough,
    Distinguished,
    IndistinguishableOn,
    InfiniteEvidence,
    InvariantSignature,
    PpPair,
    StageValue,
    elem_equiv_probe,
    enumerate_pairs,
    index_product,
    lemma8_transfer_check,
    pair_index,
    pure_free_index,
)
from ppbass.errors import NotComparable, RingMismatch
from ppbass.exactalg import ZZ, IntegersMod
from ppbass.fpmod import FpModule, direct_sum, make_cyclic
from ppbass.ppcalc import PpFormula, divisibility, implies

PRUFER = "exists y (x = pow(2,i)*y ; pow(2,i+1)*y = 0)"

TWO_OVER_FOUR = PpPair(divisibility([[2]]), divisibility([[4]]))


def two_powers():
    return IndexedFamily(lambda i: make_cyclic(ZZ, [2 ** (i + 1)]), "2-powers")


def test_pairs_must_be_comparable():
    with pytest.raises(NotComparable):
        PpPair(divisibility([[4]]), divisibility([[2]]))
    with pytest.raises(RingMismatch):
        PpPair(PpFormula.top(ZZ), PpFormula.zero(IntegersMod(4)))


def test_pair_index():
    assert pair_index(TWO_OVER_FOUR, make_cyclic(ZZ, [8])) == 2
    assert pair_index(TWO_OVER_FOUR, FpModule.free(ZZ, 1)) == 2
    assert pair_index(PpPair(PpFormula.top(ZZ), PpFormula.zero(ZZ)), FpModule.free(ZZ, 1)) == math.inf
    with pytest.raises(RingMismatch):
        pair_index(TWO_OVER_FOUR, make_cyclic(IntegersMod(4), [2]))


def test_enumerated_pairs_are_deterministic_and_comparable():
    a = list(enumerate_pairs(ZZ, arity_max=2, count=40, seed=3))
    b = list(enumerate_pairs(ZZ, arity_max=2, count=40, seed=3))
    assert a == b and len(a) == 40
    assert all(implies(p.bottom, p.top) for p in a)
    assert all(p.top.bound <= 2 and p.bottom.bound <= 2 for p in a)
    assert str(a[0]) == "(x = x) / (exists y (x = 2*y))"
    assert list(enumerate_pairs(ZZ, count=0)) == []


def test_probe_distinguishes_cyclic_groups():
    pairs = list(enumerate_pairs(ZZ, count=50, seed=1))
    verdict = elem_equiv_probe(make_cyclic(ZZ, [2]), make_cyclic(ZZ, [4]), pairs)
    assert isinstance(verdict, Distinguished)
    assert verdict.pair == TWO_OVER_FOUR and (verdict.left, verdict.right) == (1, 2)


def test_probe_on_isomorphic_presentations():
    pairs = list(enumerate_pairs(ZZ, count=50, seed=1))
    m = FpModule(ZZ, 2, [(2, 0), (0, 3)])
    assert elem_equiv_probe(make_cyclic(ZZ, [6]), m, pairs) == IndistinguishableOn(50)
    assert elem_equiv_probe(m, m, pairs) == IndistinguishableOn(50)


def test_probe_rejects_mixed_rings():
    with pytest.raises(RingMismatch):
        elem_equiv_probe(make_cyclic(ZZ, [2]), make_cyclic(IntegersMod(4), [2]), [])


def test_pure_free_index():
    fam = two_powers()
    assert pure_free_index(TWO_OVER_FOUR, fam, 5) == InfiniteEvidence(1)
    # odd divisibility never opens in a 2-group
    assert pure_free_index(PpPair(PpFormula.top(ZZ), divisibility([[3]])), fam, 5) == ClosedThrough(5)
    assert pure_free_index(TWO_OVER_FOUR, [make_cyclic(ZZ, [2])]) == 1
    assert pure_free_index(TWO_OVER_FOUR, [make_cyclic(ZZ, [2]), make_cyclic(ZZ, [8])]) == math.inf
    with pytest.raises(ValueError):
        pure_free_index(TWO_OVER_FOUR, [])


def test_signatures_of_each_source():
    system = build_system(PpChain.from_template(PRUFER, ZZ), 4)
    assert InvariantSignature((system, 3)).value(TWO_OVER_FOUR) == StageValue(2, 3)
    trunc = pure_free_truncation([(make_cyclic(ZZ, [4]), 2)])
    assert InvariantSignature(trunc).value(TWO_OVER_FOUR) == 4
    assert InvariantSignature(two_powers()).value(TWO_OVER_FOUR) == InfiniteEvidence(1)
    with pytest.raises(TypeError):
        InvariantSignature("Z/4").value(TWO_OVER_FOUR)


def test_index_is_multiplicative_on_sums():
    pairs = list(enumerate_pairs(IntegersMod(12), count=30, seed=5))
    a, b = make_cyclic(IntegersMod(12), [4]), make_cyclic(IntegersMod(12), [6])
    s, _ = direct_sum(a, b)
    for p in pairs:
        assert pair_index(p, s) == index_product([pair_index(p, a), pair_index(p, b)])


def test_index_product():
    assert index_product([2, 3]) == 6
    assert index_product([2, math.inf]) == math.inf
    assert index_product([]) == 1


def test_transfer_check_on_the_prufer_system():
    system = build_system(PpChain.from_template(PRUFER, ZZ), 6)
    pairs = list(enumerate_pairs(ZZ, count=50, seed=1))
    report = lemma8_transfer_check(two_powers(), system, pairs, 6)
    assert report.passed and report.opened == 24 and len(report.entries) == 50


def test_transfer_check_reports_violations():
    system = build_system(PpChain.from_template(PRUFER, ZZ), 6)
    report = lemma8_transfer_check([make_cyclic(ZZ, [2])], system, [TWO_OVER_FOUR], 6)
    assert not report.passed
    (entry,) = report.violations
    assert (entry.stage, entry.stage_index, entry.member) == (1, 2, None)
