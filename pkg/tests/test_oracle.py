import pytest

from ppbass.errors import RingNotFinite, TooLarge
from ppbass.exactalg import ZZ, IntegersMod, PrimeField
from ppbass.fpmod import FpModule, make_cyclic
from ppbass.oracle import (
    brute_free_realization,
    evaluate_brute,
    finite_module,
    implies_brute,
    index_brute,
    module_order_brute,
)
from ppbass.ppcalc import PpFormula, annihilator, cypr_formula, divisibility


def test_module_orders():
    R = IntegersMod(12)
    m = FpModule(R, 2, [(2, 4), (0, 6)])
    # 6*(2,4) - 4*(0,6) = (12,0), so the relations already contain 12 Z^2
    assert module_order_brute(m) == 12 == m.order()
    assert module_order_brute(make_cyclic(R, [8])) == 4
    assert module_order_brute(FpModule.free(PrimeField(3), 3)) == 27


def test_coset_labels_follow_representatives():
    fm = finite_module(make_cyclic(IntegersMod(8), [4]))
    assert fm.order == 4
    assert fm.coords(fm.elem([5])) == (1,)
    assert fm.elem([0]) == 0


def test_evaluate_brute_small_cases():
    R = IntegersMod(4)
    m = FpModule.free(R, 1)
    assert sorted(evaluate_brute(divisibility([[2]], R), m).tuples()) == [(0,), (2,)]
    assert len(evaluate_brute(PpFormula.top(R, 2), m)) == 16
    assert evaluate_brute(annihilator(2, R), m).is_subgroup()


def test_implies_brute():
    R = IntegersMod(8)
    assert implies_brute(divisibility([[4]], R), divisibility([[2]], R))
    assert not implies_brute(divisibility([[2]], R), divisibility([[4]], R))
    assert implies_brute(cypr_formula([2], 2, R), annihilator(4, R))


def test_brute_free_realization_order():
    R = IntegersMod(8)
    fm, tup = brute_free_realization(cypr_formula([2], 4, R))
    assert fm.order == 4 and len(tup) == 1


def test_index_brute():
    R = IntegersMod(8)
    m = FpModule.free(R, 1)
    assert index_brute((PpFormula.top(R), divisibility([[2]], R)), m) == 2
    assert index_brute((PpFormula.top(R), PpFormula.zero(R)), m) == 8


def test_oracle_refuses_infinite_rings_and_huge_modules():
    with pytest.raises(RingNotFinite):
        finite_module(make_cyclic(ZZ, [4]))
    with pytest.raises(TooLarge):
        finite_module(FpModule.free(IntegersMod(12), 7))
