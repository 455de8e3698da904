import pytest

from ppbass.errors import ModuleMismatch, NotInjective, NotWellDefined, TooLarge
from ppbass.exactalg import INFINITE, ZZ, IntegersMod, Mat, Poly, PolynomialsOverPrimeField
from ppbass.fpmod import (
    FpModule,
    ModMorphism,
    Rejected,
    check_welldefined,
    direct_power,
    direct_sum,
    enumerate_elements,
    is_pure_embedding,
    make_cyclic,
)


def test_cyclic_modules_and_orders():
    assert make_cyclic(ZZ, [4]).order() == 4
    assert make_cyclic(ZZ, []).order() == INFINITE
    assert make_cyclic(ZZ, [4, 6]).order() == 2
    assert FpModule.zero_module(ZZ).order() == 1
    assert make_cyclic(IntegersMod(12), [8]).order() == 4


def test_invariant_factors_of_a_sum():
    m = FpModule(ZZ, 2, [(2, 0), (0, 3)])
    assert m.invariant_factors == (6,)
    assert m.is_isomorphic(make_cyclic(ZZ, [6]))
    assert not m.is_isomorphic(make_cyclic(ZZ, [3]))


def test_polynomial_module_order():
    R = PolynomialsOverPrimeField(2)
    x = Poly.monomial(1, 2)
    assert make_cyclic(R, [x**3]).order() == 8


def test_elements_are_normalized():
    m = make_cyclic(ZZ, [4])
    assert m.elem([5]) == m.elem([1])
    assert m.elem([4]).is_zero()
    assert m.elem([1]) + m.elem([3]) == m.zero()


def test_elements_of_different_modules_do_not_mix():
    with pytest.raises(ModuleMismatch):
        make_cyclic(ZZ, [4]).elem([1]) + make_cyclic(ZZ, [2]).elem([1])


def test_enumerate_elements():
    m = FpModule(ZZ, 2, [(2, 0), (0, 3)])
    elems = list(enumerate_elements(m))
    assert len(elems) == 6 and len(set(elems)) == 6
    with pytest.raises(TooLarge):
        list(enumerate_elements(make_cyclic(ZZ, [])))


def test_direct_sum_and_power():
    s, inj = direct_sum(make_cyclic(ZZ, [2]), make_cyclic(ZZ, [4]))
    assert s.order() == 8
    assert inj[1](make_cyclic(ZZ, [4]).elem([1])) == s.elem([0, 1])
    assert direct_power(make_cyclic(ZZ, [3]), 3).order() == 27


def test_morphism_well_definedness():
    src, tgt = make_cyclic(ZZ, [2]), make_cyclic(ZZ, [4])
    f = ModMorphism(src, tgt, Mat.from_rows([[2]]))
    assert f(src.elem([1])) == tgt.elem([2])
    with pytest.raises(NotWellDefined):
        ModMorphism(src, tgt, Mat.from_rows([[1]]))
    rej = check_welldefined(src, tgt, Mat.from_rows([[1]]))
    assert isinstance(rej, Rejected) and rej.relation == (2,)


def test_injectivity():
    src, tgt = make_cyclic(ZZ, [2]), make_cyclic(ZZ, [4])
    assert ModMorphism(src, tgt, Mat.from_rows([[2]])).is_injective()
    assert not ModMorphism(make_cyclic(ZZ, [4]), src, Mat.from_rows([[1]])).is_injective()


def test_purity():
    z = FpModule.free(ZZ, 1)
    for m in (2, 3, 5):
        assert not is_pure_embedding(ModMorphism(z, z, Mat.from_rows([[m]])))
    assert not is_pure_embedding(ModMorphism(make_cyclic(ZZ, [2]), make_cyclic(ZZ, [4]), Mat.from_rows([[2]])))
    s, inj = direct_sum(make_cyclic(ZZ, [4]), make_cyclic(ZZ, [2]))
    assert is_pure_embedding(inj[0]) and is_pure_embedding(inj[1])


def test_purity_requires_injectivity():
    with pytest.raises(NotInjective):
        is_pure_embedding(ModMorphism(make_cyclic(ZZ, [4]), make_cyclic(ZZ, [2]), Mat.from_rows([[1]])))


def test_json_round_trip():
    m = FpModule(IntegersMod(12), 2, [(2, 4), (0, 6)])
    assert FpModule.from_json(m.to_json()) == m
    R = PolynomialsOverPrimeField(3)
    p = make_cyclic(R, [Poly([1, 0, 1], 3)])
    assert FpModule.from_json(p.to_json()) == p
