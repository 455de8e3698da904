import pytest

from ppbass.bass import (
    IndexedFamily,
    No,
    Unknown,
    Yes,
    build_system,
    colim_eq_upto,
    colimit_truncation,
    connector_matrices,
    ml_failure_report,
    pure_free_truncation,
    push,
    satisfies_upto,
)
from ppbass.chains import PpChain, StrictThrough
from ppbass.errors import ChainStabilized, ModuleMismatch, StageOutOfRange
from ppbass.exactalg import ZZ, IntegersMod, PolynomialsOverPrimeField
from ppbass.fpmod import make_cyclic
from ppbass.ppcalc import divisibility, freely_realizes

PRUFER = "exists y (x = pow(2,i)*y ; pow(2,i+1)*y = 0)"
TWO_POWERS = "exists y (x = pow(2,i)*y)"


@pytest.fixture(scope="module")
def prufer():
    return build_system(PpChain.from_template(PRUFER, ZZ), 5)


def test_prufer_stages_are_cyclic_of_growing_order(prufer):
    assert [s.module.invariant_factors for s in prufer.stages] == [(2,), (4,), (8,), (16,), (32,), (64,)]
    assert [s.tuple[0].coords for s in prufer.stages] == [(1,), (2,), (4,), (8,), (16,), (32,)]
    for i, stage in enumerate(prufer.stages):
        assert freely_realizes(stage, prufer.chain.formula(i))


def test_connectors_map_tuples_exactly(prufer):
    assert prufer.verify()
    assert len(connector_matrices(prufer)) == 5
    assert all(g.is_injective() for g in prufer.connectors)


def test_push_and_truncation(prufer):
    e = push(prufer.distinguished(0), 3)
    assert e.stage == 3 and e.value[0].coords == (8,)
    assert colimit_truncation(prufer, 4).order() == 32
    with pytest.raises(StageOutOfRange):
        push(e, 2)
    with pytest.raises(StageOutOfRange):
        prufer.distinguished(6)


def test_bounded_satisfaction(prufer):
    e = prufer.distinguished(0)
    assert satisfies_upto(e, divisibility([[8]]), 5) == Yes(3)
    assert satisfies_upto(e, divisibility([[64]]), 5) == Unknown()
    # odd divisibility holds immediately in a 2-group
    assert satisfies_upto(e, divisibility([[3]]), 5) == Yes(0)


def test_bounded_equality(prufer):
    base = prufer.distinguished(0)
    assert colim_eq_upto(base, prufer.distinguished(4), 4) == Yes(4)
    # connectors are injective, so distinct values stay distinct
    assert colim_eq_upto(base, prufer.element(0, [[0]]), 5) == No()
    twice = prufer.element(2, [[8]])
    assert colim_eq_upto(prufer.distinguished(2), twice, 5) == No()
    assert colim_eq_upto(prufer.distinguished(3), base, 2) == Unknown()


def test_elements_must_live_in_their_stage(prufer):
    other = make_cyclic(ZZ, [3])
    with pytest.raises(ModuleMismatch):
        prufer.element(0, [other.elem([1])])


def test_ml_failure_evidence(prufer):
    ev = ml_failure_report(prufer)
    assert ev.complete
    assert ev.equalities == tuple(Yes(i) for i in range(6))
    assert ev.strictness.verdict == StrictThrough(5)
    assert "not a proof" in ev.statement


def test_integer_system_is_free_of_rank_one():
    system = build_system(PpChain.from_template(TWO_POWERS, ZZ), 4)
    assert all(s.module.invariant_factors == (0,) for s in system.stages)
    assert satisfies_upto(system.distinguished(0), divisibility([[16]]), 4) == Yes(4)
    assert ml_failure_report(system).complete


def test_polynomial_system():
    R = PolynomialsOverPrimeField(2)
    system = build_system(PpChain.from_template("exists y (x = pow([x],i)*y)", R), 4)
    assert system.verify()
    assert ml_failure_report(system).complete


def test_stabilizing_chain_has_no_evidence():
    system = build_system(PpChain.from_template(TWO_POWERS, IntegersMod(8)), 5)
    with pytest.raises(ChainStabilized):
        ml_failure_report(system)
    with pytest.raises(ValueError):
        ml_failure_report(system, 1)


def test_pure_free_truncation():
    t = pure_free_truncation([(make_cyclic(ZZ, [2]), 2), (make_cyclic(ZZ, [4]), 1)])
    assert t.module.order() == 16 and len(t.injections) == 3
    assert pure_free_truncation([]).module.order() == 1
    with pytest.raises(ValueError):
        pure_free_truncation([(make_cyclic(ZZ, [2]), 0)])


def test_indexed_families(prufer):
    fam = IndexedFamily(lambda i: make_cyclic(ZZ, [2 ** (i + 1)]), "2-powers")
    assert [m.order() for m in fam.members(3)] == [2, 4, 8, 16]
    assert not fam.is_finite
    stages = IndexedFamily.of_system(prufer)
    assert stages.is_finite and len(stages.members(20)) == 6
    with pytest.raises(IndexError):
        stages[6]
