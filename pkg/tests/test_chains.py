import pytest

from ppbass.chains import (
    EqualSubgroups,
    EquivalentStep,
    PpChain,
    StabilizesAt,
    StrictStep,
    StrictThrough,
    ideal_chains_of,
    lattice_strictness,
    materialize,
    ordered_stabilization_equivalence,
    perfect_probe,
    principal_ideal_chain,
    split_kernel_projection,
    stabilizes_in,
    transfer_witness,
)
from ppbass.errors import NotDescending, NotDescendingIdeals, Stabilized, StageOutOfRange
from ppbass.exactalg import ZZ, IntegersMod, PolynomialsOverPrimeField
from ppbass.fpmod import FpModule, make_cyclic
from ppbass.ppcalc import PpFormula, divisibility, equivalent, satisfies

BINARY = "exists z (x = y ; x = pow(2,i)*z)"


def two_power_chain(ring=ZZ):
    return PpChain.from_template("exists y (x = pow(2,i)*y)", ring)


def test_materialize_checks_descent():
    chain = materialize(two_power_chain(), 5)
    assert len(chain.materialized) == 6
    assert chain.prefix(2)[2] == divisibility([[4]])
    with pytest.raises(StageOutOfRange):
        chain.prefix(6)


def test_ascending_chain_is_rejected_with_a_witness():
    up = PpChain.from_list([divisibility([[4]]), divisibility([[2]])])
    with pytest.raises(NotDescending) as info:
        materialize(up, 1)
    exc = info.value
    assert exc.index == 0
    # the witness satisfies the later formula but not the earlier one
    assert satisfies(exc.witness, divisibility([[2]])) is not None
    assert satisfies(exc.witness, divisibility([[4]])) is None


def test_lattice_strictness_over_integers():
    report = lattice_strictness(two_power_chain(), 12)
    assert report.verdict == StrictThrough(12)
    assert report.strict_steps == list(range(12))
    assert all(isinstance(c, StrictStep) for c in report.certificates)
    assert report.verify()


def test_lattice_strictness_over_z8():
    report = lattice_strictness(two_power_chain(IntegersMod(8)), 6)
    assert report.verdict == StabilizesAt(3)
    assert isinstance(report.certificates[4], EquivalentStep)
    assert report.verify()


def test_stabilizes_in_modules():
    chain = two_power_chain()
    r8 = stabilizes_in(chain, make_cyclic(ZZ, [8]), 6)
    assert r8.verdict == StabilizesAt(3)
    assert isinstance(r8.certificates[3], EqualSubgroups)
    assert [w[0].coords for w in r8.witnesses.values()] == [(1,), (2,), (4,)]
    assert stabilizes_in(chain, make_cyclic(ZZ, [9]), 4).verdict == StabilizesAt(0)
    assert stabilizes_in(chain, FpModule.zero_module(ZZ), 4).verdict == StabilizesAt(0)
    assert stabilizes_in(chain, FpModule.free(ZZ, 1), 5).verdict == StrictThrough(5)


def test_binary_chain_and_its_split():
    chain = PpChain.from_template(BINARY, ZZ)
    assert chain.arity == 2
    kern, proj = split_kernel_projection(chain, [0], 4)
    assert equivalent(kern.formula(2), PpFormula.zero(ZZ))
    assert lattice_strictness(proj, 4).verdict == StrictThrough(4)
    cmp = ordered_stabilization_equivalence(chain, make_cyclic(ZZ, [8]), 5)
    assert cmp.holds and cmp.chain_report.stabilizes


def test_principal_ideal_chains():
    chain = principal_ideal_chain(lambda i: 2**i, ZZ, 5)
    assert lattice_strictness(chain, 5).verdict == StrictThrough(5)
    with pytest.raises(NotDescendingIdeals):
        principal_ideal_chain([4, 2], ZZ)


def test_perfect_probe_finite():
    rep = perfect_probe(IntegersMod(24))
    assert rep.exhaustive and rep.all_stabilize
    assert rep.step_limit == 8 and rep.max_strict_steps <= 8
    assert rep.message == "all principal-ideal chains stabilize; steps ≤ 8 (divisor count)"


def test_perfect_probe_infinite():
    assert perfect_probe(ZZ, 32).evidence.verdict == StrictThrough(32)
    assert perfect_probe(PolynomialsOverPrimeField(2), 6).evidence.verdict == StrictThrough(6)


def test_ideal_chain_enumeration():
    chains = list(ideal_chains_of(4, 2))
    assert (1, 2, 4) in chains and (1, 1, 1) in chains
    assert all(all(b % a == 0 for a, b in zip(c, c[1:])) for c in chains)


def test_transfer_witness():
    tw = transfer_witness(two_power_chain(), make_cyclic(ZZ, [16]), 4)
    assert tw.stages == (0, 1, 2, 3)
    assert tw.verify()
    with pytest.raises(Stabilized):
        transfer_witness(two_power_chain(), make_cyclic(ZZ, [9]), 3)
