import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from abelianizer.partitions import BoxSpec, Partition, box_partitions, complement
from abelianizer.cohomology import (
    PClass,
    ProductSpace,
    antisymmetrize,
    add,
    c_squared,
    cup,
    delta,
    divide_by_omega,
    integrate,
    integrate_rational,
    lift,
    martin_integral,
    monomial,
    omega,
    scale,
    schubert_cup,
    space_of,
    unit,
    variable,
    weyl_action,
    pclass_records,
)


def P(*parts):
    return Partition(parts)


S24 = ProductSpace(2, 4)


def test_cup_ideal_relation():
    h1 = variable(S24, 0)
    h1_cubed = cup(cup(h1, h1), h1)
    assert cup(h1_cubed, h1).is_zero()


def test_cup_root_square():
    r = add(variable(S24, 0), scale(variable(S24, 1), -1))
    sq = cup(r, r)
    assert sq.terms == {(2, 0): 1, (1, 1): -2, (0, 2): 1}


def test_omega_squared_is_c2_delta_squared():
    box = BoxSpec(2, 4)
    om = omega(box)
    om2 = cup(om, om)
    dl2 = cup(delta(S24), delta(S24))
    assert om2.cgrade == 0
    assert om2 == scale(dl2, Fraction(-1, 2))


def test_omega_examples():
    assert omega(BoxSpec(2, 4)).terms == {(1, 0): 1, (0, 1): -1}
    assert omega(BoxSpec(2, 4)).cgrade == 1
    om1 = omega(BoxSpec(1, 5))
    assert om1.terms == {(0,): 1} and c_squared(1) == 1
    om36 = omega(BoxSpec(3, 6))
    space36 = space_of(BoxSpec(3, 6))
    want = cup(cup(
        add(variable(space36, 0), scale(variable(space36, 1), -1)),
        add(variable(space36, 0), scale(variable(space36, 2), -1))),
        add(variable(space36, 1), scale(variable(space36, 2), -1)))
    assert om36.terms == want.terms
    assert c_squared(3) == Fraction(-1, 6)


def test_integrate_examples():
    top = monomial(S24, (3, 3))
    assert integrate(top) == (Fraction(1), 0)
    box = BoxSpec(2, 4)
    val = martin_integral(lift(P(2, 2), box), box)
    assert val == 1
    assert integrate(variable(S24, 0)) == (Fraction(0), 0)


def test_integrate_rational_rejects_odd_cgrade():
    phi = PClass(S24, {(3, 3): Fraction(1)}, 1)
    with pytest.raises(ValueError):
        integrate_rational(phi)


def test_weyl_action():
    h1 = variable(S24, 0)
    swapped = weyl_action((1, 0), h1)
    assert swapped == variable(S24, 1)
    om = omega(BoxSpec(2, 4))
    assert weyl_action((1, 0), om) == scale(om, -1)
    assert weyl_action((0, 1), om) == om


def test_lift_examples():
    box = BoxSpec(2, 4)
    assert lift(P(1), box).terms == {(1, 0): 1, (0, 1): 1}
    assert lift(P(2, 2), box).terms == {(2, 2): 1}
    assert lift(P(), box) == unit(S24)
    with pytest.raises(ValueError):
        lift(P(3), box)


def test_schubert_cup_examples():
    box = BoxSpec(2, 4)
    assert schubert_cup(P(1), P(1), box) == {P(2): 1, P(1, 1): 1}
    assert schubert_cup(P(2), P(1, 1), box) == {}
    for lam in box_partitions(box):
        prod = schubert_cup(lam, complement(lam, box), box)
        assert prod == {P(2, 2): 1}


def test_cup_box_mismatch():
    with pytest.raises(ValueError):
        cup(unit(S24), unit(ProductSpace(2, 5)))


@pytest.mark.parametrize("box", [BoxSpec(2, 4), BoxSpec(2, 5), BoxSpec(3, 6)])
def test_martin_orthogonality(box):
    # int omega^2 S_lam S_mu = delta(mu, lam complement), complementary weights
    parts = box_partitions(box)
    for lam in parts:
        for mu in parts:
            if lam.weight + mu.weight != box.dim:
                continue
            got = martin_integral(cup(lift(lam, box), lift(mu, box)), box)
            assert got == (1 if mu == complement(lam, box) else 0), (lam, mu)


def test_lifting_multiplicativity():
    # lift(sigma_lam * sigma_mu) cup omega == lift(lam) cup lift(mu) cup omega
    box = BoxSpec(2, 4)
    om = omega(box)
    for lam, mu in itertools.combinations_with_replacement(box_partitions(box), 2):
        vec = schubert_cup(lam, mu, box)
        lhs = PClass(S24, {}, 1)
        for nu, c in vec.items():
            lhs = add(lhs, scale(cup(lift(nu, box), om), c))
        rhs = cup(cup(lift(lam, box), lift(mu, box)), om)
        assert lhs == rhs, (lam, mu)


def test_divide_by_omega_examples():
    box = BoxSpec(2, 4)
    om = omega(box)
    assert divide_by_omega(om, box) == {P(): 1}
    assert divide_by_omega(cup(lift(P(1), box), om), box) == {P(1): 1}
    assert divide_by_omega(PClass(S24, {}, 1), box) == {}
    with pytest.raises(ValueError):
        divide_by_omega(PClass(S24, {(1, 0): Fraction(1)}, 1), box)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_divide_by_omega_inverts_cup(data):
    box = BoxSpec(2, 4)
    om = omega(box)
    coeffs = {
        lam: Fraction(data.draw(st.integers(-4, 4)))
        for lam in box_partitions(box)
        if data.draw(st.booleans())
    }
    phi = PClass(S24, {}, 1)
    for lam, c in coeffs.items():
        phi = add(phi, scale(cup(lift(lam, box), om), c))
    got = divide_by_omega(phi, box)
    assert got == {lam: c for lam, c in coeffs.items() if c}


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_antisymmetrization_lands_in_omega_span(data):
    box = BoxSpec(2, 4)
    terms = {}
    for _ in range(data.draw(st.integers(0, 4))):
        e = (data.draw(st.integers(0, 3)), data.draw(st.integers(0, 3)))
        terms[e] = Fraction(data.draw(st.integers(-3, 3)))
    a = PClass(S24, terms)
    anti = antisymmetrize(a)
    # expansion must succeed for any antisymmetrized class
    divide_by_omega(PClass(S24, anti.terms, 1), box)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_cup_commutative_associative(data):
    def rand_class(cg):
        terms = {}
        for _ in range(data.draw(st.integers(1, 3))):
            e = (data.draw(st.integers(0, 3)), data.draw(st.integers(0, 3)))
            terms[e] = Fraction(data.draw(st.integers(-3, 3)))
        return PClass(S24, terms, cg)

    a = rand_class(data.draw(st.integers(0, 1)))
    b = rand_class(data.draw(st.integers(0, 1)))
    c = rand_class(data.draw(st.integers(0, 1)))
    assert cup(a, b) == cup(b, a)
    assert cup(cup(a, b), c) == cup(a, cup(b, c))


def test_serialization_records():
    om = omega(BoxSpec(2, 4))
    assert pclass_records(om) == [([0, 1], -1, 1, 1), ([1, 0], 1, 1, 1)]
