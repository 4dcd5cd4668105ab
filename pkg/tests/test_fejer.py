import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgh.errors import DimensionMismatch, GridTooCoarse, InputError
from qgh.fejer import (CharacterPoly, apply_Pn, build_character, build_kernel, fejer_table, table_csv,
                       truncation_check)
from qgh.qtorus import SkewMatrix, TorusElement

CLOSED_FORM_DELTA_1 = 0.25 - 1 / np.pi ** 2


def test_circle_character():
    chi = build_character(1)
    assert chi.coeffs == {(0,): 2, (1,): 1, (-1,): 1}
    x = np.linspace(0, 1, 7)[:, None]
    assert chi(x) == pytest.approx(2 + 2 * np.cos(2 * np.pi * x[:, 0]))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_constant_coefficient(d):
    assert build_character(d).coeffs[(0,) * d] == d + 1


def test_character_symmetric_in_2d():
    chi = build_character(2)
    for p in itertools.product(range(-2, 3), repeat=2):
        q = tuple(-x for x in p)
        assert chi.coeffs.get(p, 0) == chi.coeffs.get(q, 0)


def test_character_validation():
    with pytest.raises(InputError):
        CharacterPoly(1, {(0,): 1, (1,): 1})
    with pytest.raises(InputError):
        build_character(0)


def test_delta_one_closed_form():
    k = build_kernel(build_character(1), 1, "euclidean")
    assert abs(k.delta - CLOSED_FORM_DELTA_1) < 1e-4
    assert k.residual < 1e-4


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_circle_support(n):
    k = build_kernel(build_character(1), n)
    assert k.support == [(p,) for p in range(-n, n + 1)]


@pytest.mark.parametrize("d,n", [(1, 1), (1, 6), (2, 1), (2, 3)])
def test_multiplier_bounds(d, n):
    k = build_kernel(build_character(d), n)
    assert k((0,) * d) == 1.0
    assert all(0.0 <= v <= 1.0 for v in k.multiplier.values())


def test_supports_nested_and_symmetric():
    chi = build_character(2)
    prev = set()
    for n in range(1, 5):
        S = set(build_kernel(chi, n).support)
        assert prev <= S and (0, 0) in S
        assert all(tuple(-x for x in p) in S for p in S)
        prev = S


def test_delta_decreases_from_one_to_eight():
    chi = build_character(1)
    assert build_kernel(chi, 8).delta < build_kernel(chi, 1).delta


def test_alternative_character_reaches_small_delta():
    # π₀ with frequencies {0, 1, 2} on the circle
    chi = build_character(1, frequencies=[(0,), (1,), (2,)])
    assert build_kernel(chi, 12).delta < 0.05


def test_grid_checks():
    chi = build_character(1)
    with pytest.raises(GridTooCoarse):
        build_kernel(chi, 1, grid=32)
    with pytest.raises(GridTooCoarse):
        build_kernel(chi, 1, grid=64, tol=1e-12)


def test_pn_fixes_identity_and_kills_far_frequencies():
    k = build_kernel(build_character(2), 2)
    d0 = TorusElement.delta((0, 0))
    assert apply_Pn(k, d0).coeffs == d0.coeffs
    far = TorusElement(2, {(9, 0): 1.0, (0, -7): 2.0})
    assert apply_Pn(k, far).coeffs == {}
    with pytest.raises(DimensionMismatch):
        apply_Pn(k, TorusElement.delta((0,)))


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
                       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), max_size=12))
def test_pn_shrinks_l1(coeffs):
    k = build_kernel(build_character(2), 2)
    f = TorusElement(2, coeffs)
    Pf = apply_Pn(k, f)
    assert Pf.l1() <= f.l1() + 1e-12
    assert set(Pf.coeffs) <= set(k.support) & set(f.coeffs)


def test_truncation_on_identity():
    k = build_kernel(build_character(2), 2)
    rep = truncation_check(k, TorusElement.delta((0, 0)), SkewMatrix.from_upper(2, [0.3]), window=3)
    assert rep.residual_norm == 0.0 and rep.delta_L == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_truncation_inequalities(seed):
    rng = np.random.default_rng(seed)
    k = build_kernel(build_character(2), 3)
    f = TorusElement(2, {(a, b): rng.normal() + 1j * rng.normal() for a in range(-2, 3) for b in range(-2, 3)})
    f = f + f.star()
    rep = truncation_check(k, f, SkewMatrix.from_upper(2, [rng.random()]), window=5, sphere_samples=64)
    assert rep.margin_83 >= 0 and rep.margin_84 >= 0
    assert rep.lip_Pf <= rep.lip_f_grid * (1 + 1e-10)


def test_table():
    rows = fejer_table(1, 4)
    assert [r["n"] for r in rows] == [1, 2, 3, 4]
    text = table_csv(rows)
    assert text.splitlines()[0] == "n,support_size,delta,residual"
    assert text.splitlines()[1].startswith("1,3,0.1486")
