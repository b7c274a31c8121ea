from fractions import Fraction as F

import numpy as np
from hypothesis import given, strategies as st

from padic_lab.cyclo import CycArray, inner_sum


def test_root_sum_vanishes():
    # sum of all 9th roots of unity
    z = CycArray.roots(np.arange(9), 3, 2)
    assert z.sum().is_zero()


def test_root_of_unity_product_and_conj():
    z = CycArray.root_of_unity(F(1, 3), 3)
    w = CycArray.root_of_unity(F(2, 3), 3)
    assert (z * w).all_equal(CycArray.scalar(1, 3))
    assert z.conj().all_equal(w)
    assert np.isclose(z.to_complex(), np.exp(2j * np.pi / 3))


def test_rational_detection():
    z = CycArray.root_of_unity(F(1, 9), 3)
    assert z.rational_value() is None
    s = CycArray.scalar(F(5, 2), 3)
    assert s.rational_value() == F(5, 2)


@given(st.lists(st.integers(0, 26), min_size=1, max_size=12), st.lists(st.integers(-3, 3), min_size=12, max_size=12))
def test_exact_matches_complex(exps, mult):
    mult = np.array(mult[: len(exps)], dtype=np.int64)
    a = CycArray.roots(np.array(exps), 3, 3, mult=mult)
    assert np.allclose(a.sum().to_complex(), (mult * np.exp(2j * np.pi * np.array(exps) / 27)).sum())
    b = a.conj()
    assert np.isclose(complex(inner_sum(a, a).to_complex()), complex((a.to_complex() * b.to_complex()).sum()))
