from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from padic_lab.errors import ConfigError, DomainError, PrecisionLoss
from padic_lab.padic import (LocalField, abs_k, cartan_coset_volume, ord_p, primitive_root, unit_residue,
                             vol_K, vol_K_level, vol_multiplicative)

K3 = LocalField(3, 6)


def test_valuations():
    assert ord_p(F(18, 5), 3) == 2
    assert ord_p(F(5, 27), 3) == -3
    assert ord_p(0, 3) == float("inf")
    assert unit_residue(F(1, 2), 3, 2) == 5


def test_abs_and_volumes():
    assert abs_k(K3(F(2, 9))) == 9
    assert abs_k(K3.zero(4)) == 0
    assert vol_multiplicative(0, 3) == F(2, 3)
    assert vol_multiplicative(2, 3) == F(1, 9)
    assert vol_K(3) == F(8, 9)
    assert vol_K_level(1, 3) == F(1, 27)
    assert cartan_coset_volume(1, 3) == 4
    assert cartan_coset_volume(2, 5) == 30


@given(st.fractions().filter(lambda x: x != 0), st.fractions().filter(lambda x: x != 0))
def test_multiplication_matches_rationals(x, y):
    a, b = K3(x), K3(y)
    assert a * b == K3(x * y)
    assert abs_k(a * b) == abs_k(a) * abs_k(b)


def test_addition_and_cancellation():
    assert K3(1) + K3(1) == K3(2)
    assert K3(F(1, 3)) + K3(5) == K3(F(16, 3))
    # 1 + 2 = 3 drops one digit of relative precision
    with pytest.raises(PrecisionLoss):
        _ = K3(1) + K3(2)
    # total cancellation leaves a zero known to depth 6
    z = K3(1 + 3**6) + K3(-1)
    assert z.is_zero() and z.depth == 6


def test_zero_sentinel():
    z = K3.zero(3)
    assert z.in_ideal(2)
    with pytest.raises(PrecisionLoss):
        z.in_ideal(5)
    with pytest.raises(PrecisionLoss):
        z.inverse()
    with pytest.raises(DomainError):
        K3(0)


def test_precision_policy():
    LocalField(3, 8).check_precision(4, 1, 1)
    with pytest.raises(ConfigError):
        LocalField(3, 7).check_precision(4, 1, 1)
    with pytest.raises(ConfigError):
        LocalField(9, 4)


def test_primitive_root():
    g = primitive_root(3, 4)
    assert len({pow(g, k, 81) for k in range(54)}) == 54
    with pytest.raises(DomainError):
        primitive_root(2, 3)
