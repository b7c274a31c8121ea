from fractions import Fraction as F

import pytest

from padic_lab.characters import (AdditiveChar, SigmaClass, XN_count, block, check_N_N0,
                                  enumerate_XN, inverse_exclusion, iota, iota_is_isomorphism, omega_sigma,
                                  partition_XN, restriction_class, sigma_classes, sigma_count)
from padic_lab.errors import ConfigError, DomainError, PrecisionLoss
from padic_lab.padic import LocalField

from oracles import BLOCK_SIZE_341, XN_COUNTS


@pytest.mark.parametrize("pn", sorted(XN_COUNTS))
def test_XN_enumeration(pn):
    p, N = pn
    chars = enumerate_XN(p, N)
    assert len(chars) == XN_COUNTS[pn] == XN_count(p, N)
    assert all(c.conductor() == N for c in chars)
    assert len(set(chars)) == len(chars)


def test_sigma_counts():
    assert len(sigma_classes(3, 1)) == sigma_count(3, 1) == 2
    assert len(sigma_classes(3, 2)) == sigma_count(3, 2) == 6
    assert len(sigma_classes(5, 1)) == 4


def test_iota_examples():
    assert iota(28, 4, 1, 3) == F(1, 3)
    assert iota(55, 4, 1, 3) == F(2, 3)
    assert iota(1, 4, 1, 3) == 0
    with pytest.raises(DomainError):
        iota(2, 4, 1, 3)
    sig = SigmaClass(3, 1, 1)
    assert omega_sigma(sig, 4, 1)(28) == F(1, 3)


def test_blocks():
    assert len(block(3, 3, 1, 1)) == 6
    assert len(block(3, 4, 1, 1)) == BLOCK_SIZE_341
    parts = partition_XN(5, 3, 1)
    assert sum(len(v) for v in parts.values()) == 5**3 * 16 // 25
    for s, chars in parts.items():
        assert all(restriction_class(c, 1) == s for c in chars)


@pytest.mark.parametrize("cfg", [(3, 3, 1), (3, 4, 1), (5, 3, 1), (3, 5, 2)])
def test_inverse_exclusion_and_iota(cfg):
    assert all(inverse_exclusion(*cfg).values())
    assert iota_is_isomorphism(*cfg)


def test_inverse_lands_in_mirror_block():
    om = block(3, 4, 1, 1)[0]
    assert restriction_class(om.inverse(), 1) == SigmaClass(3, 1, 2)


def test_lift_level_preserves_values():
    om = enumerate_XN(3, 3)[0]
    big = om.lift_level(5)
    for u in (2, 4, 5, 7, 8):
        assert big.angle(u) == om.angle(u)
    with pytest.raises(DomainError):
        big.lift_level(3)


def test_additive_character():
    k = LocalField(3, 6)
    psi = AdditiveChar(k(1))
    assert psi.angle(k(F(1, 9))) == F(1, 9)
    assert psi.angle(k(F(10, 9))) == F(1, 9)
    assert psi.angle(k(5)) == 0
    with pytest.raises(PrecisionLoss):
        psi.angle(k.zero(-1))


def test_level_constraints():
    check_N_N0(3, 4, 1)
    with pytest.raises(ConfigError):
        check_N_N0(3, 3, 2)
    with pytest.raises(DomainError):
        SigmaClass(3, 1, 3)
