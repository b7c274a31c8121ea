from fractions import Fraction as F

import pytest

from padic_lab.characters import SigmaClass
from padic_lab.errors import ConfigError, DomainError
from padic_lab.kernels import build_f
from padic_lab.maintm import (MainTerm, battery, coset_volume, e0m_membership,
                              gh_disjointness, hensel_orbit_check, in_double_coset, km_average,
                              nh_classifier, nh_decompose, slice_delta, weyl_variant_check)
from padic_lab.padic import vol_K
import numpy as np

from padic_lab.cyclo import CycArray
from padic_lab.schwartz import GridFnB, a, identity, n, weyl

from oracles import BATTERY_LABELS, COSET_VOLUMES_31, MAIN_TERM_RHS


@pytest.fixture(scope="module")
def mt341():
    return MainTerm(build_f(4, SigmaClass(3, 1, 1), 1), 1)


def test_e0m_membership():
    assert e0m_membership((1, 3, 3), 1, 3)
    assert not e0m_membership((1, 1, 0), 1, 3)
    assert not e0m_membership((0, 0, 0), 1, 3)
    assert e0m_membership((F(1, 9), F(1, 3), 0), 1, 3)
    assert not e0m_membership((F(1, 9), F(1, 27), 0), 1, 3)


@pytest.mark.parametrize("alpha0,m", [(F(1), 1), (F(1, 81), 2)])
def test_hensel_orbit(alpha0, m):
    h = hensel_orbit_check(alpha0, m, 3, 1)
    assert h.bijective and h.uniform and h.y1_y2_match
    assert h.y3_corrected_match
    # the coordinate y3 = x2 (1 + x1)(1 + 2 x3) does not match the map
    assert not h.y3_printed_match


def test_hensel_needs_nonzero():
    with pytest.raises(DomainError):
        hensel_orbit_check(0, 1, 3)


@pytest.mark.parametrize("x1,x2", [(0, 1), (3, 3), (F(-1, 3), 3), (1, 0), (9, F(1, 3))])
def test_nh_classifier_consistent(x1, x2):
    assert nh_classifier(x1, x2, 1, 3).consistent


def test_gh_disjointness():
    cells, overlaps = gh_disjointness(1, 3)
    assert cells == 729 and overlaps == 0


def test_coset_volumes():
    for psi in battery(1, 3):
        assert coset_volume(psi.cosets[0][1], 1, 3) == COSET_VOLUMES_31[psi.label]
    assert coset_volume(a(F(3)), 0, 3) / vol_K(3) == 4
    assert coset_volume(a(F(9)), 0, 3) / vol_K(3) == 12


def test_double_coset_membership():
    assert in_double_coset(a(F(1, 3)), weyl() @ a(F(3)) @ weyl(), 0, 3)
    assert not in_double_coset(n(1), identity(), 1, 3)
    assert nh_decompose(n(1), 1, 3) is None
    assert nh_decompose(weyl() @ a(F(3)), 1, 3) == (1, 1)


def test_battery_distinct():
    obs = battery(1, 3)
    assert tuple(o.label for o in obs) == BATTERY_LABELS
    total = obs[0]
    for o in obs[1:]:
        total = total + o
    assert total.check_distinct(3)
    with pytest.raises(ConfigError):
        obs[0] + battery(2, 3)[0]


def test_main_term_341(mt341):
    for psi in battery(1, 3):
        r = mt341.row(psi)
        assert r.paths_agree and r.passed
        expect = 0 if "off" in psi.label else MAIN_TERM_RHS[(3, 4, 1, 1)]
        assert r.rhs == expect


def test_main_term_linear(mt341):
    obs = battery(1, 3)
    combo = obs[0].scaled(3) + obs[2]
    assert mt341.row(combo).passed
    assert mt341.rhs(combo) == 4 * MAIN_TERM_RHS[(3, 4, 1, 1)]


def test_km_average_paths(mt341):
    s = slice_delta(mt341.phiU, F(0))
    for xi in [(F(1, 81), 0, 0), (F(2, 81), F(1, 27), F(-1, 27)), (F(1, 27), 0, 0), (0, 0, 0)]:
        brute, closed = km_average(s, xi, 1)
        assert brute.all_equal(closed)


def test_km_average_rejects_non_invariant():
    # indicator of alpha = 1 mod 9 with beta, gamma in 3Z: inside E0(1), not 1 + 3Z stable
    c = np.zeros((9, 1, 1, 1, 1), dtype=np.int64)
    c[1] = 1
    box = GridFnB("dual", (0, 1, 1, 0), (2, 1, 1, 0), CycArray(c, 3, 0), 3)
    with pytest.raises(DomainError):
        km_average(box, (1, 0, 0), 1)
    c[1::3] = 1
    brute, closed = km_average(box.with_values(CycArray(c, 3, 0)), (1, 0, 0), 1)
    assert brute.all_equal(closed)


def test_weyl_variant_weights(mt341):
    s = slice_delta(mt341.phiU, F(0))
    r = weyl_variant_check(s, 1)
    assert r.orbit_identity_ok
    assert r.balanced_agrees
    # the |2 alpha|^-2 weight does not reproduce the integral
    assert not r.printed_agrees
