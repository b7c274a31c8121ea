from fractions import Fraction as F

import pytest

from padic_lab.characters import SigmaClass
from padic_lab.errors import DomainError
from padic_lab.kernels import build_f, compute_phi
from padic_lab.schwartz import GroupElem, scale_coords, smooth_adjoint
from padic_lab.stability import (fit_equivalence, is_regular_semisimple, metaplectic_normal_form,
                                 orbital_threshold, orbital_vanishing, phi_U_closed_form, stable_rescaling,
                                 zero_witness)

from oracles import ORBITAL_RATIONAL_VALUES, ORBITAL_THRESHOLDS

SIG = SigmaClass(3, 1, 1)


@pytest.fixture(scope="module")
def kernels():
    return {N: build_f(N, SIG, 1) for N in (4, 5)}


@pytest.fixture(scope="module")
def smoothed(kernels):
    return {N: smooth_adjoint(compute_phi(K, 1), 1) for N, K in kernels.items()}


def test_closed_form_matches_brute(kernels, smoothed):
    assert phi_U_closed_form(kernels[4], 1).equals(smoothed[4])


def test_rescaling_sign(smoothed):
    plus = {N: stable_rescaling(U, N, 1) for N, U in smoothed.items()}
    minus = {N: stable_rescaling(U, N, -1) for N, U in smoothed.items()}
    assert plus[4].equals(plus[5])
    assert not minus[4].equals(minus[5])


def test_residual_is_rescaled_phiU(kernels, smoothed):
    r0, _ = metaplectic_normal_form(kernels[4], 1, 1)
    assert r0.equals(stable_rescaling(smoothed[4], 4))


def test_residual_fit_across_N(kernels):
    r4, _ = metaplectic_normal_form(kernels[4], 1, 1)
    r5, _ = metaplectic_normal_form(kernels[5], 1, 1)
    e = fit_equivalence(r5, r4)
    assert e.holds and e.exact and e.c == 0 and e.gamma_angle == 0


def test_square_tau_residual_is_dilation(kernels):
    r1, _ = metaplectic_normal_form(kernels[4], 1, 1)
    r9, _ = metaplectic_normal_form(kernels[4], 9, 1)
    assert r9.equals(scale_coords(r1, F(3)))


@pytest.mark.parametrize("tau", [3, F(1, 3), F(1, 27)])
def test_odd_valuation_tau(kernels, tau):
    assert zero_witness(kernels[4], tau)
    with pytest.raises(DomainError):
        metaplectic_normal_form(kernels[4], tau, 1)


def test_regular_semisimple():
    assert is_regular_semisimple(GroupElem((1, 0, 0, 4)))
    assert not is_regular_semisimple(GroupElem((2, 0, 0, 2)))
    assert not is_regular_semisimple(GroupElem((1, 1, 0, 1)))


def test_central_rejected(kernels):
    with pytest.raises(DomainError):
        orbital_vanishing(GroupElem((2, 0, 0, 2)), 2, kernels[4])


@pytest.mark.parametrize("name,entries", [("diag(1,1+p)", (1, 0, 0, 4)), ("[[1/p,1],[0,1]]", (F(1, 3), 1, 0, 1))])
def test_orbital_threshold_small(name, entries):
    r = orbital_threshold(GroupElem(entries), 2, SIG, 1, [2, 3, 4, 5])
    assert r["threshold"] == ORBITAL_THRESHOLDS[name]


@pytest.mark.slow
def test_orbital_rational_values():
    name = "[[1,p^2],[p^3,1]]"
    r = orbital_threshold(GroupElem((1, 9, 27, 1)), 2, SIG, 1, [2, 3, 4, 5, 6])
    assert r["threshold"] == ORBITAL_THRESHOLDS[name]
    for N, v in ORBITAL_RATIONAL_VALUES[name].items():
        assert v == r["values"][N].rational_value()
