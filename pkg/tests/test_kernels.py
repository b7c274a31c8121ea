from fractions import Fraction as F

import pytest

from padic_lab.characters import SigmaClass, block, partition_XN
from padic_lab.errors import ConfigError, DomainError
from padic_lab.kernels import (build_f, compute_phi, expected_normalization, heart_f_closed_form,
                               heart_windows, normalization_integral, phi_odd_q_closed_form,
                               phi_support_report, profile_I, projector_on_principal_series, split_N, vol_J)
from padic_lab.schwartz import fourier, symmetrize

from oracles import BLOCK_SIZE_341, NORMALIZATION, VOL_J_341


@pytest.fixture(scope="module", params=[(3, 4, 1), (5, 3, 1)], ids=lambda c: "p%d-N%d-N0%d" % c)
def setup(request):
    p, N, N0 = request.param
    K = build_f(N, SigmaClass(p, N0, 1), N0)
    return request.param, K, compute_phi(K)


def test_kernel_metadata():
    K = build_f(4, SigmaClass(3, 1, 1), 1)
    assert K.volJ == vol_J(3, 4) == VOL_J_341
    assert K.block_size == BLOCK_SIZE_341
    assert split_N(3, 4) == (2, 2) and split_N(3, 5) == (2, 3)


def test_build_rejects_bad_levels():
    with pytest.raises(ConfigError):
        build_f(3, SigmaClass(3, 2, 1), 2)
    with pytest.raises(ConfigError):
        build_f(4, SigmaClass(3, 2, 1), 1)


def test_heart_matches_closed_form(setup):
    (p, N, N0), K, _ = setup
    hw = K.heart(1)
    assert hw.equals(heart_f_closed_form(N, K.sigma, N0, hw.lo, hw.hi))
    # the widened grid carries nothing outside the tight windows
    assert hw.coarsen(*heart_windows(p, N, N0)) is not None


def test_symmetrization_routes_agree(setup):
    _, K, phi = setup
    hw = K.heart(1)
    a1 = fourier(symmetrize(hw), 0, K.xi)
    assert a1.equals(symmetrize(fourier(hw, 0, K.xi)))
    assert a1.equals(fourier(K.heart(1, sym=True), 0, K.xi))
    assert a1.equals(phi)


def test_support_and_profile(setup):
    (p, N, N0), K, phi = setup
    rep = phi_support_report(phi, K)
    assert all(rep[k] for k in ("alpha", "beta", "gamma", "delta", "dilation"))
    I = profile_I(phi)
    assert I.weyl_symmetric()
    assert I.delta_support_ok(N0)


def test_normalization(setup):
    (p, N, N0), K, phi = setup
    nrm = normalization_integral(profile_I(phi))
    assert nrm == expected_normalization(p, N, N0) == NORMALIZATION[(p, N, N0)]


def test_float_normalization_agrees(setup):
    (p, N, N0), K, phi = setup
    nrm = normalization_integral(profile_I(phi.to_float()))
    assert abs(nrm - float(NORMALIZATION[(p, N, N0)])) < 1e-9


def test_odd_q_closed_form_constant(setup):
    # Phi carries q^-N0, not q^-N0 zeta(1)^-1: the two differ by exactly zeta(1)
    _, K, phi = setup
    literal = phi_odd_q_closed_form(K, phi.lo, phi.hi)
    corrected = phi_odd_q_closed_form(K, phi.lo, phi.hi, corrected=True)
    assert phi.equals(corrected)
    assert not phi.equals(literal)
    zeta1 = 1 / (1 - F(1, K.p))
    assert phi.equals(literal.scaled(zeta1))


def test_profile_requires_dual_chart(setup):
    _, K, _ = setup
    with pytest.raises(DomainError):
        profile_I(K.heart(1))


def test_projector_341():
    K = build_f(4, SigmaClass(3, 1, 1), 1)
    om = block(3, 4, 1, 1)[0]
    r = projector_on_principal_series(K, om, samples=20)
    assert (r.rank, r.idempotent, r.self_adjoint) == (1, True, True)
    assert r.image_transform == "omega(a^2/nr)" and r.image_checks == 20
    # omega^-1 gives the same principal series
    assert projector_on_principal_series(K, om.inverse()).rank == 1
    u = projector_on_principal_series(K, None)
    assert u.rank == 0 and u.zero


@pytest.mark.slow
def test_projector_other_block():
    K = build_f(3, SigmaClass(5, 1, 1), 1)
    parts = partition_XN(5, 3, 1)
    other = parts[SigmaClass(5, 1, 2)][0]
    r = projector_on_principal_series(K, other)
    assert r.rank == 0 and r.zero
