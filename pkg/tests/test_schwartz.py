from fractions import Fraction as F

import numpy as np
import pytest

from padic_lab.cyclo import CycArray
from padic_lab.errors import DomainError
from padic_lab.schwartz import (GridFnB, a, adjoint, dump, fourier, indicator_lattice, inner, load, n,
                                nprime, reflect, smooth_adjoint, symmetrize, to_chart, weil_apply)


def random_grid(seed, lo=(0, -1, 1, 0), hi=(1, 0, 2, 2), p=3):
    rng = np.random.default_rng(seed)
    shape = tuple(p ** (h - l) for l, h in zip(lo, hi))
    c = np.zeros(shape + (3,), dtype=np.int64)
    c[..., 0] = rng.integers(-2, 3, shape)
    c[..., 1] = rng.integers(-2, 3, shape)
    return GridFnB("source", lo, hi, CycArray(c, p, 1), p)


@pytest.fixture(scope="module")
def phi():
    return random_grid(0)


def test_unit_lattice_is_self_dual():
    one = indicator_lattice("source", (0, 0, 0, 0), 3)
    assert fourier(one).relabel(chart="source").equals(one)


def test_lattice_dual_scaling():
    f = fourier(indicator_lattice("source", (1, 0, 0, 0), 3))
    assert (f.lo, f.hi) == ((-1, 0, 0, 0), (-1, 0, 0, 0))
    assert f.values.rational_value().ravel()[0] == F(1, 3)


def test_fourier_inversion_and_plancherel(phi):
    Fp = fourier(phi)
    assert fourier(Fp).equals(reflect(phi))
    assert (inner(Fp, Fp) - inner(phi, phi)).is_zero()


def test_float_backend_agrees(phi):
    assert np.allclose(fourier(phi.to_float()).values, fourier(phi).values.to_complex())


def test_symmetrize_commutes(phi):
    assert fourier(symmetrize(phi)).equals(symmetrize(fourier(phi)))


def test_adjoint_is_an_action(phi):
    g, h = n(F(1, 3)), a(F(3))
    assert adjoint(g, adjoint(h, phi)).equals(adjoint(g @ h, phi))
    assert fourier(adjoint(g, phi)).equals(adjoint(g, fourier(phi)))


def test_smoothing_idempotent_and_invariant(phi):
    d = fourier(phi)
    U = smooth_adjoint(d, 1, verify=True)
    assert smooth_adjoint(U, 1).equals(U)
    assert adjoint(nprime(3), U).equals(U)
    assert adjoint(a(F(4)), U).equals(U)
    assert U.to_float().equals(smooth_adjoint(d.to_float(), 1))


def test_factored_smoothing_matches_direct(phi):
    d = fourier(phi)
    assert smooth_adjoint(d, 1, method="direct").equals(smooth_adjoint(d, 1, method="factored"))


def test_smoothing_needs_dual_chart(phi):
    with pytest.raises(DomainError):
        smooth_adjoint(phi, 1)


@pytest.mark.parametrize("space", ["B", "B0"])
def test_weil_relation_up_to_scalar(space):
    # (w n(1))^3 acts by a scalar
    phi = random_grid(1, (0, 0, 0, 0), (1, 1, 1, 1))
    x = phi
    for _ in range(3):
        x = weil_apply("w", None, weil_apply("n", 1, x, space), space)
    y, z = to_chart(x, "source").to_float().common(phi.to_float())
    nz = np.abs(z.values) > 0
    ratio = y.values[nz] / z.values[nz]
    assert np.allclose(ratio, ratio[0])
    assert np.allclose(y.values, ratio[0] * z.values)


def test_dump_round_trip(phi):
    f = fourier(phi)
    assert load(dump(f)).equals(f)
