"""Field layer on the flat torus: spectral calculus, functionals, gauge
moves, and the two file formats."""

import math

import numpy as np
import pytest

from ddt7 import torus
from ddt7.errors import InputError
from ddt7.exalg import KForm, hodge, inner, wedge
from ddt7.scalars import FLOAT
from ddt7.torus import (Flux, FormField, GaugePotential, TorusGrid,
                        coclosed_project, codiff, curvature,
                        curvature_residual, d, dtheta4, field_inner,
                        field_l2, field_mean, gauge_shift, hodge_field,
                        integrate, kl_functional, kl_oneform, kl_segment,
                        load_field, load_flux, nu_derivative_check,
                        random_coclosed_potential, random_field,
                        random_potential, residual_field, save_field,
                        save_flux, theta3, wedge_field, zero_potential)

GRID3 = TorusGrid((1, 2, 3), 8)
GRID2 = TorusGrid((1, 2), 8)


def test_grid_validation():
    for bad in [(), (2, 1), (1, 1), (0, 2), (1, 8)]:
        with pytest.raises(InputError):
            TorusGrid(bad, 4)
    for bad_n in (0, 1, 3, 6):
        with pytest.raises(InputError):
            TorusGrid((1, 2), bad_n)
    with pytest.raises(InputError):
        FormField(GRID2, 1, np.zeros((3, 7)))
    with pytest.raises(InputError):
        FormField(GRID2, 1, np.full((GRID2.npts, 7), np.nan))


def test_d_squared_vanishes():
    rng = np.random.default_rng(0)
    for k in (0, 1, 2):
        f = random_field(GRID3, k, rng, kmax=2)
        assert field_l2(d(d(f))) <= 1e-11 * max(field_l2(f), 1.0)


def test_d_matches_analytic_derivative():
    """d of cos(2 pi x1) is -2 pi sin(2 pi x1) dx^1."""
    x = GRID2.coordinates()
    f = FormField(GRID2, 0, np.cos(2 * math.pi * x[1])[:, None])
    df = d(f)
    expected = np.zeros((GRID2.npts, 7))
    expected[:, 0] = -2 * math.pi * np.sin(2 * math.pi * x[1])
    assert np.max(np.abs(df.values - expected)) < 1e-12


def test_codiff_is_adjoint_of_d():
    rng = np.random.default_rng(1)
    for kf in (0, 1, 2):
        f = random_field(GRID3, kf, rng, kmax=2)
        g = random_field(GRID3, kf + 1, rng, kmax=2)
        lhs = field_inner(d(f), g)
        rhs = field_inner(f, codiff(g))
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs), 1.0)


def test_integral_of_exact_form_vanishes():
    rng = np.random.default_rng(2)
    f = random_field(GRID3, 6, rng, kmax=2)
    assert abs(integrate(d(f))) < 1e-12 * max(field_l2(f), 1.0)
    with pytest.raises(InputError):
        integrate(f)


def test_field_ops_match_pointwise_algebra():
    rng = np.random.default_rng(3)
    f = random_field(GRID3, 2, rng)
    g = random_field(GRID3, 3, rng)
    w = wedge_field(f, g)
    h = hodge_field(f)
    for p in (0, 17, GRID3.npts - 1):
        fw = wedge(f.pointwise(p), g.pointwise(p))
        assert np.allclose(w.values[p], [float(c) for c in fw.coeffs],
                           rtol=0, atol=1e-13)
        fh = hodge(f.pointwise(p))
        assert np.allclose(h.values[p], [float(c) for c in fh.coeffs],
                           rtol=0, atol=1e-13)
        assert abs(inner(f.pointwise(p), f.pointwise(p))
                   - float(np.sum(f.values[p] ** 2))) < 1e-12


def test_random_fields_are_band_limited():
    rng = np.random.default_rng(4)
    f = random_field(GRID3, 1, rng, kmax=1)
    cube = f.values.reshape(GRID3.shape + (7,))
    spec = np.fft.fftn(cube, axes=(0, 1, 2))
    k = GRID3.wavenumbers()
    mask = (np.abs(k)[:, None, None] > 1) | (np.abs(k)[None, :, None] > 1) \
        | (np.abs(k)[None, None, :] > 1)
    assert np.max(np.abs(spec[mask])) < 1e-10 * np.max(np.abs(spec))


def test_flux_background_and_mean():
    flux = Flux.from_entries({(1, 2): 1, (4, 7): 2, (5, 6): -1})
    rng = np.random.default_rng(5)
    pot = random_potential(GRID3, flux, rng, scale=0.3)
    mean = field_mean(curvature(pot))
    assert np.allclose(mean, 2 * math.pi * np.array(flux.upper),
                       rtol=0, atol=1e-12)
    with pytest.raises(InputError):
        Flux.from_entries({(2, 1): 1})
    with pytest.raises(InputError):
        Flux((1, 2, 3))


def test_residual_norm_of_pure_flux_background():
    # frozen: E = 2 pi (e12 + 2 e47 - e56) kills the cubic term and leaves
    # |E ^ *phi| = 2 (2 pi)^3 pointwise
    flux = Flux.from_entries({(1, 2): 1, (4, 7): 2, (5, 6): -1})
    _, norm = residual_field(zero_potential(GRID2, flux))
    assert abs(norm - 2 * (2 * math.pi) ** 3) < 1e-9
    assert abs(norm - 496.10042688479706) < 1e-9


def test_kl_segment_is_path_independent():
    rng = np.random.default_rng(6)
    flux = Flux.from_entries({(1, 2): 1, (4, 7): 1})
    d1 = random_field(GRID2, 1, rng, scale=0.2)
    d2 = random_field(GRID2, 1, rng, scale=0.2)
    base = zero_potential(GRID2, flux)
    direct = kl_segment(base, d1 + d2)
    two_leg = kl_segment(base, d1) + kl_segment(GaugePotential(d1, flux), d2)
    assert abs(direct - two_leg) <= 1e-10 * max(abs(direct), 1.0)
    assert abs(kl_functional(GaugePotential(d1 + d2, flux)) - direct) < 1e-14


def test_kl_oneform_vanishes_on_exact_directions():
    """The residual 6-form is closed, so pairing against d(chi) integrates
    to zero for any gauge function chi."""
    rng = np.random.default_rng(7)
    flux = Flux.from_entries({(1, 2): 1, (4, 7): 1})
    pot = random_potential(GRID3, flux, rng, scale=0.2)
    chi = random_field(GRID3, 0, rng)
    assert abs(kl_oneform(pot, d(chi))) < 1e-10


def test_gauge_invariance_of_functionals():
    rng = np.random.default_rng(8)
    flux = Flux.from_entries({(1, 2): 1})
    pot = random_potential(GRID3, flux, rng, scale=0.2)
    chi = random_field(GRID3, 0, rng, scale=0.5)
    shifted = gauge_shift(pot, chi, m=(1, 0, -2, 0, 0, 0, 1))
    # curvature is exactly gauge invariant up to spectral roundoff
    assert field_l2(curvature(shifted) - curvature(pot)) < 1e-10
    # the functional only sees small gauges; windings move it by
    # flux-dependent constants, so its invariance is chi-only
    kl0 = kl_functional(pot)
    assert abs(kl_functional(gauge_shift(pot, chi)) - kl0) \
        <= 1e-10 * max(abs(kl0), 1.0)
    assert abs(kl_functional(gauge_shift(pot, m=(0, 0, 1, 0, 0, 0, 0)))
               - kl0) > 1e-3
    b1, b2, b3 = (random_field(GRID3, 1, rng) for _ in range(3))
    assert abs(theta3(shifted, b1, b2, b3)
               - theta3(pot, b1, b2, b3)) < 1e-10
    with pytest.raises(InputError):
        gauge_shift(pot, m=(1, 0, 0))
    with pytest.raises(InputError):
        gauge_shift(pot, chi=b1)


def test_theta3_alternates_exactly():
    rng = np.random.default_rng(9)
    pot = random_potential(GRID3, Flux.zero(), rng, scale=0.3)
    b1, b2, b3 = (random_field(GRID3, 1, rng) for _ in range(3))
    v = theta3(pot, b1, b2, b3)
    assert theta3(pot, b2, b1, b3) == -v
    assert theta3(pot, b1, b3, b2) == -v
    assert theta3(pot, b3, b1, b2) == v
    assert theta3(pot, b1, b1, b3) == 0.0
    assert theta3(pot, b1, b2, b2) == 0.0


def test_dtheta4_closedness():
    rng = np.random.default_rng(10)
    flux = Flux.from_entries({(1, 2): 1, (4, 7): -1})
    pot = random_potential(GRID3, flux, rng, scale=0.2)
    bs = [random_field(GRID3, 1, rng) for _ in range(4)]
    assert abs(dtheta4(pot, *bs)) < 1e-10


def test_nu_derivative_matches_theta3():
    rng = np.random.default_rng(11)
    flux = Flux.from_entries({(1, 2): 1})
    for _ in range(5):
        pot = random_potential(GRID3, flux, rng, scale=0.2)
        g1 = random_field(GRID3, 0, rng)
        g2 = random_field(GRID3, 0, rng)
        b = random_field(GRID3, 1, rng)
        lhs, rhs = nu_derivative_check(pot, g1, g2, b)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1.0)


def test_coclosed_projection():
    rng = np.random.default_rng(12)
    a = random_field(GRID3, 1, rng, kmax=2)
    p = coclosed_project(a)
    scale = max(field_l2(a), 1.0)
    assert field_l2(codiff(p)) < 1e-10 * scale
    assert np.max(np.abs(field_mean(p))) < 1e-12
    q = coclosed_project(p)
    assert np.max(np.abs(q.values - p.values)) < 1e-12
    # only the curl-free part is removed, so d passes through
    assert field_l2(d(p) - d(a)) < 1e-10 * scale


def test_snapshot_roundtrip(tmp_path):
    rng = np.random.default_rng(13)
    f = random_field(GRID3, 2, rng, kmax=2)
    path = tmp_path / "f.t7f"
    save_field(path, f)
    g = load_field(path)
    assert g.grid == f.grid and g.k == f.k
    assert np.array_equal(g.values, f.values)

    short = tmp_path / "short.t7f"
    short.write_bytes(path.read_bytes()[:10])
    with pytest.raises(InputError):
        load_field(short)
    bad = tmp_path / "bad.t7f"
    bad.write_bytes(b"NOTAFORM" + path.read_bytes()[8:])
    with pytest.raises(InputError):
        load_field(bad)
    trunc = tmp_path / "trunc.t7f"
    trunc.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(InputError):
        load_field(trunc)


def test_flux_file_roundtrip(tmp_path):
    flux = Flux.from_entries({(1, 2): 1, (4, 7): 2, (5, 6): -1})
    path = tmp_path / "flux.txt"
    save_flux(path, flux)
    assert load_flux(path) == flux
    (tmp_path / "short.txt").write_text("1 2 3\n")
    with pytest.raises(InputError):
        load_flux(tmp_path / "short.txt")
    (tmp_path / "junk.txt").write_text(" ".join(["1"] * 20 + ["x"]) + "\n")
    with pytest.raises(InputError):
        load_flux(tmp_path / "junk.txt")


def test_potential_and_residual_validation():
    rng = np.random.default_rng(14)
    with pytest.raises(InputError):
        GaugePotential(random_field(GRID2, 2, rng), Flux.zero())
    pot = random_coclosed_potential(GRID2, Flux.zero(), rng, scale=0.1)
    assert field_l2(codiff(pot.a)) < 1e-10
    E = curvature(pot)
    R = curvature_residual(E)
    assert R.k == 6
    # closedness of the residual, the fact the kl tests lean on
    assert field_l2(d(R)) < 1e-9
