import numpy as np
import pytest

from edcheck.fixtures import Registry
from edcheck.geometry import (DegenerateMetric, max_abs_value,
                              frame_components_of_coord_sym2, mat_det, mat_inv,
                              mat_mul, sum_jets)
from edcheck.jets import Jet, seed_point

from oracles import omega_from_christoffels, ricci_coordinate, scal_coordinate

REG = Registry.builtin()

ALL_FIXTURES = ["T2_flat", "T3_flat", "T2_mink", "R2_flat", "S2_round",
                "S3_round", "S3_group", "H2_half", "H3_half", "R11_mink",
                "R13_mink", "T2xR_exp", "T2xR_wk_lor"]


def geom_at(name, seed=0, count=6, order=4):
    chart = REG.chart(name)
    pts = chart.sample_points(seed, count)
    return chart.geometry(pts, order)


def test_mat_inv_and_det():
    rng = np.random.default_rng(0)
    x = seed_point(2, 3, rng.uniform(0.2, 0.8, size=(4, 2)))
    M = [[1.0 + x[0] * x[1], 0.3 * x[0].sin()], [0.3 * x[0].sin(), 2.0 + x[1] * x[1]]]
    Minv = mat_inv(M)
    prod = mat_mul(M, Minv)
    for a in range(2):
        for b in range(2):
            want = 1.0 if a == b else 0.0
            assert np.max(np.abs(prod[a][b].coeffs - (Jet.constant(2, 3, want * np.ones(4)).coeffs))) < 1e-12
    det = mat_det(M)
    want = (1.0 + x[0] * x[1]) * (2.0 + x[1] * x[1]) - (0.3 * x[0].sin()) ** 2
    assert np.max(np.abs(det.coeffs - want.coeffs)) < 1e-12


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_frame_orthonormality(name):
    geom = geom_at(name, seed=11, count=8)
    n = geom.n
    worst = 0.0
    for i in range(n):
        for j in range(n):
            want = geom.chi[i] if i == j else 0.0
            worst = max(worst, max_abs_value(geom.gram[i][j] - want))
    assert worst < 1e-12


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_omega_antisymmetry_and_oracle(name):
    geom = geom_at(name, seed=3, count=4)
    n = geom.n
    worst_anti = 0.0
    worst_oracle = 0.0
    oracle = omega_from_christoffels(geom)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                worst_anti = max(worst_anti, max_abs_value(
                    geom.omega[i][j][k] + geom.omega[i][k][j]))
                worst_oracle = max(worst_oracle, max_abs_value(
                    geom.omega[i][j][k] - oracle[i][j][k]))
    assert worst_anti < 1e-10
    assert worst_oracle < 1e-9


def test_flat_charts_are_flat():
    for name in ["T2_flat", "T3_flat", "R2_flat", "R11_mink", "R13_mink"]:
        geom = geom_at(name, seed=5, count=4)
        assert max_abs_value(geom.ric) < 1e-12
        assert max_abs_value(geom.scal) < 1e-12
        assert max_abs_value(geom.omega) < 1e-12


@pytest.mark.parametrize("name,expected", [
    ("S2_round", 2.0), ("S3_round", 6.0), ("S3_group", 6.0),
    ("H2_half", -2.0), ("H3_half", -6.0),
])
def test_constant_curvature_scal(name, expected):
    geom = geom_at(name, seed=7, count=6)
    assert max_abs_value(geom.scal - expected) < 1e-9


@pytest.mark.parametrize("name", ["S2_round", "S3_group", "H3_half", "T2xR_exp"])
def test_curvature_against_coordinate_oracle(name):
    geom = geom_at(name, seed=13, count=4)
    n = geom.n
    oracle = ricci_coordinate(geom)
    worst = max(max_abs_value(geom.ric[i][j] - oracle[i][j])
                for i in range(n) for j in range(n))
    assert worst < 1e-8
    assert max_abs_value(geom.scal - scal_coordinate(geom)) < 1e-8


@pytest.mark.parametrize("name", ALL_FIXTURES)
def test_ricci_symmetric(name):
    geom = geom_at(name, seed=17, count=4)
    n = geom.n
    worst = max(max_abs_value(geom.ric[i][j] - geom.ric[j][i])
                for i in range(n) for j in range(n))
    assert worst < 1e-9


@pytest.mark.parametrize("name", ["S2_round", "S3_round", "H2_half", "H3_half",
                                  "T2xR_exp", "T2xR_wk_lor", "S3_group"])
def test_contracted_bianchi(name):
    """div(Ric - S/2 eta) = 0, computed with the generic machinery."""
    geom = geom_at(name, seed=19, count=4)
    n = geom.n
    T = [[geom.ric[i][j] for j in range(n)] for i in range(n)]
    for i in range(n):
        T[i][i] = T[i][i] - (0.5 * geom.chi[i]) * geom.scal
    div = geom.div_sym(T, sigma=1.0)
    assert max(max_abs_value(d) for d in div) < 1e-8


def test_div_of_scaled_metric_is_gradient():
    """div(f eta)(X) = sigma df(X) on the flat torus."""
    chart = REG.chart("T2_flat")
    pts = chart.sample_points(23, 8)
    geom = chart.geometry(pts, 4)
    f = (geom.x[0] + geom.x[1]).sin()
    n = geom.n
    T = [[(f * geom.chi[i] if i == j else 0.0 * f) for j in range(n)] for i in range(n)]
    for sigma in (1.0, -1.0):
        div = geom.div_sym(T, sigma=sigma)
        for k in range(n):
            df = geom.dirvec(k, f)
            assert max_abs_value(div[k] - sigma * df) < 1e-10


def test_scalar_ops_flat():
    chart = REG.chart("T2_flat")
    pts = chart.sample_points(29, 8)
    geom = chart.geometry(pts, 4)
    f = geom.x[0] * 1.0
    grad = geom.grad(f)
    assert max_abs_value(grad[0] - 1.0) < 1e-13
    assert max_abs_value(grad[1]) < 1e-13
    assert max_abs_value(geom.laplacian(f)) < 1e-12
    # sign convention: the 1d second derivative enters negated
    s = geom.x[0].sin()
    assert max_abs_value(geom.laplacian(s) - s) < 1e-11
    assert max_abs_value(geom.norm2_d(s) - geom.x[0].cos() ** 2) < 1e-12
    assert max_abs_value(geom.vol - 1.0) < 1e-13


def test_volume_density_warped():
    entry = REG.entry("T2xR_exp")
    spec = entry.warped_spec()
    chart = entry.build_chart()
    pts = chart.sample_points(31, 6)
    geom = chart.geometry(pts, 3)
    t = pts[:, -1]
    want = spec.A(t) ** 2 * spec.B(t)
    assert np.max(np.abs(np.asarray(geom.vol.value) - want)) < 1e-10


def test_degenerate_metric_raises():
    chart = REG.chart("S2_round")
    with pytest.raises(DegenerateMetric):
        chart.geometry(np.array([[np.pi, 1.0]]), 3)  # polar axis


def test_diag_rescale_frame():
    from edcheck.clifford import Signature
    from edcheck.geometry import Chart

    def metric_fn(x):
        zero = 0.0 * x[0]
        four = zero + 4.0
        one = zero + 1.0
        return [[four, zero], [zero, one]]

    chart = Chart("diag41", Signature(2, 0), metric_fn)
    geom = chart.geometry(np.zeros((1, 2)), 2)
    F = np.array([[float(geom.frame[i][a].value[0]) for a in range(2)]
                  for i in range(2)])
    assert np.allclose(F, [[0.5, 0.0], [0.0, 1.0]])


def test_minkowski_signature_order():
    geom = geom_at("R13_mink", seed=1, count=2)
    assert np.allclose(geom.chi, [1, 1, 1, -1])
