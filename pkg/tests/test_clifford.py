import numpy as np
import pytest

from edcheck.clifford import (CliffordModel, Signature, ZeroLength,
                              build_clifford, clifford_mul, inner, power_spinor,
                              re_inner)

SIGNATURES = [(2, 0), (3, 0), (4, 0), (5, 0), (2, 1), (3, 1), (4, 1)]


def _random_spinors(model, rng, count):
    N = model.dim
    return (rng.normal(size=(count, N)) + 1j * rng.normal(size=(count, N)))


@pytest.mark.parametrize("n,r", SIGNATURES)
def test_clifford_relation(n, r):
    model = build_clifford(Signature(n, r))
    assert model.dim == 2 ** (n // 2)
    ident = np.eye(model.dim)
    for i in range(n):
        for j in range(n):
            acom = model.gamma[i] @ model.gamma[j] + model.gamma[j] @ model.gamma[i]
            want = -2.0 * model.sig.chi(i) * ident if i == j else 0.0
            assert np.max(np.abs(acom - want)) < 1e-12


@pytest.mark.parametrize("n,r", SIGNATURES)
def test_adjoint_antisymmetry(n, r):
    model = build_clifford(Signature(n, r))
    rng = np.random.default_rng(42 + 10 * n + r)
    phis = _random_spinors(model, rng, 100)
    psis = _random_spinors(model, rng, 100)
    worst = 0.0
    for phi, psi in zip(phis, psis):
        for i in range(n):
            resid = inner(model, model.gamma[i] @ phi, psi) + \
                model.m1_r * inner(model, phi, model.gamma[i] @ psi)
            worst = max(worst, abs(resid))
    assert worst < 1e-12


@pytest.mark.parametrize("n,r", SIGNATURES)
def test_real_part_identities(n, r):
    """The three pointwise identities tying the product to the metric."""
    model = build_clifford(Signature(n, r))
    rng = np.random.default_rng(977 + 10 * n + r)
    chi = model.sig.chi_list
    for _ in range(100):
        psi = _random_spinors(model, rng, 1)[0]
        x = rng.normal(size=n)
        y = rng.normal(size=n)
        eta_xy = float(np.sum(chi * x * y))
        eta_xx = float(np.sum(chi * x * x))
        length = re_inner(model, psi, psi)
        xs = clifford_mul(model, x, psi)
        ys = clifford_mul(model, y, psi)
        assert abs(re_inner(model, model.i_r * xs, psi)) < 1e-12 * (1 + abs(length))
        assert abs(re_inner(model, xs, ys) - model.m1_r * eta_xy * length) < 1e-11
        assert abs(re_inner(model, clifford_mul(model, x, ys), psi) + eta_xy * length) < 1e-11
        # X.X.psi = -eta(X,X) psi
        assert np.max(np.abs(clifford_mul(model, x, xs) + eta_xx * psi)) < 1e-11


def test_basis_multiplication_is_gamma():
    model = build_clifford(Signature(3, 0))
    rng = np.random.default_rng(1)
    s = _random_spinors(model, rng, 1)[0]
    for i in range(3):
        v = np.zeros(3)
        v[i] = 1.0
        assert np.allclose(clifford_mul(model, v, s), model.gamma[i] @ s)


def test_adj_condition_number():
    for n, r in SIGNATURES:
        model = build_clifford(Signature(n, r))
        assert np.linalg.cond(model.adj) < 10


def test_inner_real_for_hermitian_adj():
    model = build_clifford(Signature(4, 1))
    assert model.adj_hermitian or np.max(np.abs(model.adj + model.adj.conj().T)) < 1e-12
    rng = np.random.default_rng(5)
    psi = _random_spinors(model, rng, 1)[0]
    if model.adj_hermitian:
        assert abs(np.imag(inner(model, psi, psi))) < 1e-12


def test_power_spinor():
    model = build_clifford(Signature(4, 1))
    rng = np.random.default_rng(11)
    phi = None
    while phi is None:
        cand = _random_spinors(model, rng, 1)[0]
        if abs(re_inner(model, cand, cand)) > 0.1:
            phi = cand
    out, sigma = power_spinor(model, phi, 0.0)
    assert np.allclose(out, phi)
    out, sigma = power_spinor(model, phi, -0.5)
    assert abs(sigma * re_inner(model, out, out) - 1.0) < 1e-12
    # scale phi so that (phi, phi) = 4 with sigma = +1, then k = 1 gives 4 phi
    model30 = build_clifford(Signature(3, 0))
    psi = np.array([1.0, 1.0]) / np.sqrt(2)
    psi = 2.0 * psi / np.sqrt(re_inner(model30, psi, psi))
    out, sigma = power_spinor(model30, psi, 1.0)
    assert sigma == 1.0
    assert np.allclose(out, 4.0 * psi)
    with pytest.raises(ZeroLength):
        power_spinor(model, np.zeros(model.dim), 1.0)


def test_signature_validation():
    with pytest.raises(ValueError):
        Signature(2, 3)
