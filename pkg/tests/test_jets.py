import math

import numpy as np
import pytest
import sympy as sp

from edcheck.jets import (DivByZeroJet, DomainError, Jet, OrderExceeded,
                          monomials, seed_point)


def test_monomial_count():
    assert len(monomials(2, 4)) == math.comb(2 + 4, 4)
    assert len(monomials(4, 4)) == math.comb(4 + 4, 4)
    # lower order basis must be a prefix of the higher order basis
    assert monomials(3, 2) == monomials(3, 4)[: len(monomials(3, 2))]


def test_square_of_seeded_variable():
    x = Jet.variable(1, 2, 0, 3.0)
    sq = x * x
    assert np.allclose(sq.coeffs, [9.0, 6.0, 1.0])


def test_mul_commutes_and_division_roundtrip():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a = Jet(2, 3, rng.normal(size=10))
        b = Jet(2, 3, rng.normal(size=10))
        b.coeffs[0] += 3.0  # keep the value away from zero
        assert np.allclose((a * b).coeffs, (b * a).coeffs)
        assert np.max(np.abs(((a * b) / b - a).coeffs)) < 1e-13


def test_exp_series_coefficients():
    x = Jet.variable(1, 3, 0, 0.0)
    e = x.exp()
    assert np.allclose(e.coeffs, [1.0, 1.0, 0.5, 1.0 / 6.0])


def test_sin_derivative_matches_cos():
    x = Jet.variable(1, 4, 0, 0.7)
    s = x.sin()
    assert abs(s.partial((1,)) - math.cos(0.7)) < 1e-14


def test_mixed_partials_symmetric():
    x, y = seed_point(2, 4, [0.3, -0.2])
    f = (x * y).exp()
    assert abs(f.partial((1, 1)) - f.partial((1, 1))) == 0.0
    # Schwarz symmetry is structural for jets: one coefficient stores d1d2.
    g = x.sin() * y.cos() + (x * x * y).exp()
    d12 = g.derive(0).derive(1).value
    d21 = g.derive(1).derive(0).value
    assert abs(d12 - d21) < 1e-13


def test_partial_extraction():
    c = Jet.constant(3, 3, 2.5)
    assert c.partial((0, 1, 0)) == 0.0
    x = Jet.variable(3, 3, 1, 0.4)
    assert x.partial((0, 1, 0)) == 1.0
    x, y = seed_point(2, 3, [2.0, 3.0])
    f = x * x * y
    assert abs(f.partial((2, 1)) - 2.0) < 1e-14


def test_truncation_keeps_low_order_coefficients():
    x, y = seed_point(2, 4, [0.5, 1.5])
    f = (x + y * y).exp() * x.sin()
    g4 = f.coeffs[: len(monomials(2, 2))]
    g2 = f.truncate(2).coeffs
    assert np.array_equal(g4, g2)


def test_errors():
    x = Jet.variable(1, 2, 0, 0.0)
    with pytest.raises(DivByZeroJet):
        1.0 / x
    with pytest.raises(DomainError):
        x.log()
    with pytest.raises(OrderExceeded):
        x.partial((3,))
    with pytest.raises(OrderExceeded):
        Jet.constant(1, 0, 1.0).derive(0)


def test_batched_arithmetic_matches_scalar():
    rng = np.random.default_rng(3)
    pts = rng.uniform(0.5, 1.5, size=(8, 2))
    x, y = seed_point(2, 3, pts)
    f = (x * y).sqrt() + x / y
    for k in range(8):
        xs, ys = seed_point(2, 3, pts[k])
        fs = (xs * ys).sqrt() + xs / ys
        assert np.allclose(f.coeffs[k], fs.coeffs)


# Corpus of composite functions checked against sympy-computed derivatives.
_CORPUS = [
    "x*y + y**3",
    "exp(x*y)",
    "sin(x + 2*y)",
    "cos(x)*sin(y)",
    "sqrt(x + 3 + y**2)",
    "log(2 + x**2 + y**2)",
    "exp(sin(x) + cos(y))",
    "(x + 2)**Rational(3,2)",
    "1/(2 + x*y)",
    "sin(x*y)*exp(-x)",
    "log(3 + sin(x) + y)",
    "sqrt(4 + x)*cos(x + y)",
    "x**2*y**2/(1 + x**2)",
    "exp(x)*log(2 + y)",
    "sin(sin(x) + y**2)",
    "cos(exp(x*y/4))",
    "(1 + x**2 + y**2)**Rational(-1,2)",
    "exp(x - y)*sin(x + y)",
    "log(2 + exp(x*y))",
    "sqrt(2 + cos(x) + sin(y))",
]


@pytest.mark.parametrize("expr_str", _CORPUS)
def test_against_sympy_oracle(expr_str):
    xs, ys = sp.symbols("x y")
    expr = sp.sympify(expr_str, locals={"x": xs, "y": ys, "Rational": sp.Rational})
    rng = np.random.default_rng(hash(expr_str) % 2**32)
    pt = rng.uniform(0.1, 0.6, size=2)
    x, y = seed_point(2, 4, pt)
    env = {"x": x, "y": y, "exp": lambda j: j.exp(), "sin": lambda j: j.sin(),
           "cos": lambda j: j.cos(), "sqrt": lambda j: j.sqrt(),
           "log": lambda j: j.log(), "Rational": lambda p, q: p / q}
    jet = eval(expr_str.replace("Rational(3,2)", "1.5").replace("Rational(-1,2)", "-0.5"), env)
    for multi in monomials(2, 4):
        want = complex(sp.diff(expr, xs, multi[0], ys, multi[1]).subs({xs: pt[0], ys: pt[1]}))
        got = complex(jet.partial(multi))
        scale = max(1.0, abs(want))
        assert abs(got - want) / scale < 1e-12
