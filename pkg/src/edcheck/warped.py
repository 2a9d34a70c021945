"""Warped products over flat bases and their spinor transports.

The metric is  A(t)^2 sum_i dx_i (x) dx_i + chi_last B(t)^2 dt (x) dt  on
base x line, with the two warping functions tied by  B = (A^p)_t  for a
nonzero factor p.  With that tie the slice second fundamental form and the
curvature collapse to closed forms (verified against the generic pipeline),
and for p = n/2 resp. p = (n+1)/2 a parallel base spinor can be transported
along t into a weak-Killing resp. harmonic constrained spinor by solving a
linear ODE with closed-form solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clifford import Signature
from .geometry import Chart
from .jets import Jet
from .spincalc import SpinorField, apply_const_matrix, model_for


class NonPositiveWarping(ValueError):
    """A or B fails to stay positive on the working interval."""


class NonAdmissible(ValueError):
    """Construction parameters outside the admissible range."""


@dataclass(frozen=True)
class WarpedSpec:
    """Parameters of one warped fixture.

    base_dim: dimension n of the flat base (torus or plane; both flat).
    warp: "exp" -> A = exp(coef * t); "power" -> A = (t + coef)^mu.
    p: the warp-tie factor, B = (A^p)_t.
    chi_last: sign of the t-direction, +1 or -1.
    interval: working t-range.
    """

    base_dim: int
    p: float
    warp: str = "exp"
    coef: float = 1.0
    mu: float = 2.0
    chi_last: float = 1.0
    interval: tuple = (-1.0, 1.0)
    base_periodic: bool = True
    name: str = ""

    @property
    def dim(self):
        return self.base_dim + 1

    @property
    def sig(self):
        return Signature(self.dim, 0 if self.chi_last > 0 else 1)

    def A(self, t):
        """Warping function of a jet (or float) t."""
        if self.warp == "exp":
            return (t * self.coef).exp() if isinstance(t, Jet) else np.exp(t * self.coef)
        if self.warp == "power":
            base = t + self.coef
            return base.pow(self.mu) if isinstance(t, Jet) else base ** self.mu
        raise ValueError(f"unknown warp kind {self.warp!r}")

    def B(self, t):
        """B = (A^p)_t = p A^(p-1) A_t in closed form."""
        if self.warp == "exp":
            lam = self.coef
            if isinstance(t, Jet):
                return self.p * lam * (t * (self.p * lam)).exp()
            return self.p * lam * np.exp(self.p * lam * t)
        if self.warp == "power":
            base = t + self.coef
            if isinstance(t, Jet):
                return self.p * self.mu * base.pow(self.p * self.mu - 1.0)
            return self.p * self.mu * base ** (self.p * self.mu - 1.0)
        raise ValueError(f"unknown warp kind {self.warp!r}")

    def validate(self):
        ts = np.linspace(self.interval[0], self.interval[1], 41)
        if np.any(self.A(ts) <= 0) or np.any(self.B(ts) <= 0):
            raise NonPositiveWarping(
                f"warping data not positive on {self.interval} for {self}")


def warped_chart(spec: WarpedSpec) -> Chart:
    spec.validate()
    n = spec.base_dim
    m = spec.dim

    def metric_fn(x):
        t = x[n]
        A2 = spec.A(t) ** 2
        B2 = spec.B(t) ** 2
        zero = 0.0 * A2
        g = [[zero for _ in range(m)] for _ in range(m)]
        for i in range(n):
            g[i][i] = A2
        g[n][n] = spec.chi_last * B2
        return g

    base_box = (0.0, 2 * np.pi) if spec.base_periodic else (-1.0, 1.0)
    box = tuple([base_box] * n + [spec.interval])
    return Chart(name=spec.name or f"warped{n}d_{spec.warp}_p{spec.p}",
                 sig=spec.sig, metric_fn=metric_fn, sample_box=box,
                 periods=(2 * np.pi,) * n + (None,) if spec.base_periodic else None)


def closed_form_geometry(spec: WarpedSpec, t):
    """Slice form Theta, frame Ricci and scalar curvature in closed form."""
    n = spec.base_dim
    p = spec.p
    chi = spec.chi_last
    A = spec.A(t)
    Amp = A ** (-p)
    theta = -(1.0 / p) * Amp
    ric_base = chi * (p - n) * p ** (-2) * Amp ** 2
    ric_tt = n * (p - 1) * p ** (-2) * Amp ** 2
    scal = chi * n * (2 * p - n - 1) * p ** (-2) * Amp ** 2
    return {"theta_diag": theta, "ric_base_diag": ric_base,
            "ric_tt": ric_tt, "ric_mixed": 0.0, "scal": scal}


def _transport_field(spec: WarpedSpec, chart, psi0, kappa):
    """Field A^{-n/2} exp(kappa * A^p * gamma_last) psi0, slice-constant.

    kappa = 0 gives the harmonic transport; kappa = -i^{3r} nu1 the
    weak-Killing transport.  gamma_last^2 = -chi_last, so the exponential
    splits into even/odd parts computed from scalar jet exponentials.
    """
    n = spec.base_dim
    cm = model_for(spec.sig)
    g_last = cm.gamma[n]
    psi0 = np.asarray(psi0, dtype=complex)
    gpsi0 = g_last @ psi0

    def fn(geom):
        t = geom.x[n]
        A = spec.A(t)
        lam = A.pow(-0.5 * n)
        comps = [lam * Jet.constant(geom.n, geom.order,
                                    np.broadcast_to(c, t.batch_shape).copy())
                 for c in psi0]
        if kappa != 0:
            s = kappa * A.pow(spec.p)
            # exp(s G) with G^2 = -chi: even part cosh(s q), odd sinh(s q)/q,
            # q = sqrt(-chi) in {1, i}.
            q = 1.0 if spec.chi_last < 0 else 1.0j
            eplus = (s * q).exp()
            eminus = (s * (-q)).exp()
            even = 0.5 * (eplus + eminus)
            odd = (0.5 / q) * (eplus - eminus)
            comps = [lam * (even * Jet.constant(geom.n, geom.order,
                                                np.broadcast_to(c, t.batch_shape).copy())
                            + odd * Jet.constant(geom.n, geom.order,
                                                 np.broadcast_to(gc, t.batch_shape).copy()))
                     for c, gc in zip(psi0, gpsi0)]
        return comps

    return SpinorField(chart, fn, name="warped-transport")


def construct_wk_spinor(spec: WarpedSpec, nu1: float, psi0=None):
    """Transport of a parallel base spinor solving the weak Killing equation.

    Requires the weak-Killing tie p = n/2 and nu1 != 0.  Returns the chart
    and the spinor field; components are constant on slices.
    """
    if nu1 == 0:
        raise NonAdmissible("weak Killing number must be nonzero")
    n = spec.base_dim
    if abs(spec.p - n / 2) > 1e-12:
        raise NonAdmissible(f"weak Killing transport needs p = n/2, got {spec.p}")
    chart = warped_chart(spec)
    cm = model_for(spec.sig)
    if psi0 is None:
        psi0 = np.zeros(cm.dim, dtype=complex)
        psi0[0] = 1.0
    r = spec.sig.r
    kappa = -(1j ** (3 * r)) * nu1
    return chart, _transport_field(spec, chart, psi0, kappa)


def construct_reduced_wp_spinor(spec: WarpedSpec, psi0=None):
    """Transport of a parallel base spinor solving the harmonic constrained
    equation; requires the tie p = (n+1)/2."""
    n = spec.base_dim
    if abs(spec.p - (n + 1) / 2) > 1e-12:
        raise NonAdmissible(f"reduced transport needs p = (n+1)/2, got {spec.p}")
    chart = warped_chart(spec)
    cm = model_for(spec.sig)
    if psi0 is None:
        psi0 = np.zeros(cm.dim, dtype=complex)
        psi0[0] = 1.0
    return chart, _transport_field(spec, chart, psi0, 0.0)


def conformal_factor_field(spec: WarpedSpec):
    """u = -log A as a function of the chart coordinate jets."""
    n = spec.base_dim

    def u_fn(x):
        return -(spec.A(x[n]).log())

    return u_fn
