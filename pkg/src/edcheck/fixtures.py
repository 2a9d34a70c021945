"""Built-in chart fixtures and their canonical spinor fields.

The registry is a declarative JSON document (see fixtures.json for the
built-in one); each entry names a chart kind plus parameters.  Closed-form
solution fields (parallel spinors on flat charts, Killing spinors on the
hyperbolic half-space and on the group chart of the 3-sphere) live here so
the evaluator and test layers share one construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .clifford import Signature
from .geometry import Chart, mat_inv
from .jets import Jet
from .spincalc import SpinorField, constant_field, model_for
from .warped import WarpedSpec, warped_chart

TWO_PI = 2 * np.pi


def _flat_metric_fn(n, chi):
    def metric_fn(x):
        one = 0.0 * x[0] + 1.0
        zero = 0.0 * x[0]
        return [[(chi[a] * one if a == b else zero) for b in range(n)]
                for a in range(n)]
    return metric_fn


def _sphere_metric_fn(n, radius):
    # polar chart: g = R^2 (d c1^2 + sin^2 c1 d c2^2 [+ sin^2 c1 sin^2 c2 d c3^2])
    def metric_fn(x):
        zero = 0.0 * x[0]
        g = [[zero for _ in range(n)] for _ in range(n)]
        factor = Jet.constant(n, x[0].order, radius ** 2 * np.ones(x[0].batch_shape))
        for a in range(n):
            g[a][a] = factor
            factor = factor * x[a].sin() ** 2
        return g
    return metric_fn


def _hyperbolic_metric_fn(n):
    # upper half-space, g = (dx_1^2 + ... + dx_n^2) / x_n^2
    def metric_fn(x):
        zero = 0.0 * x[0]
        inv = 1.0 / (x[n - 1] * x[n - 1])
        return [[(inv if a == b else zero) for b in range(n)] for a in range(n)]
    return metric_fn


def _group_s3_coframe(x):
    """Half-scaled left-invariant coframe of the unit 3-sphere.

    Coordinates (a, b, c); rows are the coframe 1-forms in the coordinate
    basis (da, db, dc).  The dual frame has constant structure constants
    proportional to the alternating symbol, so constant spinor components
    give Killing spinors.
    """
    a, b, c = x
    zero = 0.0 * a
    one = zero + 1.0
    sa, ca = a.sin(), a.cos()
    sc, cc = c.sin(), c.cos()
    return [
        [0.5 * cc, 0.5 * sc * sa, zero],
        [-0.5 * sc, 0.5 * cc * sa, zero],
        [zero, 0.5 * ca, 0.5 * one],
    ]


def _group_s3_chart():
    sig = Signature(3, 0)

    def metric_fn(x):
        C = _group_s3_coframe(x)
        return [[sum(C[i][a] * C[i][b] for i in range(3)) for b in range(3)]
                for a in range(3)]

    def frame_fn(x):
        C = _group_s3_coframe(x)
        Cinv = mat_inv(C)
        return [[Cinv[a][i] for a in range(3)] for i in range(3)]

    return Chart(name="S3_group", sig=sig, metric_fn=metric_fn, frame_fn=frame_fn,
                 sample_box=((0.4, 2.7), (0.0, TWO_PI), (0.0, TWO_PI)))


@dataclass
class FixtureEntry:
    name: str
    kind: str
    n: int
    r: int
    params: dict

    def build_chart(self) -> Chart:
        n, r = self.n, self.r
        sig = Signature(n, r)
        chi = sig.chi_list
        if self.kind == "torus":
            box = ((0.0, TWO_PI),) * n
            return Chart(self.name, sig, _flat_metric_fn(n, chi), sample_box=box,
                         periods=(TWO_PI,) * n)
        if self.kind == "euclidean":
            return Chart(self.name, sig, _flat_metric_fn(n, chi),
                         sample_box=((-1.0, 1.0),) * n)
        if self.kind == "minkowski":
            periodic = bool(self.params.get("periodic", False))
            box = ((0.0, TWO_PI),) * n if periodic else ((-1.0, 1.0),) * n
            return Chart(self.name, sig, _flat_metric_fn(n, chi), sample_box=box,
                         periods=(TWO_PI,) * n if periodic else None)
        if self.kind == "sphere":
            if self.params.get("chart") == "group":
                return _group_s3_chart()
            radius = float(self.params.get("radius", 1.0))
            box = [(0.4, 2.7)] * (n - 1) + [(0.0, TWO_PI)]
            return Chart(self.name, sig, _sphere_metric_fn(n, radius),
                         sample_box=tuple(box))
        if self.kind == "hyperbolic":
            box = [(-1.0, 1.0)] * (n - 1) + [(0.5, 2.0)]
            return Chart(self.name, sig, _hyperbolic_metric_fn(n),
                         sample_box=tuple(box))
        if self.kind == "warped":
            return warped_chart(self.warped_spec())
        raise KeyError(f"unknown fixture kind {self.kind!r}")

    def warped_spec(self) -> WarpedSpec:
        if self.kind != "warped":
            raise KeyError(f"{self.name} is not a warped fixture")
        p = self.params
        return WarpedSpec(base_dim=self.n - 1, p=float(p["p"]),
                          warp=p.get("A", "exp"), coef=float(p.get("coef", 1.0)),
                          mu=float(p.get("mu", 2.0)),
                          chi_last=float(p.get("chi_last", 1)),
                          name=self.name)


class Registry:
    def __init__(self, entries):
        self.entries = {e.name: e for e in entries}

    @staticmethod
    def from_json(text: str) -> "Registry":
        doc = json.loads(text)
        entries = [FixtureEntry(name=e["name"], kind=e["kind"], n=int(e["n"]),
                                r=int(e["r"]), params=dict(e.get("params", {})))
                   for e in doc["fixtures"]]
        return Registry(entries)

    @staticmethod
    def builtin() -> "Registry":
        text = resources.files("edcheck").joinpath("fixtures.json").read_text()
        return Registry.from_json(text)

    @staticmethod
    def from_path(path) -> "Registry":
        with open(path, "r", encoding="utf-8") as fh:
            return Registry.from_json(fh.read())

    def names(self):
        return list(self.entries)

    def chart(self, name) -> Chart:
        return self.entries[name].build_chart()

    def entry(self, name) -> FixtureEntry:
        return self.entries[name]


# -- canonical spinor fields ---------------------------------------------------


def parallel_spinor(chart, comps=None, name="parallel"):
    """Constant-component field; parallel on flat charts."""
    cm = model_for(chart.sig)
    if comps is None:
        comps = np.zeros(cm.dim, dtype=complex)
        comps[0] = 1.0
    return constant_field(chart, comps, name=name)


def hyperbolic_killing_spinor(chart, branch=+1):
    """Killing field psi = x_n^{-1/2} phi0 with gamma_n phi0 = branch * i phi0.

    Satisfies nabla_X psi = (branch * i / 2) X . psi on the half-space chart;
    the Dirac eigenvalue is -(n/2) * branch * i.
    """
    cm = model_for(chart.sig)
    n = chart.n
    vals, vecs = np.linalg.eig(cm.gamma[n - 1])
    want = branch * 1j
    idx = int(np.argmin(np.abs(vals - want)))
    phi0 = vecs[:, idx]
    phi0 = phi0 / np.sqrt(np.vdot(phi0, phi0).real)
    # fix the overall phase deterministically
    k = int(np.argmax(np.abs(phi0)))
    phi0 = phi0 * np.exp(-1j * np.angle(phi0[k]))

    def fn(geom):
        w = geom.x[n - 1].pow(-0.5)
        return [w * Jet.constant(n, geom.order,
                                 np.broadcast_to(c, geom.x[0].batch_shape).copy())
                for c in phi0]

    return SpinorField(chart, fn, name=f"H{n}-killing{branch:+d}"), branch * 0.5j


def group_s3_killing_spinor(chart):
    """Constant-component field on the group chart of S^3.

    The left-invariant frame has constant connection coefficients, so any
    constant spinor is a real Killing spinor; the Killing constant is
    returned alongside (determined by the frame orientation).
    """
    cm = model_for(chart.sig)
    comps = np.zeros(cm.dim, dtype=complex)
    comps[0] = 1.0
    field = constant_field(chart, comps, name="S3-killing")
    # lambda from the structure constants: nabla_i psi = lambda gamma_i psi
    geom = chart.geometry(np.array([[1.1, 0.7, 0.3]]), order=2)
    from .spincalc import covderiv  # local import to avoid cycle at module load
    d = covderiv(geom, cm, field.eval(geom))
    g0psi = cm.gamma[0] @ comps
    num = complex(d[0][int(np.argmax(np.abs(g0psi)))].value[0])
    den = complex(g0psi[int(np.argmax(np.abs(g0psi)))])
    lam = num / den
    return field, lam


def polynomial_spinor(chart, seed, degree=2, scale=0.3, name=None):
    """Random polynomial-coefficient field for property checks."""
    cm = model_for(chart.sig)
    rng = np.random.default_rng(seed)
    n = chart.n
    N = cm.dim
    from .jets import monomials
    mons = [m for m in monomials(n, degree)]
    coefs = (rng.normal(size=(N, len(mons))) +
             1j * rng.normal(size=(N, len(mons)))) * scale
    coefs[:, 0] += rng.normal(size=N) + 1j * rng.normal(size=N)

    def fn(geom):
        out = []
        for c in range(N):
            acc = Jet.constant(n, geom.order,
                               np.zeros(geom.x[0].batch_shape, dtype=complex))
            for mono, coef in zip(mons, coefs[c]):
                term = Jet.constant(n, geom.order,
                                    coef * np.ones(geom.x[0].batch_shape))
                for var, power in enumerate(mono):
                    for _ in range(power):
                        term = term * geom.x[var]
                acc = acc + term
            out.append(acc)
        return out

    return SpinorField(chart, fn, name=name or f"poly{seed}")


def trig_spinor(chart, seed, modes=1, scale=0.3, name=None):
    """Random trigonometric-polynomial field, periodic on torus charts."""
    cm = model_for(chart.sig)
    rng = np.random.default_rng(seed)
    n = chart.n
    N = cm.dim
    kvecs = rng.integers(-modes, modes + 1, size=(3, n))
    amps = (rng.normal(size=(N, 3)) + 1j * rng.normal(size=(N, 3))) * scale
    base = rng.normal(size=N) + 1j * rng.normal(size=N)

    def fn(geom):
        out = []
        for c in range(N):
            acc = Jet.constant(n, geom.order,
                               base[c] * np.ones(geom.x[0].batch_shape, dtype=complex))
            for w, kv in zip(amps[c], kvecs):
                phase = None
                for var, k in enumerate(kv):
                    term = float(k) * geom.x[var]
                    phase = term if phase is None else phase + term
                acc = acc + w * phase.sin() + (0.5 * w) * phase.cos()
            out.append(acc)
        return out

    return SpinorField(chart, fn, name=name or f"trig{seed}")


def scalar_trig_field(chart, seed, modes=1, scale=0.3):
    """Random real trigonometric scalar field u(x) as a jet evaluator."""
    rng = np.random.default_rng(seed)
    n = chart.n
    kvecs = rng.integers(-modes, modes + 1, size=(3, n))
    amps = rng.normal(size=3) * scale

    def u_fn(x):
        acc = 0.0 * x[0]
        for w, kv in zip(amps, kvecs):
            phase = None
            for var, k in enumerate(kv):
                term = float(k) * x[var]
                phase = term if phase is None else phase + term
            acc = acc + w * phase.sin()
        return acc

    return u_fn
