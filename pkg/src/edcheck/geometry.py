"""Coordinate charts, orthonormal frames, connection and curvature.

Everything is pointwise on a single chart: a Chart owns a metric function
mapping coordinate jets to a symmetric jet-valued matrix, and geometry(...)
evaluates the derived frame data at a batch of sample points.  All tensor
data is carried in frame components (the sign sequence chi soaks up the
indefinite metric), with the connection stored in lowered form

    omega[i][j][k] = eta(nabla_{E_i} E_j, E_k),

which is antisymmetric in the last two slots by metric compatibility.
Raising an index costs a chi factor: nabla_{E_i} E_j = sum_k chi(k)
omega[i][j][k] E_k.

Sign conventions (verified against closed forms in the test suite):

  * curvature  R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z
  * Ric(Y,Z) = sum_i chi(i) eta(R(E_i, Y) Z, E_i)   (round S^2 has S = +2)
  * laplacian(f) = -div(grad f)                      (so f'' enters with -1)
  * div(T)(X) = sigma * sum_i chi(i) (nabla_{E_i} T)(E_i, X)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .clifford import Signature
from .jets import Jet, seed_point


class DegenerateMetric(ValueError):
    """Gram-Schmidt pivot fell below the floor."""


_PIVOT_FLOOR = 1e-10


# -- small jet-matrix helpers ------------------------------------------------

def mat_vec(M, v):
    n = len(v)
    return [sum_jets(M[a][b] * v[b] for b in range(n)) for a in range(len(M))]


def mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum_jets(A[a][c] * B[c][b] for c in range(m)) for b in range(p)]
            for a in range(n)]


def sum_jets(items):
    items = list(items)
    out = items[0]
    for it in items[1:]:
        out = out + it
    return out


def mat_inv(M, order=None):
    """Inverse of a jet matrix via the terminating Neumann series.

    Splitting M = M0 + Mbar with M0 the value part, the series for
    (I + M0^-1 Mbar)^-1 terminates because Mbar has no constant term.
    """
    n = len(M)
    nv = M[0][0].nvars
    if order is None:
        order = min(m.order for row in M for m in row)
    vals = np.stack([np.stack([np.asarray(M[a][b].value, dtype=float)
                               for b in range(n)], axis=-1) for a in range(n)], axis=-2)
    inv0 = np.linalg.inv(vals)

    def const_mat(arr):
        return [[Jet.constant(nv, order, arr[..., a, b]) for b in range(n)]
                for a in range(n)]

    M0inv = const_mat(inv0)
    X = mat_mul(M0inv, [[M[a][b].truncate(order) for b in range(n)] for a in range(n)])
    for a in range(n):
        X[a][a] = X[a][a] - 1.0  # X = M0^-1 Mbar, zero constant term
    out = M0inv
    term = M0inv
    for _ in range(order):
        term = [[-sum_jets(X[a][c] * term[c][b] for c in range(n)) for b in range(n)]
                for a in range(n)]
        out = [[out[a][b] + term[a][b] for b in range(n)] for a in range(n)]
    return out


def mat_det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    out = None
    for j in range(n):
        minor = [[M[a][b] for b in range(n) if b != j] for a in range(1, n)]
        term = M[0][j] * mat_det(minor)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out


def mat_exp(M, terms=16):
    """exp of a jet matrix by plain series; callers keep the norm small."""
    n = len(M)
    nv = M[0][0].nvars
    order = min(m.order for row in M for m in row)
    out = [[Jet.constant(nv, order, (1.0 if a == b else 0.0) * np.ones(M[0][0].batch_shape))
            for b in range(n)] for a in range(n)]
    term = out
    for k in range(1, terms + 1):
        term = mat_mul(term, M)
        term = [[t / float(k) for t in row] for row in term]
        out = [[out[a][b] + term[a][b] for b in range(n)] for a in range(n)]
    return out


# -- charts ------------------------------------------------------------------

@dataclass
class Chart:
    """A coordinate chart with a jet-valued metric and optional fixed frame.

    metric_fn(x) takes the list of coordinate jets and returns the n x n
    jet matrix of the metric.  frame_fn, when given, must return an
    orthonormal frame (rows = frame vectors in coordinate components); it is
    used by the deformation / conformal machinery to realise matched frames.
    """

    name: str
    sig: Signature
    metric_fn: callable
    frame_fn: callable = None
    sample_box: tuple = None
    periods: tuple = None

    @property
    def n(self):
        return self.sig.n

    def coord_jets(self, points, order):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != self.n:
            raise ValueError("points have wrong dimension")
        return seed_point(self.n, order, points)

    def geometry(self, points, order=4):
        return PointGeometry(self, self.coord_jets(points, order), order)

    def sample_points(self, seed, count):
        if self.sample_box is None:
            raise ValueError(f"chart {self.name} has no sample box")
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.sample_box])
        hi = np.array([b[1] for b in self.sample_box])
        return lo + rng.uniform(size=(count, self.n)) * (hi - lo)


class PointGeometry:
    """Frame, connection and curvature data of one chart at a point batch."""

    def __init__(self, chart: Chart, x, order):
        self.chart = chart
        self.x = x
        self.order = order
        self.n = chart.n
        self.chi = chart.sig.chi_list
        self.g = chart.metric_fn(x)
        if chart.frame_fn is None:
            self.frame = self._gram_schmidt()
        else:
            self.frame = chart.frame_fn(x)

    # -- frame ---------------------------------------------------------------

    def metric_inner(self, u, v):
        return sum_jets(u[a] * self.g[a][b] * v[b]
                        for a in range(self.n) for b in range(self.n))

    def _gram_schmidt(self):
        """Signature-aware Gram-Schmidt on the coordinate basis.

        Processes coordinate directions in order, then reorders so that all
        spacelike frame vectors come first (stable), timelike last.
        """
        n = self.n
        built = []   # (vector comps, sign)
        batch = self.x[0].batch_shape
        for a in range(n):
            v = [Jet.constant(n, self.order, (1.0 if b == a else 0.0) * np.ones(batch))
                 for b in range(n)]
            for w, sgn in built:
                coef = self.metric_inner(w, v) * sgn
                v = [v[b] - coef * w[b] for b in range(n)]
            norm2 = self.metric_inner(v, v)
            vals = np.asarray(norm2.value)
            if np.any(np.abs(vals) < _PIVOT_FLOOR):
                raise DegenerateMetric(f"pivot below floor on chart {self.chart.name}")
            signs = np.sign(vals)
            if signs.size and not np.all(signs == signs.flat[0]):
                raise DegenerateMetric("frame sign pattern varies across batch")
            sgn = float(signs.flat[0]) if signs.size else float(signs)
            inv_norm = 1.0 / (norm2 * sgn).sqrt()
            built.append(([inv_norm * v[b] for b in range(n)], sgn))
        ordered = [vw for vw in built if vw[1] > 0] + [vw for vw in built if vw[1] < 0]
        signs = [vw[1] for vw in ordered]
        if not np.allclose(signs, self.chi):
            raise DegenerateMetric(
                f"metric index does not match signature on chart {self.chart.name}")
        return [vw[0] for vw in ordered]

    # -- derived fields ------------------------------------------------------

    def dirvec(self, i, f):
        """Directional derivative E_i(f) of a jet-valued scalar."""
        return sum_jets(self.frame[i][a] * f.derive(a) for a in range(self.n))

    @cached_property
    def gram(self):
        return [[self.metric_inner(self.frame[i], self.frame[j])
                 for j in range(self.n)] for i in range(self.n)]

    @cached_property
    def brackets(self):
        """[E_i, E_j] in coordinate components."""
        n = self.n
        out = [[None] * n for _ in range(n)]
        dF = [[[self.dirvec(i, self.frame[j][a]) for a in range(n)]
               for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                out[i][j] = [dF[i][j][a] - dF[j][i][a] for a in range(n)]
        return out

    @cached_property
    def omega(self):
        """Lowered connection coefficients eta(nabla_{E_i} E_j, E_k)."""
        n = self.n
        bk = [[[self.metric_inner(self.brackets[i][j], self.frame[k])
                for k in range(n)] for j in range(n)] for i in range(n)]
        return [[[0.5 * (bk[i][j][k] - bk[j][k][i] + bk[k][i][j])
                  for k in range(n)] for j in range(n)] for i in range(n)]

    def conn_coeff(self, i, j, m):
        """Coefficient of E_m in nabla_{E_i} E_j."""
        return self.omega[i][j][m] * self.chi[m]

    def cov_vector(self, i, v):
        """(nabla_{E_i} V)^k for a frame-component vector field V."""
        n = self.n
        return [self.dirvec(i, v[k]) +
                sum_jets(self.conn_coeff(i, c, k) * v[c] for c in range(n))
                for k in range(n)]

    def cov_sym2(self, i, T):
        """(nabla_{E_i} T)(E_j, E_k) for a frame-component (0,2) field."""
        n = self.n
        out = [[self.dirvec(i, T[j][k]) for k in range(n)] for j in range(n)]
        for j in range(n):
            for k in range(n):
                corr = sum_jets(self.conn_coeff(i, j, m) * T[m][k] +
                                self.conn_coeff(i, k, m) * T[j][m]
                                for m in range(n))
                out[j][k] = out[j][k] - corr
        return out

    def cov_endo(self, i, M):
        """(nabla_{E_i} M) for a frame-component (1,1) field."""
        n = self.n
        out = [[self.dirvec(i, M[a][b]) for b in range(n)] for a in range(n)]
        for a in range(n):
            for b in range(n):
                corr = sum_jets(self.conn_coeff(i, c, a) * M[c][b] -
                                M[a][c] * self.conn_coeff(i, b, c)
                                for c in range(n))
                out[a][b] = out[a][b] + corr
        return out

    @cached_property
    def curvature_coeffs(self):
        """R[i][j][k][m]: coefficient of E_m in R(E_i, E_j) E_k."""
        n = self.n
        G = [[[self.conn_coeff(i, j, m) for m in range(n)] for j in range(n)]
             for i in range(n)]
        c = [[[self.omega[i][j][m] * self.chi[m] - self.omega[j][i][m] * self.chi[m]
               for m in range(n)] for j in range(n)] for i in range(n)]
        R = [[[[None] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for m in range(n):
                        term = self.dirvec(i, G[j][k][m]) - self.dirvec(j, G[i][k][m])
                        term = term + sum_jets(
                            G[j][k][l] * G[i][l][m] - G[i][k][l] * G[j][l][m]
                            - c[i][j][l] * G[l][k][m] for l in range(n))
                        R[i][j][k][m] = term
        return R

    @cached_property
    def ric(self):
        n = self.n
        R = self.curvature_coeffs
        return [[sum_jets(R[i][j][k][i] for i in range(n)) for k in range(n)]
                for j in range(n)]

    @cached_property
    def scal(self):
        return sum_jets(self.chi[j] * self.ric[j][j] for j in range(self.n))

    @cached_property
    def vol(self):
        det = mat_det(self.g)
        sgn = (-1.0) ** self.chart.sig.r
        return (det * sgn).sqrt()

    # -- scalar calculus ------------------------------------------------------

    def grad(self, f):
        return [self.chi[k] * self.dirvec(k, f) for k in range(self.n)]

    def norm2_d(self, f):
        return sum_jets(self.chi[k] * self.dirvec(k, f) ** 2 for k in range(self.n))

    def div_vector(self, v):
        n = self.n
        return sum_jets(self.chi[i] * self.dirvec(i, v[i]) for i in range(n)) + \
            sum_jets(self.omega[i][c][i] * v[c] * self.chi[i]
                     for i in range(n) for c in range(n))

    def laplacian(self, f):
        return -self.div_vector(self.grad(f))

    def div_sym(self, T, sigma=1.0):
        """sigma-weighted divergence of a symmetric (0,2) field, as a covector."""
        n = self.n
        cov = [self.cov_sym2(i, T) for i in range(n)]
        return [sigma * sum_jets(self.chi[i] * cov[i][i][k] for i in range(n))
                for k in range(n)]

    def raise_form(self, w):
        """Frame components of the metric-dual vector of a covector."""
        return [self.chi[k] * w[k] for k in range(self.n)]

    def trace_sym(self, T):
        return sum_jets(self.chi[i] * T[i][i] for i in range(self.n))

    def sym2_inner(self, A, B):
        """Induced inner product on symmetric (0,2) tensors."""
        n = self.n
        return sum_jets(self.chi[i] * self.chi[j] * A[i][j] * B[i][j]
                        for i in range(n) for j in range(n))


def frame_components_of_coord_sym2(geom: PointGeometry, h_coord):
    """Convert a coordinate-component (0,2) tensor to frame components."""
    n = geom.n
    return [[sum_jets(geom.frame[i][a] * geom.frame[j][b] * h_coord[a][b]
                      for a in range(n) for b in range(n))
             for j in range(n)] for i in range(n)]


def max_abs_value(jet_or_list):
    """Max of |value| over a jet, or recursively over nested lists of jets."""
    if isinstance(jet_or_list, Jet):
        return float(np.max(np.abs(jet_or_list.value)))
    if isinstance(jet_or_list, (list, tuple)):
        vals = [max_abs_value(item) for item in jet_or_list]
        return max(vals) if vals else 0.0
    return float(np.max(np.abs(jet_or_list)))
