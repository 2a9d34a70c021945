"""Independent coordinate-based oracles for the geometry pipeline.

Everything here works from partial derivatives of the coordinate metric via
jets only (no frames, no Koszul formula), so it provides a second
computation path for connection and curvature data.
"""

import numpy as np

from edcheck.geometry import mat_inv, sum_jets


def christoffels(geom):
    """Coordinate Christoffel symbols Gamma^c_{ab} as jets."""
    n = geom.n
    g = geom.g
    ginv = mat_inv(g)
    dg = [[[g[a][b].derive(c) for c in range(n)] for b in range(n)] for a in range(n)]
    Gam = [[[None] * n for _ in range(n)] for _ in range(n)]
    for c in range(n):
        for a in range(n):
            for b in range(n):
                Gam[c][a][b] = 0.5 * sum_jets(
                    ginv[c][d].truncate(dg[0][0][0].order) *
                    (dg[b][d][a] + dg[a][d][b] - dg[a][b][d])
                    for d in range(n))
    return Gam


def omega_from_christoffels(geom):
    """Frame connection coefficients from the coordinate Christoffels."""
    n = geom.n
    Gam = christoffels(geom)
    F = geom.frame
    g = geom.g
    out = [[[None] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # nabla_{E_i} E_j in coordinate components
            comps = []
            for c in range(n):
                val = sum_jets(F[i][a] * F[j][c].derive(a) for a in range(n))
                val = val + sum_jets(Gam[c][a][b] * F[i][a] * F[j][b]
                                     for a in range(n) for b in range(n))
                comps.append(val)
            for k in range(n):
                out[i][j][k] = sum_jets(comps[a] * g[a][b] * F[k][b]
                                        for a in range(n) for b in range(n))
    return out


def ricci_coordinate(geom):
    """Coordinate Ricci tensor from Christoffel derivatives, then moved to
    the frame; fixes the contraction so the round 2-sphere has S = +2."""
    n = geom.n
    Gam = christoffels(geom)
    ric = [[None] * n for _ in range(n)]
    for b in range(n):
        for c in range(n):
            term = sum_jets(Gam[a][b][c].derive(a) for a in range(n))
            term = term - sum_jets(Gam[a][a][b].derive(c) for a in range(n))
            term = term + sum_jets(Gam[a][a][d] * Gam[d][b][c]
                                   for a in range(n) for d in range(n))
            term = term - sum_jets(Gam[a][c][d] * Gam[d][a][b]
                                   for a in range(n) for d in range(n))
            ric[b][c] = term
    F = geom.frame
    return [[sum_jets(F[i][a] * F[j][b] * ric[a][b]
                      for a in range(n) for b in range(n))
             for j in range(n)] for i in range(n)]


def scal_coordinate(geom):
    ric_f = ricci_coordinate(geom)
    return sum_jets(geom.chi[i] * ric_f[i][i] for i in range(geom.n))


def finite_difference_div(chart, tensor_field_fn, point, sigma, order=4, h=1e-5):
    """Crude centered-difference divergence of a frame tensor field.

    tensor_field_fn(geom) must return frame components; used only on flat
    charts where frame transport is trivial.
    """
    point = np.asarray(point, dtype=float)
    n = chart.n
    geom0 = chart.geometry(point[None, :], order)
    chi = chart.sig.chi_list
    out = []
    for k in range(n):
        total = 0.0
        for i in range(n):
            dp = point.copy()
            dm = point.copy()
            dp[i] += h
            dm[i] -= h
            Tp = tensor_field_fn(chart.geometry(dp[None, :], order))
            Tm = tensor_field_fn(chart.geometry(dm[None, :], order))
            deriv = (np.asarray(Tp[i][k].value) - np.asarray(Tm[i][k].value)) / (2 * h)
            total += chi[i] * float(deriv[0])
        out.append(sigma * total)
    return np.array(out)
