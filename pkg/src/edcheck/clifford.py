"""Clifford algebra representation and indefinite spinor product.

Sign convention, fixed once for the whole engine:

    X . Y + Y . X = -2 eta(X, Y)

so a unit spacelike vector squares to -1 and a unit timelike vector to +1
under Clifford multiplication.  Timelike directions are always indexed
last; the sign sequence chi(i) = eta(E_i, E_i) lives on the Signature.

The spinor product <.,.> is realised as  <phi, psi> = phi^* A psi  with a
fixed matrix A ("adj"), conjugate-linear in the first slot.  A is a phase
times the product of the timelike gamma matrices; the phase is found by
exhaustive search at build time so that

    <gamma_i phi, psi> + (-1)^r <phi, gamma_i psi> = 0

holds for every generator and A is Hermitian or anti-Hermitian.  Searching
instead of hand-deriving the phase removes a classical source of sign
errors; all invariants are asserted during construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

_SIGMA = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


class CliffordBuildError(RuntimeError):
    """No adj phase satisfied the product invariants (signals a bug)."""


class ZeroLength(ValueError):
    """Spinor power of a (near-)null spinor."""


@dataclass(frozen=True)
class Signature:
    """Dimension n with r timelike (negative) directions, placed last."""

    n: int
    r: int

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.r <= self.n:
            raise ValueError(f"invalid signature ({self.n}, {self.r})")

    def chi(self, i: int) -> float:
        return -1.0 if i >= self.n - self.r else 1.0

    @property
    def chi_list(self) -> np.ndarray:
        return np.array([self.chi(i) for i in range(self.n)])

    @property
    def spinor_dim(self) -> int:
        return 2 ** (self.n // 2)


def _hermitian_generators(n: int) -> list[np.ndarray]:
    """Jordan-Wigner family: Hermitian, square to +1, anticommute."""
    width = max(n // 2, 1)

    def chain(mats):
        out = mats[0]
        for mat in mats[1:]:
            out = np.kron(out, mat)
        return out

    eye = np.eye(2, dtype=complex)
    gens = []
    for j in range(n // 2):
        head = [_SIGMA[2]] * j
        tail = [eye] * (width - j - 1)
        gens.append(chain(head + [_SIGMA[0]] + tail))
        gens.append(chain(head + [_SIGMA[1]] + tail))
    if n % 2:
        gens.append(chain([_SIGMA[2]] * width))
    return gens[:n]


@dataclass(frozen=True)
class CliffordModel:
    """Gamma matrices plus the indefinite spinor product for one signature."""

    sig: Signature
    gamma: tuple[np.ndarray, ...]
    adj: np.ndarray
    adj_hermitian: bool
    gamma2: tuple[tuple[np.ndarray, ...], ...] = field(repr=False, default=())

    @property
    def dim(self) -> int:
        return self.sig.spinor_dim

    # ``(sqrt(-1))^r`` and ``(-1)^r`` as they appear in the coupled systems.
    @property
    def i_r(self) -> complex:
        return 1j ** self.sig.r

    @property
    def m1_r(self) -> float:
        return (-1.0) ** self.sig.r

    def inner(self, phi, psi):
        """<phi, psi>, conjugate-linear in the first slot."""
        return np.conj(phi) @ self.adj @ psi

    def re_inner(self, phi, psi):
        return np.real(self.inner(phi, psi))

    def mul_vec(self, v, s):
        """Clifford action of a frame vector with components v on spinor s."""
        v = np.asarray(v)
        if v.shape[-1] != self.sig.n:
            raise ValueError("frame vector has wrong length")
        out = np.zeros_like(np.asarray(s, dtype=complex))
        for i in range(self.sig.n):
            out = out + v[..., i] * (self.gamma[i] @ s)
        return out

    def power_spinor(self, phi, k, floor=1e-10):
        """(sigma*phi, phi)^k phi together with sigma = sign (phi, phi)."""
        length = float(self.re_inner(phi, phi))
        if abs(length) < floor:
            raise ZeroLength("spinor power of a near-null spinor")
        sigma = 1.0 if length > 0 else -1.0
        return (sigma * length) ** k * np.asarray(phi, dtype=complex), sigma


@lru_cache(maxsize=None)
def build_clifford(sig: Signature) -> CliffordModel:
    n, r = sig.n, sig.r
    gens = _hermitian_generators(n)
    gamma = []
    for i in range(n):
        if sig.chi(i) > 0:
            gamma.append(1j * gens[i])       # square -1
        else:
            gamma.append(-gens[i])           # square +1
    N = sig.spinor_dim
    ident = np.eye(N)

    # Clifford relation is structural for this family; assert anyway.
    for i in range(n):
        for j in range(n):
            acom = gamma[i] @ gamma[j] + gamma[j] @ gamma[i]
            want = -2.0 * sig.chi(i) * ident if i == j else 0.0 * ident
            if np.max(np.abs(acom - want)) > 1e-12:
                raise CliffordBuildError(f"Clifford relation failed at ({i},{j})")

    base = ident.astype(complex)
    for i in range(n - r, n):
        base = base @ gamma[i]
    sign = (-1.0) ** r
    found = None
    for phase in (1.0, 1.0j, -1.0, -1.0j):
        adj = phase * base
        herm = np.max(np.abs(adj - adj.conj().T)) < 1e-12
        anti = np.max(np.abs(adj + adj.conj().T)) < 1e-12
        if not (herm or anti):
            continue
        ok = all(
            np.max(np.abs(g.conj().T @ adj + sign * adj @ g)) < 1e-12
            for g in gamma
        )
        if ok:
            found = (adj, herm)
            break
    if found is None:
        raise CliffordBuildError(f"no adj phase works for signature ({n},{r})")
    adj, herm = found
    if np.linalg.cond(adj) > 10:
        raise CliffordBuildError("adj is unexpectedly ill-conditioned")

    gamma2 = tuple(tuple(gamma[j] @ gamma[k] for k in range(n)) for j in range(n))
    return CliffordModel(sig=sig, gamma=tuple(gamma), adj=adj,
                         adj_hermitian=herm, gamma2=gamma2)


def clifford_mul(model: CliffordModel, v, s):
    return model.mul_vec(v, s)


def inner(model: CliffordModel, phi, psi):
    return model.inner(phi, psi)


def re_inner(model: CliffordModel, phi, psi):
    return model.re_inner(phi, psi)


def power_spinor(model: CliffordModel, phi, k, floor=1e-10):
    return model.power_spinor(phi, k, floor=floor)
