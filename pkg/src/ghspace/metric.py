"""Finite metric spaces as validated distance matrices.

A :class:`DistanceMatrix` is the only way other modules receive a metric
space; constructing one runs the full axiom check.  The scalar invariants
(diameter, codiameter) and the pointwise predicates used by the genericity
experiments live here as plain functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    NegativeOrZeroOffDiagonal,
    NonZeroDiagonal,
    NotFinite,
    NotSquare,
    NotSymmetric,
    SinglePoint,
    TooFewPoints,
    TriangleViolation,
)

DEFAULT_TOL = 1e-9


class DistanceMatrix:
    """An immutable, validated n x n distance matrix.

    Use :func:`validate` (or the constructor, which calls it) to build one.
    The underlying array is exposed read-only as ``d``.
    """

    __slots__ = ("_d",)

    def __init__(self, raw, tol: float = DEFAULT_TOL):
        d = _check_axioms(raw, tol)
        d.setflags(write=False)
        self._d = d

    @classmethod
    def _trusted(cls, d: np.ndarray) -> "DistanceMatrix":
        # internal fast path for matrices already known to be valid
        obj = cls.__new__(cls)
        d = np.array(d, dtype=float)
        d.setflags(write=False)
        obj._d = d
        return obj

    @property
    def d(self) -> np.ndarray:
        return self._d

    @property
    def n(self) -> int:
        return self._d.shape[0]

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"DistanceMatrix(n={self.n})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistanceMatrix):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._d, other._d))

    def __hash__(self) -> int:
        return hash(self._d.tobytes())

    def permuted(self, perm: Sequence[int]) -> "DistanceMatrix":
        """Relabel points: new point ``i`` is old point ``perm[i]``."""
        p = np.asarray(perm, dtype=int)
        return DistanceMatrix._trusted(self._d[np.ix_(p, p)])

    def subspace(self, indices: Sequence[int]) -> "DistanceMatrix":
        idx = np.asarray(indices, dtype=int)
        return DistanceMatrix._trusted(self._d[np.ix_(idx, idx)])


def _check_axioms(raw, tol: float) -> np.ndarray:
    d = np.array(raw, dtype=float)
    if d.ndim == 0 and d.size == 1:
        d = d.reshape(1, 1)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise NotSquare(d.shape)
    bad = np.argwhere(~np.isfinite(d))
    if bad.size:
        raise NotFinite(*map(int, bad[0]))
    diag = np.flatnonzero(np.diag(d) != 0.0)
    if diag.size:
        raise NonZeroDiagonal(int(diag[0]))
    asym = np.argwhere(d != d.T)
    if asym.size:
        i, j = sorted(map(int, asym[0]))
        raise NotSymmetric(i, j)
    off = ~np.eye(d.shape[0], dtype=bool)
    nonpos = np.argwhere(off & (d <= 0.0))
    if nonpos.size:
        raise NegativeOrZeroOffDiagonal(*map(int, nonpos[0]))
    # row slab i: slack[j, k] = d(i,k) + d(k,j) - d(i,j); first hit is lexicographic
    for i in range(d.shape[0]):
        slack = d[i][None, :] + d - d[i][:, None]
        viol = np.argwhere(slack < -tol)
        if viol.size:
            j, k = map(int, viol[0])
            raise TriangleViolation(i, j, k, float(-slack[j, k]))
    return d


def validate(raw, tol: float = DEFAULT_TOL) -> DistanceMatrix:
    """Check the metric axioms and return a :class:`DistanceMatrix`.

    Raises the first violated axiom (diagonal, symmetry, positivity,
    triangle inequality with slack ``tol``) with the offending indices.
    """
    return DistanceMatrix(raw, tol=tol)


def diameter(X: DistanceMatrix) -> float:
    return float(X.d.max())


def codiameter(X: DistanceMatrix) -> float:
    """Smallest non-zero distance."""
    if X.n < 2:
        raise SinglePoint("codiameter")
    return float(X.d[~np.eye(X.n, dtype=bool)].min())


def eccentricities(X: DistanceMatrix) -> np.ndarray:
    return X.d.max(axis=1)


def _pairs(X: DistanceMatrix) -> tuple[np.ndarray, np.ndarray]:
    iu, ju = np.triu_indices(X.n, k=1)
    return np.stack([iu, ju], axis=1), X.d[iu, ju]


def is_totally_anisometric(
    X: DistanceMatrix, tol: float = DEFAULT_TOL
) -> tuple[bool, list[tuple[tuple[int, int], tuple[int, int]]]]:
    """Do distinct unordered pairs have distinct distances?

    Returns the verdict and every colliding couple of pairs, i.e. pairs whose
    distances differ by at most ``tol``.
    """
    pairs, values = _pairs(X)
    order = np.argsort(values, kind="stable")
    collisions = []
    for a in range(len(order)):
        p = order[a]
        for b in range(a + 1, len(order)):
            q = order[b]
            if values[q] - values[p] > tol:
                break
            first, second = sorted([tuple(map(int, pairs[p])), tuple(map(int, pairs[q]))])
            collisions.append((first, second))
    collisions.sort()
    return not collisions, collisions


def collinear_triples(
    X: DistanceMatrix, epsilon: float = 0.0, tol: float = DEFAULT_TOL
) -> list[tuple[int, int, int]]:
    """Triples ``(i, j, k)`` with ``d(i,j) = d(i,k) + d(k,j)`` up to ``tol``.

    Both summands must be at least ``epsilon``.  Each geometric triple is
    reported once per choice of middle point ``k`` with ``i < j``.
    """
    d = X.d
    upper = np.triu(np.ones((X.n, X.n), dtype=bool), k=1)
    out = []
    for k in range(X.n):
        hit = np.abs(d - d[:, k][:, None] - d[k][None, :]) <= tol
        hit &= upper & (d[:, k] >= epsilon)[:, None] & (d[k] >= epsilon)[None, :]
        hit[k, :] = False
        hit[:, k] = False
        out.extend((int(i), int(j), k) for i, j in np.argwhere(hit))
    out.sort()
    return out


def isolation_profile(X: DistanceMatrix) -> np.ndarray:
    """Nearest-neighbour distance of every point.

    A point is isolated at scale ``s`` when its value exceeds ``s``.
    """
    if X.n < 2:
        raise SinglePoint("isolation_profile")
    d = X.d + np.diag(np.full(X.n, np.inf))
    return d.min(axis=1)


class Component(NamedTuple):
    members: tuple[int, ...]
    diameter: float


def components_at_scale(X: DistanceMatrix, delta: float) -> list[Component]:
    """Connected components of the graph joining points at distance <= delta.

    Components are listed by their smallest member.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    n = X.n
    adj = X.d <= delta
    label = np.full(n, -1)
    comps = []
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = len(comps)
        stack, members = [start], [start]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(adj[u] & (label < 0)):
                label[v] = len(comps)
                stack.append(int(v))
                members.append(int(v))
        members.sort()
        comps.append(Component(tuple(members), float(X.d[np.ix_(members, members)].max())))
    return comps


class DistanceSet(NamedTuple):
    values: list[float]
    gaps: list[float]


def distance_set(X: DistanceMatrix) -> DistanceSet:
    """The set of distance values (0 included) and its consecutive gaps."""
    values = np.unique(X.d)
    return DistanceSet([float(v) for v in values], [float(g) for g in np.diff(values)])


def _cm_exact(r, s, t, r2, s2, t2) -> Fraction:
    # squared edges; (p, P), (q, Q), (u, U) are the opposite-edge pairs
    p, q, u = (Fraction(x) ** 2 for x in (r, s, t))
    P, Q, U = (Fraction(x) ** 2 for x in (r2, s2, t2))
    v = (
        p * P * (q + Q + u + U - p - P)
        + q * Q * (p + P + u + U - q - Q)
        + u * U * (p + P + q + Q - u - U)
        - p * q * u
        - p * Q * U
        - P * q * U
        - P * Q * u
    )
    return v / 144


def cayley_menger(r: float, s: float, t: float, r2: float, s2: float, t2: float) -> float:
    """Cayley-Menger volume form of a 4-point configuration.

    ``r, s, t`` are the sides of one face and ``r2, s2, t2`` the edges opposite
    to them.  The value is the squared volume of the tetrahedron when one
    exists; a negative value rules out an isometric embedding in R^3 (and in
    any Hilbert space).  Evaluated in exact rational arithmetic on the binary
    values of the inputs, then rounded once.
    """
    args = (r, s, t, r2, s2, t2)
    if any(a < 0 for a in args):
        raise ValueError("edge lengths must be non-negative")
    return float(_cm_exact(*args))


def cayley_menger_of(X: DistanceMatrix, a0: int, a1: int, a2: int, a3: int) -> float:
    d = X.d
    return cayley_menger(
        d[a1, a2], d[a2, a3], d[a3, a1], d[a0, a3], d[a0, a1], d[a0, a2]
    )


def min_cayley_menger(X: DistanceMatrix) -> tuple[float, tuple[int, int, int, int]]:
    """Minimum of the Cayley-Menger form over all 4-point subsets.

    Each subset is evaluated once, labelled in increasing index order.  Ties go
    to the lexicographically first subset.
    """
    if X.n < 4:
        raise TooFewPoints(4, X.n)
    best, witness = None, None
    for quad in combinations(range(X.n), 4):
        v = _cm_exact(*(X.d[a, b] for a, b in (
            (quad[1], quad[2]), (quad[2], quad[3]), (quad[3], quad[1]),
            (quad[0], quad[3]), (quad[0], quad[1]), (quad[0], quad[2]),
        )))
        if best is None or v < best:
            best, witness = v, quad
    return float(best), witness


@dataclass
class PropertyReport:
    """All finite-instance genericity predicates evaluated on one space."""

    n: int
    anisometric: bool
    collisions: list
    collinear_triples: list[tuple[int, int, int]]
    isolation_scale: list[float]
    component_count_at: dict[float, int]
    min_cayley_menger: float | None
    cayley_menger_witness: tuple[int, int, int, int] | None
    distance_set: list[float] = field(default_factory=list)

    @property
    def max_isolation(self) -> float:
        return max(self.isolation_scale) if self.isolation_scale else 0.0

    @property
    def embeddable_obstruction(self) -> bool:
        return self.min_cayley_menger is not None and self.min_cayley_menger < 0


def property_report(
    X: DistanceMatrix,
    epsilon: float = 0.0,
    deltas: Sequence[float] = (),
    tol: float = DEFAULT_TOL,
) -> PropertyReport:
    anis, coll = is_totally_anisometric(X, tol)
    if X.n >= 4:
        cm, quad = min_cayley_menger(X)
    else:
        cm, quad = None, None
    return PropertyReport(
        n=X.n,
        anisometric=anis,
        collisions=coll,
        collinear_triples=collinear_triples(X, epsilon, tol),
        isolation_scale=[float(v) for v in isolation_profile(X)] if X.n >= 2 else [],
        component_count_at={float(dl): len(components_at_scale(X, dl)) for dl in deltas},
        min_cayley_menger=cm,
        cayley_menger_witness=quad,
        distance_set=distance_set(X).values,
    )
