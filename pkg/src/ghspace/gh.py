"""Gromov-Hausdorff distance between finite metric spaces.

The exact solver minimises the distortion over correspondences of the form
``graph(f) | graph(g)`` with ``f: X -> Y`` and ``g: Y -> X``.  Every
correspondence contains one of these, and dropping pairs never increases
distortion, so the restriction loses nothing.

Internally the search works with distortions; reported values are halved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    CardinalityMismatch,
    EmptySubset,
    IndexOutOfRange,
    NotACorrespondence,
    NotIsometricEmbedding,
)
from .metric import DistanceMatrix, codiameter, diameter, eccentricities

DEFAULT_BUDGET = 1_000_000


@dataclass(frozen=True)
class Correspondence:
    """A relation between the points of two spaces, stored as index pairs."""

    pairs: frozenset

    def __init__(self, pairs):
        object.__setattr__(self, "pairs", frozenset((int(i), int(j)) for i, j in pairs))

    @classmethod
    def from_maps(cls, f: Sequence[int], g: Sequence[int]) -> "Correspondence":
        """``graph(f) | graph(g)`` for ``f: X -> Y`` and ``g: Y -> X``."""
        return cls([(x, y) for x, y in enumerate(f)] + [(x, y) for y, x in enumerate(g)])

    @classmethod
    def from_bijection(cls, perm: Sequence[int]) -> "Correspondence":
        return cls(enumerate(perm))

    @classmethod
    def identity(cls, n: int) -> "Correspondence":
        return cls((i, i) for i in range(n))

    @classmethod
    def full(cls, n: int, m: int) -> "Correspondence":
        return cls(product(range(n), range(m)))

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def check(self, nx: int, ny: int) -> None:
        for i, j in self.pairs:
            if not (0 <= i < nx and 0 <= j < ny):
                raise IndexOutOfRange(f"pair ({i},{j}) outside {nx} x {ny}")
        left = {i for i, _ in self.pairs}
        right = {j for _, j in self.pairs}
        if len(left) != nx or len(right) != ny:
            raise NotACorrespondence("projections are not surjective")

    def restrict(self, keep) -> "Correspondence":
        return Correspondence(p for p in self.pairs if p in keep)


def distortion(R: Correspondence, X: DistanceMatrix, Y: DistanceMatrix) -> float:
    """Largest ``|dX(x,x') - dY(y,y')|`` over related pairs ``xRy``, ``x'Ry'``."""
    R.check(X.n, Y.n)
    xs, ys = np.array(R.sorted_pairs()).T
    return float(np.abs(X.d[np.ix_(xs, xs)] - Y.d[np.ix_(ys, ys)]).max())


@dataclass
class GhResult:
    """Certified enclosure ``lower <= d_GH <= upper``; ``upper`` is realised by ``witness``."""

    lower: float
    upper: float
    witness: Correspondence
    exact: bool
    nodes: int = 0

    @property
    def value(self) -> float:
        if not self.exact:
            raise ValueError("result is an interval, not an exact value")
        return self.upper

    def as_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "witness": [list(p) for p in self.witness.sorted_pairs()],
            "nodes": self.nodes,
        }


# -- lower bounds -------------------------------------------------------------

def _hausdorff_reals(a: np.ndarray, b: np.ndarray) -> float:
    gap = np.abs(a[:, None] - b[None, :])
    return float(max(gap.min(axis=1).max(), gap.min(axis=0).max()))


def lower_bound_terms(X: DistanceMatrix, Y: DistanceMatrix) -> dict[str, float]:
    """The individual lower bounds on ``d_GH`` (already halved)."""
    terms = {"diameter": 0.5 * abs(diameter(X) - diameter(Y))}
    # any correspondence matches every distance of one space to one of the other,
    # and every eccentricity likewise
    terms["distance_set"] = 0.5 * _hausdorff_reals(np.unique(X.d), np.unique(Y.d))
    terms["eccentricity"] = 0.5 * _hausdorff_reals(eccentricities(X), eccentricities(Y))
    if X.n == Y.n and X.n >= 2:
        # a correspondence of distortion below max(cdm) must be a bijection
        cx, cy = codiameter(X), codiameter(Y)
        terms["codiameter"] = 0.5 * abs(cx - cy)
        iu = np.triu_indices(X.n, k=1)
        gap = float(np.abs(np.sort(X.d[iu]) - np.sort(Y.d[iu])).max())
        terms["order_statistics"] = 0.5 * min(gap, max(cx, cy))
    elif X.n != Y.n:
        # two points of the larger space must share a partner
        big = X if X.n > Y.n else Y
        terms["cardinality"] = 0.5 * codiameter(big)
    return terms


def gh_lower_bounds(X: DistanceMatrix, Y: DistanceMatrix) -> float:
    """Cheap certified lower bound on ``d_GH(X, Y)``."""
    return max(lower_bound_terms(X, Y).values())


# -- exact branch and bound ---------------------------------------------------

def _pair_cost(dX: np.ndarray, dY: np.ndarray, a: int, b: int) -> np.ndarray:
    # cost[x, y] of adding pair (x, y) next to the already-present pair (a, b)
    return np.abs(dX[:, a][:, None] - dY[b][None, :])


def gh_exact(
    X: DistanceMatrix,
    Y: DistanceMatrix,
    budget: int = DEFAULT_BUDGET,
    *,
    raise_on_budget: bool = False,
) -> GhResult:
    """Gromov-Hausdorff distance by branch and bound over ``graph(f) | graph(g)``.

    Points of both spaces are assigned partners in decreasing order of
    eccentricity; candidate partners are tried cheapest first.  ``budget``
    caps the number of search nodes.  When it runs out the result is a
    certified interval with ``exact=False`` (or :class:`BudgetExceeded` is
    raised carrying that result, if ``raise_on_budget``).
    """
    dX, dY = X.d, Y.d
    nx, ny = X.n, Y.n
    floor = gh_lower_bounds(X, Y)

    ex, ey = eccentricities(X), eccentricities(Y)
    items = [(-ex[i], 0, i) for i in range(nx)] + [(-ey[j], 1, j) for j in range(ny)]
    items = [(side, idx) for _, side, idx in sorted(items)]
    n_items = len(items)
    # unassigned X (resp. Y) points at each depth
    rest_x = [np.array([i for s, i in items[k:] if s == 0], dtype=int) for k in range(n_items + 1)]
    rest_y = [np.array([i for s, i in items[k:] if s == 1], dtype=int) for k in range(n_items + 1)]

    def candidates(M: np.ndarray, side: int, idx: int) -> np.ndarray:
        return M[idx] if side == 0 else M[:, idx]

    def apply(M, side, idx, c):
        a, b = (idx, c) if side == 0 else (c, idx)
        return np.maximum(M, _pair_cost(dX, dY, a, b))

    # greedy dive gives the first incumbent without spending budget
    M = np.zeros((nx, ny))
    D = 0.0
    choice = [0] * n_items
    for k, (side, idx) in enumerate(items):
        costs = candidates(M, side, idx)
        c = int(np.argmin(costs))
        D = max(D, float(costs[c]))
        M = apply(M, side, idx, c)
        choice[k] = c
    best = {"dis": D, "choice": list(choice)}

    state = {"nodes": 0, "exhausted": False, "frontier": np.inf, "done": best["dis"] * 0.5 <= floor}
    path = [0] * n_items

    def search(k: int, M: np.ndarray, D: float) -> None:
        if k == n_items:
            best["dis"] = D
            best["choice"] = list(path)
            if D * 0.5 <= floor:
                state["done"] = True
            return
        rx, ry = rest_x[k], rest_y[k]
        bound = D
        if rx.size:
            bound = max(bound, float(M[rx].min(axis=1).max()))
        if ry.size:
            bound = max(bound, float(M[:, ry].min(axis=0).max()))
        if bound >= best["dis"]:
            return
        side, idx = items[k]
        costs = candidates(M, side, idx)
        order = np.argsort(costs, kind="stable")
        for pos, c in enumerate(order):
            child = max(D, float(costs[c]))
            if child >= best["dis"]:
                break
            if state["done"]:
                return
            if state["nodes"] >= budget:
                state["exhausted"] = True
                state["frontier"] = min(state["frontier"], child)
                return
            state["nodes"] += 1
            path[k] = int(c)
            search(k + 1, apply(M, side, idx, int(c)), child)
            if state["exhausted"]:
                # siblings come in ascending cost: the next one bounds all unexplored ones
                if pos + 1 < len(order):
                    nxt = max(D, float(costs[order[pos + 1]]))
                    state["frontier"] = min(state["frontier"], nxt)
                return

    if not state["done"]:
        search(0, np.zeros((nx, ny)), 0.0)

    f = [0] * nx
    g = [0] * ny
    for (side, idx), c in zip(items, best["choice"]):
        if side == 0:
            f[idx] = c
        else:
            g[idx] = c
    witness = Correspondence.from_maps(f, g)
    upper = 0.5 * best["dis"]
    if state["exhausted"]:
        lower = max(floor, 0.5 * min(best["dis"], state["frontier"]))
    else:
        lower = upper
    result = GhResult(lower, upper, witness, lower >= upper, state["nodes"])
    if state["exhausted"] and raise_on_budget and not result.exact:
        raise BudgetExceeded(result)
    return result


# -- permutation bound and the local formula -----------------------------------

class PermutationBound(NamedTuple):
    norm: float          # min over relabelings of the sup-norm matrix difference
    permutation: tuple   # X point i is matched with Y point permutation[i]


def best_permutation(X: DistanceMatrix, Y: DistanceMatrix) -> PermutationBound:
    """Minimise ``max_ij |dX[i,j] - dY[p(i),p(j)]|`` over bijections ``p``.

    Depth-first in lexicographic order with strict improvement, so the
    returned permutation is the lexicographically first optimal one.
    """
    if X.n != Y.n:
        raise CardinalityMismatch(X.n, Y.n)
    n = X.n
    dX, dY = X.d, Y.d
    best = {"norm": np.inf, "perm": None}
    perm = [0] * n
    used = np.zeros(n, dtype=bool)

    def search(i: int, M: np.ndarray, D: float) -> None:
        if i == n:
            best["norm"] = D
            best["perm"] = tuple(perm)
            return
        free = ~used
        sub = M[i:][:, free]
        bound = max(D, float(sub.min(axis=1).max()), float(sub.min(axis=0).max()))
        if bound >= best["norm"]:
            return
        for j in np.flatnonzero(free):
            child = max(D, float(M[i, j]))
            if child >= best["norm"]:
                continue
            used[j] = True
            perm[i] = int(j)
            search(i + 1, np.maximum(M, _pair_cost(dX, dY, i, j)), child)
            used[j] = False

    search(0, np.zeros((n, n)), 0.0)
    return PermutationBound(float(best["norm"]), best["perm"])


def gh_upper_permutation(X: DistanceMatrix, Y: DistanceMatrix) -> float:
    """Half the smallest sup-norm gap between the matrices under relabeling."""
    return 0.5 * best_permutation(X, Y).norm


def gh_local(X: DistanceMatrix, Y: DistanceMatrix) -> GhResult | None:
    """Exact ``d_GH`` from the permutation bound, when it is small enough.

    If the permutation bound is at most half the codiameter of ``X``, any
    optimal correspondence is a bijection and the bound is the distance.
    Returns ``None`` when that test fails.
    """
    if X.n != Y.n:
        raise CardinalityMismatch(X.n, Y.n)
    pb = best_permutation(X, Y)
    value = 0.5 * pb.norm
    if X.n >= 2 and value > 0.5 * codiameter(X):
        return None
    return GhResult(value, value, Correspondence.from_bijection(pb.permutation), True)


# -- Hausdorff distance and gluing --------------------------------------------

def hausdorff(Z: DistanceMatrix, A: Sequence[int], B: Sequence[int]) -> float:
    """Hausdorff distance between two non-empty index subsets of ``Z``."""
    A = np.unique(np.asarray(list(A), dtype=int))
    B = np.unique(np.asarray(list(B), dtype=int))
    if A.size == 0 or B.size == 0:
        raise EmptySubset("both subsets must be non-empty")
    if min(A.min(), B.min()) < 0 or max(A.max(), B.max()) >= Z.n:
        raise IndexOutOfRange("subset index outside the ambient space")
    block = Z.d[np.ix_(A, B)]
    return float(max(block.min(axis=1).max(), block.min(axis=0).max()))


@dataclass
class GluedSpace:
    """Quotient of a disjoint union of parts that share a common subspace ``Y``."""

    matrix: DistanceMatrix
    part_maps: list[np.ndarray] = field(default_factory=list)  # part index -> glued index
    y_map: np.ndarray | None = None                            # Y index -> glued index


def glue(
    Y: DistanceMatrix,
    parts: Sequence[tuple[DistanceMatrix, Sequence[int]]],
    tol: float = 0.0,
) -> GluedSpace:
    """Glue spaces ``X_p`` along isometric copies ``emb_p(Y)`` of ``Y``.

    Points of different parts are at distance
    ``min_y dX_p(a, emb_p(y)) + dX_q(emb_q(y), b)``; points at distance zero
    are identified (first occurrence in part order is the representative).
    """
    if not parts:
        raise ValueError("need at least one part")
    embs = []
    for p, (Xp, emb) in enumerate(parts):
        emb = np.asarray(emb, dtype=int)
        if emb.shape != (Y.n,) or emb.min() < 0 or emb.max() >= Xp.n:
            raise IndexOutOfRange(f"embedding of part {p} has the wrong shape or range")
        err = np.abs(Xp.d[np.ix_(emb, emb)] - Y.d)
        bad = np.argwhere(err > tol)
        if bad.size:
            raise NotIsometricEmbedding(p, *map(int, bad[0]))
        if np.unique(emb).size != Y.n:
            y1, y2 = _first_duplicate(emb)
            raise NotIsometricEmbedding(p, y1, y2)
        embs.append(emb)

    sizes = [Xp.n for Xp, _ in parts]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    big = np.empty((total, total))
    for p, (Xp, _) in enumerate(parts):
        sp = slice(offsets[p], offsets[p + 1])
        big[sp, sp] = Xp.d
        to_y_p = Xp.d[:, embs[p]]                   # (|X_p|, |Y|)
        for q in range(p + 1, len(parts)):
            Xq = parts[q][0]
            sq = slice(offsets[q], offsets[q + 1])
            to_y_q = Xq.d[:, embs[q]]
            cross = (to_y_p[:, None, :] + to_y_q[None, :, :]).min(axis=2)
            big[sp, sq] = cross
            big[sq, sp] = cross.T

    rep = np.arange(total)
    for a in range(total):
        if rep[a] != a:
            continue
        same = np.flatnonzero(big[a] == 0.0)
        rep[same[same > a]] = a
    keep = np.flatnonzero(rep == np.arange(total))
    new_index = np.full(total, -1)
    new_index[keep] = np.arange(keep.size)
    glued_of = new_index[rep]

    matrix = DistanceMatrix(big[np.ix_(keep, keep)], tol=max(tol, 1e-9))
    part_maps = [glued_of[offsets[p]:offsets[p + 1]] for p in range(len(parts))]
    y_map = part_maps[0][embs[0]]
    return GluedSpace(matrix, part_maps, y_map)


def _first_duplicate(emb: np.ndarray) -> tuple[int, int]:
    seen: dict[int, int] = {}
    for y, x in enumerate(emb):
        if int(x) in seen:
            return seen[int(x)], y
        seen[int(x)] = y
    raise AssertionError("no duplicate")
