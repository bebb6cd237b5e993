"""Covering numbers, packing numbers and box-dimension estimates.

Both solvers are exact branch and bound over Python-int bitsets.  Witness
sets are canonical: among all optimal sets the lexicographically smallest
(as sorted index tuples) is returned, so results do not depend on search
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import WindowTooSmall
from .metric import DistanceMatrix, codiameter


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _masks(rows: np.ndarray) -> list[int]:
    out = []
    for row in rows:
        m = 0
        for j in np.flatnonzero(row):
            m |= 1 << int(j)
        out.append(m)
    return out


class CoverResult(NamedTuple):
    count: int
    centers: tuple[int, ...]


class PackResult(NamedTuple):
    count: int
    subset: tuple[int, ...]


# -- covering -----------------------------------------------------------------

class _Cover:
    """Decision search: can ``uncovered`` be covered by ``k`` allowed centres?

    ``balls[c]`` is the bitset of points within eps of ``c``.  The relation is
    symmetric, so ``balls[e]`` is also the set of centres able to cover ``e``.
    """

    LP_MIN_POINTS = 8
    LP_SLACK = 1e-6

    def __init__(self, balls: list[int]):
        self.balls = balls
        self.found: list[tuple[int, ...]] = []

    def packing_bound(self, uncovered: int, allowed: int) -> int:
        # points with pairwise disjoint candidate sets each need their own centre
        items = sorted(((self.balls[e] & allowed).bit_count(), e) for e in _bits(uncovered))
        used = 0
        count = 0
        for _, e in items:
            cands = self.balls[e] & allowed
            if not cands & used:
                used |= cands
                count += 1
        return count

    def lp_bound(self, uncovered: int, allowed: int) -> int:
        elements = list(_bits(uncovered))
        centres = list(_bits(allowed))
        A = np.array([[(self.balls[e] >> c) & 1 for c in centres] for e in elements], dtype=float)
        res = linprog(
            np.ones(len(centres)), A_ub=-A, b_ub=-np.ones(len(elements)),
            bounds=(0, 1), method="highs",
        )
        if res.status != 0:
            return 0
        return math.ceil(res.fun - self.LP_SLACK)

    def _prune_dominated(self, uncovered: int, allowed: int) -> int:
        # a centre whose useful coverage sits inside another allowed centre's is never needed
        relevant = 0
        for e in _bits(uncovered):
            relevant |= self.balls[e] & allowed
        cov = sorted(
            ((-(self.balls[c] & uncovered).bit_count(), c, self.balls[c] & uncovered)
             for c in _bits(relevant)),
        )
        keep = relevant
        kept: list[int] = []
        for _, c, cv in cov:
            if any(cv & ~other == 0 for other in kept):
                keep &= ~(1 << c)
            else:
                kept.append(cv)
        return keep

    def feasible(self, uncovered: int, allowed: int, k: int) -> list[int] | None:
        if not uncovered:
            return []
        if k == 0:
            return None
        allowed = self._prune_dominated(uncovered, allowed)
        pick, fewest = -1, None
        for e in _bits(uncovered):
            c = (self.balls[e] & allowed).bit_count()
            if c == 0:
                return None
            if fewest is None or c < fewest:
                pick, fewest = e, c
                if c == 1:
                    break
        if self.packing_bound(uncovered, allowed) > k:
            return None
        if k >= 2 and uncovered.bit_count() >= self.LP_MIN_POINTS:
            if self.lp_bound(uncovered, allowed) > k:
                return None
        order = sorted(
            _bits(self.balls[pick] & allowed),
            key=lambda c: (-(self.balls[c] & uncovered).bit_count(), c),
        )
        for c in order:
            res = self.feasible(uncovered & ~self.balls[c], allowed, k - 1)
            if res is not None:
                return [c] + res
            # every cover using c has now been ruled out
            allowed &= ~(1 << c)
        return None

    def solve(self, uncovered: int, allowed: int, k: int) -> list[int] | None:
        res = self.feasible(uncovered, allowed, k)
        if res is not None:
            self.found.append(tuple(sorted(res)))
        return res


def covering_number(X: DistanceMatrix, eps: float) -> CoverResult:
    """Fewest closed eps-balls centred at points of ``X`` that cover ``X``.

    Returns the count and the lexicographically smallest optimal centre set.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    n = X.n
    full = (1 << n) - 1
    solver = _Cover(_masks(X.d <= eps))
    k = max(1, solver.packing_bound(full, full))
    if n >= _Cover.LP_MIN_POINTS:
        k = max(k, solver.lp_bound(full, full))
    while solver.solve(full, full, k) is None:
        k += 1
    # fix centres one at a time, smallest index first
    chosen: list[int] = []
    uncovered = full
    lo = 0
    for slot in range(k):
        for c in range(lo, n):
            prefix = tuple(chosen) + (c,)
            if any(f[: slot + 1] == prefix for f in solver.found):
                hit = True
            else:
                later = full & ~((1 << (c + 1)) - 1)
                rest = solver.solve(uncovered & ~solver.balls[c], later, k - slot - 1)
                if rest is not None:
                    solver.found[-1] = tuple(sorted(solver.found[-1] + prefix))
                hit = rest is not None
            if hit:
                chosen.append(c)
                uncovered &= ~solver.balls[c]
                lo = c + 1
                break
    return CoverResult(k, tuple(chosen))


# -- packing ------------------------------------------------------------------

class _Clique:
    """Maximum clique with greedy-colouring bounds."""

    def __init__(self, adj: list[int]):
        self.adj = adj

    def _colour(self, P: int) -> tuple[list[int], list[int]]:
        order, bounds = [], []
        colour = 0
        U = P
        while U:
            colour += 1
            Q = U
            while Q:
                v = (Q & -Q).bit_length() - 1
                Q &= ~self.adj[v] & ~(1 << v)
                U &= ~(1 << v)
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def largest(self, P: int, target: int | None = None) -> list[int]:
        """A maximum clique inside ``P``; stops early once ``target`` is reached."""
        best: list[int] = []
        stop = [False]

        def expand(R: list[int], P: int) -> None:
            nonlocal best
            order, bounds = self._colour(P)
            for v, b in zip(reversed(order), reversed(bounds)):
                if stop[0] or len(R) + b <= len(best):
                    return
                newP = P & self.adj[v]
                if newP:
                    expand(R + [v], newP)
                elif len(R) + 1 > len(best):
                    best = R + [v]
                    if target is not None and len(best) >= target:
                        stop[0] = True
                P &= ~(1 << v)

        if P:
            expand([], P)
        return best


def packing_number(X: DistanceMatrix, eps: float) -> PackResult:
    """Largest subset of ``X`` whose pairwise distances are all >= eps.

    Returns the count and the lexicographically smallest optimal subset.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = X.n
    far = X.d >= eps
    np.fill_diagonal(far, False)
    solver = _Clique(_masks(far))
    full = (1 << n) - 1
    size = len(solver.largest(full))
    chosen: list[int] = []
    pool = full
    for slot in range(size):
        need = size - slot - 1
        for v in _bits(pool):
            later = pool & solver.adj[v] & ~((1 << (v + 1)) - 1)
            if need == 0 or len(solver.largest(later, target=need)) >= need:
                chosen.append(v)
                pool = later
                break
    return PackResult(size, tuple(chosen))


# -- scale profiles and dimension ---------------------------------------------

@dataclass
class ScaleProfile:
    scales: list[float]
    counts_n: list[int]
    counts_m: list[int] | None = None

    def as_rows(self) -> list[dict]:
        rows = []
        for i, s in enumerate(self.scales):
            row = {"scale": s, "N": self.counts_n[i]}
            if self.counts_m is not None:
                row["M"] = self.counts_m[i]
            rows.append(row)
        return rows


def scale_profile(X: DistanceMatrix, scales: Sequence[float], packing: bool = True) -> ScaleProfile:
    """Exact covering (and optionally packing) numbers on a decreasing scale grid."""
    scales = [float(s) for s in scales]
    if any(s <= 0 for s in scales):
        raise ValueError("scales must be positive")
    if any(a <= b for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly decreasing")
    counts_n = [covering_number(X, s).count for s in scales]
    counts_m = [packing_number(X, s).count for s in scales] if packing else None
    return ScaleProfile(scales, counts_n, counts_m)


def bracket_check(profile: ScaleProfile, X: DistanceMatrix) -> bool:
    """``N(X,e) <= M(X,e) <= N(X,e/3)`` at every profiled scale."""
    counts_m = profile.counts_m
    if counts_m is None:
        counts_m = [packing_number(X, s).count for s in profile.scales]
    for s, cn, cm in zip(profile.scales, profile.counts_n, counts_m):
        if not cn <= cm <= covering_number(X, s / 3.0).count:
            return False
    return True


@dataclass
class DimensionEstimate:
    lower_slope: float
    upper_slope: float
    fit_slope: float
    window: tuple[float, float]
    saturation_scale: float | None = None  # below cdm(X) every count equals card(X)


def box_dimension(
    profile: ScaleProfile,
    window: tuple[float, float] | None = None,
    saturation_scale: float | None = None,
) -> DimensionEstimate:
    """Slopes of ``log N`` against ``log(1/eps)`` over a scale window.

    ``lower_slope``/``upper_slope`` are the extreme slopes between consecutive
    scales; ``fit_slope`` is the least-squares slope.  On a finite space only
    windows above the codiameter carry information.
    """
    pts = [
        (s, c) for s, c in zip(profile.scales, profile.counts_n)
        if window is None or window[1] <= s <= window[0]
    ]
    if len(pts) < 2:
        raise WindowTooSmall(f"window holds {len(pts)} scale(s); need at least 2")
    x = np.array([-math.log(s) for s, _ in pts])
    y = np.array([math.log(c) for _, c in pts])
    steps = np.diff(y) / np.diff(x)
    xc = x - x.mean()
    fit = float(xc @ (y - y.mean()) / (xc @ xc))
    # the LS slope is a weighted mean of the consecutive slopes; clamp away round-off
    fit = min(max(fit, float(steps.min())), float(steps.max()))
    return DimensionEstimate(
        lower_slope=float(steps.min()),
        upper_slope=float(steps.max()),
        fit_slope=fit,
        window=(pts[0][0], pts[-1][0]),
        saturation_scale=saturation_scale,
    )


def profile_dimension(
    X: DistanceMatrix, scales: Sequence[float], packing: bool = False
) -> tuple[ScaleProfile, DimensionEstimate]:
    prof = scale_profile(X, scales, packing=packing)
    sat = codiameter(X) if X.n >= 2 else None
    return prof, box_dimension(prof, saturation_scale=sat)
