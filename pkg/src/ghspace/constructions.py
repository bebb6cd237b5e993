"""Explicit metric constructions and random instances.

Every constructor returns a validated :class:`DistanceMatrix` (wrapped in a
:class:`LabeledSpace` when points carry provenance).  The approximation
constructions also expose the projection correspondence back onto the input
space, which certifies their Gromov-Hausdorff bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import EpsTooLarge, RejectionBudgetExceeded, SizeOverflow, ValidationError
from .gh import Correspondence, distortion
from .metric import DistanceMatrix, codiameter

SIZE_CAP = 4096
CANTOR_MAX_DEPTH = 14


@dataclass
class LabeledSpace:
    """A constructed space plus, per point, ``(origin, parameter)``.

    ``origin`` is the index of the input point the new point projects to;
    ``parameter`` is the layer height, ball offset, or a tag string.
    """

    matrix: DistanceMatrix
    labels: list[tuple]

    def __post_init__(self):
        if len(self.labels) != self.matrix.n:
            raise ValueError("one label per point is required")

    @property
    def origins(self) -> list[int]:
        return [lab[0] for lab in self.labels]

    def projection(self) -> Correspondence:
        """Correspondence pairing each input point with every point built over it."""
        return Correspondence((o, i) for i, o in enumerate(self.origins))

    def projection_bound(self, F: DistanceMatrix) -> float:
        """Half the distortion of :meth:`projection`: an upper bound on ``d_GH``."""
        return 0.5 * distortion(self.projection(), F, self.matrix)


def _check_eps(F: DistanceMatrix, eps: float) -> None:
    if eps <= 0:
        raise ValueError("eps must be positive")
    if F.n >= 2 and eps >= codiameter(F):
        raise EpsTooLarge(eps, codiameter(F))


def _fibred(F: DistanceMatrix, origin: np.ndarray, height: np.ndarray, fibre: np.ndarray) -> np.ndarray:
    # points over different base points meet through the base; points over one base use the fibre metric
    same = origin[:, None] == origin[None, :]
    through = F.d[np.ix_(origin, origin)] + (height[:, None] + height[None, :])
    d = np.where(same, fibre, through)
    np.fill_diagonal(d, 0.0)
    return d


def perfectify(F: DistanceMatrix, eps: float, k: int = 1) -> LabeledSpace:
    """Attach to every point a segment of length ``eps`` sampled at ``k + 1`` heights.

    ``d((a,s),(b,t)) = d(a,b) + s + t`` for ``a != b`` and ``|s - t|`` otherwise.
    """
    _check_eps(F, eps)
    if k < 1:
        raise ValueError("need at least one layer")
    if F.n * (k + 1) > SIZE_CAP:
        raise SizeOverflow(f"{F.n * (k + 1)} points exceed the cap of {SIZE_CAP}")
    heights = np.array([eps * i / k for i in range(k + 1)])
    origin = np.repeat(np.arange(F.n), k + 1)
    height = np.tile(heights, F.n)
    d = _fibred(F, origin, height, np.abs(height[:, None] - height[None, :]))
    labels = [(int(a), float(s)) for a, s in zip(origin, height)]
    return LabeledSpace(DistanceMatrix(d), labels)


def spike(F: DistanceMatrix, base: int = 0, eps: float = 1.0) -> LabeledSpace:
    """Add three points at distance ``eps`` from ``base`` and ``2 eps`` from each other.

    The new points come first, so ``{0, 1, 2, 3 + base}`` spans the four-point
    gadget whose Cayley-Menger form equals ``-eps**6 / 9``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not 0 <= base < F.n:
        raise IndexError(f"base point {base} outside a {F.n}-point space")
    n = F.n + 3
    d = np.zeros((n, n))
    d[3:, 3:] = F.d
    to_spike = F.d[:, base] + eps
    for j in range(3):
        d[3:, j] = to_spike
        d[j, 3:] = to_spike
    d[:3, :3] = 2 * eps
    np.fill_diagonal(d, 0.0)
    labels = [(base, f"spike{j + 1}") for j in range(3)] + [(i, "base") for i in range(F.n)]
    return LabeledSpace(DistanceMatrix(d), labels)


def grid_ball(D: int, eps: float, resolution: int) -> np.ndarray:
    """Points of a ``resolution``-per-axis grid on ``[-eps, eps]^D`` inside the closed ball."""
    if D < 1 or resolution < 1:
        raise ValueError("dimension and resolution must be positive")
    if resolution ** D > 50 * SIZE_CAP:
        raise SizeOverflow(f"grid of {resolution}^{D} points is too large")
    axis = np.linspace(-eps, eps, resolution) if resolution > 1 else np.zeros(1)
    pts = np.array(list(itertools.product(axis, repeat=D)))
    norms = np.linalg.norm(pts, axis=1)
    pts = pts[norms <= eps * (1 + 1e-12)]
    if len(pts) == 0:
        raise ValueError(f"no grid point of resolution {resolution} lies in the ball")
    return pts


def grid_ball_product(
    F: DistanceMatrix, D: int, eps: float, resolution: int, cap: int = SIZE_CAP
) -> LabeledSpace:
    """``F x B`` with ``B`` a gridded ``D``-ball of radius ``eps``.

    ``d((a,u),(b,v)) = d(a,b) + |u| + |v|`` for ``a != b`` and ``|u - v|`` otherwise.
    """
    _check_eps(F, eps)
    ball = grid_ball(D, eps, resolution)
    m = len(ball)
    if F.n * m > cap:
        raise SizeOverflow(f"{F.n * m} points exceed the cap of {cap}")
    origin = np.repeat(np.arange(F.n), m)
    offsets = np.tile(ball, (F.n, 1))
    height = np.linalg.norm(offsets, axis=1)
    fibre = np.linalg.norm(offsets[:, None, :] - offsets[None, :, :], axis=2)
    d = _fibred(F, origin, height, fibre)
    labels = [(int(a), tuple(float(c) for c in u)) for a, u in zip(origin, offsets)]
    return LabeledSpace(DistanceMatrix(d), labels)


def cantor_points(k: int) -> np.ndarray:
    """Left endpoints of the level-``k`` middle-thirds intervals, in increasing order."""
    if k < 0:
        raise ValueError("depth must be non-negative")
    if k > CANTOR_MAX_DEPTH:
        raise SizeOverflow(f"depth {k} exceeds {CANTOR_MAX_DEPTH}")
    # integer numerators over 3**k keep the construction exact
    nums = np.zeros(1, dtype=np.int64)
    for level in range(k):
        step = 2 * 3 ** (k - level - 1)
        nums = np.concatenate([nums, nums + step])
    return np.sort(nums) / 3.0 ** k


def cantor_level(k: int) -> DistanceMatrix:
    pts = cantor_points(k)
    return DistanceMatrix(np.abs(pts[:, None] - pts[None, :]))


PROFILES = ("safe-band", "perturbed")


def random_space(
    n: int,
    seed: int,
    profile: str = "safe-band",
    base: DistanceMatrix | None = None,
    amplitude: float | None = None,
    max_tries: int = 1000,
) -> DistanceMatrix:
    """Seeded random distance matrix.

    ``safe-band`` draws every off-diagonal entry uniformly from ``[1, 2]``,
    where the triangle inequality holds automatically.  ``perturbed`` adds
    symmetric uniform noise in ``[-amplitude, amplitude]`` to ``base``
    (``amplitude < cdm(base) / 2``), redrawing until the result is a metric.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    if profile == "safe-band":
        d = np.zeros((n, n))
        d[iu] = rng.uniform(1.0, 2.0, size=len(iu[0]))
        return DistanceMatrix(d + d.T, tol=0.0)
    if profile != "perturbed":
        raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    if base is None or amplitude is None:
        raise ValueError("the perturbed profile needs a base matrix and an amplitude")
    if base.n != n:
        raise ValueError(f"base has {base.n} points, expected {n}")
    if n >= 2 and not 0 <= amplitude < codiameter(base) / 2:
        raise ValueError("amplitude must lie in [0, cdm(base)/2)")
    for _ in range(max_tries):
        noise = np.zeros((n, n))
        noise[iu] = rng.uniform(-amplitude, amplitude, size=len(iu[0]))
        try:
            return DistanceMatrix(base.d + noise + noise.T, tol=0.0)
        except ValidationError:
            continue
    raise RejectionBudgetExceeded(f"no valid perturbation in {max_tries} draws")
