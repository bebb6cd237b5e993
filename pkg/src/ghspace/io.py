"""Matrix text format.

Line 1 holds the cardinality ``n``; the next ``n`` lines hold ``n``
whitespace-separated decimals each.  Blank lines and ``#`` comments are
ignored.  Entries must be symmetric to within ``SYMMETRY_TOL``; the parser
then averages the two triangles so tiny round-off does not fail validation.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .metric import DEFAULT_TOL, DistanceMatrix, validate

SYMMETRY_TOL = 1e-12


def parse_matrix_text(text: str) -> np.ndarray:
    """Parse the text format into a symmetric float array (no metric checks)."""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if body:
            rows.append((lineno, body))
    if not rows:
        raise ParseError(1, "empty input")
    lineno, head = rows[0]
    try:
        n = int(head)
    except ValueError:
        raise ParseError(lineno, f"expected an integer cardinality, got {head!r}") from None
    if n < 1:
        raise ParseError(lineno, "cardinality must be positive")
    if len(rows) - 1 != n:
        last = rows[-1][0]
        raise ParseError(last, f"expected {n} matrix rows, found {len(rows) - 1}")
    d = np.empty((n, n))
    for i, (lineno, body) in enumerate(rows[1:]):
        fields = body.split()
        if len(fields) != n:
            raise ParseError(lineno, f"expected {n} entries, found {len(fields)}")
        try:
            d[i] = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise ParseError(rows[1 + i][0], f"entry {j} is not finite")
    asym = np.abs(d - d.T)
    if asym.max() > SYMMETRY_TOL:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise ParseError(
            rows[1 + max(i, j)][0],
            f"entries ({i},{j}) and ({j},{i}) differ by {asym[i, j]:.3g}",
        )
    return (d + d.T) / 2.0


def read_matrix(path, tol: float = DEFAULT_TOL) -> DistanceMatrix:
    """Read and validate a matrix file."""
    return validate(parse_matrix_text(Path(path).read_text()), tol=tol)


def format_matrix(X: DistanceMatrix) -> str:
    # repr() gives the shortest round-trip decimal for each binary64 entry
    lines = [str(X.n)]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in X.d)
    return "\n".join(lines) + "\n"


def write_matrix(X: DistanceMatrix, path) -> None:
    Path(path).write_text(format_matrix(X))


def matrix_to_json(X: DistanceMatrix, **extra) -> str:
    payload = {"n": X.n, "matrix": X.d.tolist()}
    payload.update(extra)
    return json.dumps(payload)
