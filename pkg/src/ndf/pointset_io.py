"""Text format for point sets on S^d.

Layout: one header line `# dim <d> count <n> [degree <t>]`, then one
point per line as d+1 whitespace-separated floats printed with 17
significant digits, which round-trips doubles exactly. Rows must be
unit-norm within 1e-9 on load; they are renormalized and the largest
correction reported. Writes are atomic (temp file + rename).
"""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

__all__ = ["PointSetData", "PointSetFormatError", "read_pointset",
           "write_pointset"]

_UNIT_SLACK = 1e-9


class PointSetFormatError(ValueError):
    """Malformed point-set file; message carries a line number."""


@dataclass(frozen=True)
class PointSetData:
    points: np.ndarray
    d: int
    degree: int | None
    max_correction: float


def write_pointset(path: str, points, degree: int | None = None) -> None:
    """Write points atomically in the text format; d is inferred."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise ValueError(f"points must be (n, d+1) with d >= 1, "
                         f"got shape {pts.shape}")
    d = pts.shape[1] - 1
    header = f"# dim {d} count {pts.shape[0]}"
    if degree is not None:
        header += f" degree {int(degree)}"
    lines = [header]
    for row in pts:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    body = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(body)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fail(lineno: int, msg: str) -> PointSetFormatError:
    return PointSetFormatError(f"line {lineno}: {msg}")


def read_pointset(path: str) -> PointSetData:
    """Parse and validate a point-set file, renormalizing rows.

    Rows further than 1e-9 from unit norm are format errors; smaller
    deviations are corrected and the worst correction reported.
    """
    with open(path) as fh:
        raw_lines = fh.read().splitlines()

    header = None
    header_lineno = 0
    rows: list[tuple[int, str]] = []
    for i, line in enumerate(raw_lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if header is None:
            header = stripped
            header_lineno = i
        elif stripped.startswith("#"):
            continue  # trailing comments are tolerated
        else:
            rows.append((i, stripped))

    if header is None:
        raise _fail(1, "empty file; expected '# dim <d> count <n>' header")
    tokens = header.split()
    if (len(tokens) not in (5, 7) or tokens[0] != "#" or tokens[1] != "dim"
            or tokens[3] != "count"
            or (len(tokens) == 7 and tokens[5] != "degree")):
        raise _fail(header_lineno,
                    f"bad header {header!r}; expected "
                    f"'# dim <d> count <n> [degree <t>]'")
    try:
        d = int(tokens[2])
        count = int(tokens[4])
        degree = int(tokens[6]) if len(tokens) == 7 else None
    except ValueError:
        raise _fail(header_lineno, f"non-integer header field in {header!r}")
    if d < 1:
        raise _fail(header_lineno, f"dim must be >= 1, got {d}")
    if count < 0:
        raise _fail(header_lineno, f"count must be >= 0, got {count}")
    if degree is not None and degree < 1:
        raise _fail(header_lineno, f"degree must be >= 1, got {degree}")
    if len(rows) != count:
        raise _fail(rows[-1][0] if rows else header_lineno,
                    f"header promises {count} points, file has {len(rows)}")

    points = np.zeros((count, d + 1))
    for k, (lineno, text) in enumerate(rows):
        parts = text.split()
        if len(parts) != d + 1:
            raise _fail(lineno,
                        f"expected {d + 1} coordinates, got {len(parts)}")
        try:
            points[k] = [float(p) for p in parts]
        except ValueError:
            raise _fail(lineno, f"non-numeric coordinate in {text!r}")

    max_correction = 0.0
    if count:
        norms = np.linalg.norm(points, axis=1)
        worst = int(np.argmax(np.abs(norms - 1.0)))
        max_correction = float(abs(norms[worst] - 1.0))
        if max_correction > _UNIT_SLACK:
            raise _fail(rows[worst][0],
                        f"row norm {norms[worst]:.12g} deviates from 1 by "
                        f"{max_correction:.3g} > {_UNIT_SLACK}")
        # rows already unit to machine precision are left bit-exact so
        # that write -> read -> write is byte-stable
        needs = np.abs(norms - 1.0) > 16 * np.finfo(float).eps
        if needs.any():
            points[needs] /= norms[needs, None]
    return PointSetData(points=points, d=d, degree=degree,
                        max_correction=max_correction)
