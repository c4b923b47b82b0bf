"""Classical point sets on S^2 with known design strengths.

Coordinates are exact expressions divided by exact norms, so every row is
unit to machine precision. Strengths: antipodal pair t=1, tetrahedron t=2,
octahedron and cube t=3, icosahedron t=5.
"""
from __future__ import annotations

from math import sqrt

import numpy as np

__all__ = [
    "antipodal_pair",
    "tetrahedron",
    "octahedron",
    "cube",
    "icosahedron",
    "CLASSICAL_DESIGNS",
    "classical_design",
]


def antipodal_pair() -> np.ndarray:
    return np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])


def tetrahedron() -> np.ndarray:
    v = np.array(
        [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
    )
    return v / sqrt(3.0)


def octahedron() -> np.ndarray:
    eye = np.eye(3)
    return np.vstack([eye, -eye])


def cube() -> np.ndarray:
    v = np.array(
        [[sx, sy, sz] for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)],
        dtype=float,
    )
    return v / sqrt(3.0)


def icosahedron() -> np.ndarray:
    phi = (1.0 + sqrt(5.0)) / 2.0
    r = sqrt(1.0 + phi * phi)
    v = []
    for a, b in ((1.0, phi), (-1.0, phi), (1.0, -phi), (-1.0, -phi)):
        v.append([0.0, a, b])
        v.append([a, b, 0.0])
        v.append([b, 0.0, a])
    return np.array(v) / r


# name -> (constructor, design strength t)
CLASSICAL_DESIGNS = {
    "antipodal_pair": (antipodal_pair, 1),
    "tetrahedron": (tetrahedron, 2),
    "octahedron": (octahedron, 3),
    "cube": (cube, 3),
    "icosahedron": (icosahedron, 5),
}


def classical_design(name: str) -> tuple[np.ndarray, int]:
    """Points and design strength of a named classical configuration."""
    try:
        ctor, strength = CLASSICAL_DESIGNS[name]
    except KeyError:
        known = ", ".join(sorted(CLASSICAL_DESIGNS))
        raise KeyError(f"unknown design {name!r}; known: {known}") from None
    return ctor(), strength
