"""Shared test utilities."""
import numpy as np


def random_unit(rng, n, d=2):
    pts = rng.standard_normal((n, d + 1))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def random_rotation(rng, k):
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))
