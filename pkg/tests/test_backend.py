import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ndf.backend import ACTIVE_BACKEND, HAS_NUMBA

PROBE = r"""
import json
import numpy as np
from ndf.backend import ACTIVE_BACKEND
from ndf.residual import Configuration, residual_gradient, weyl_residual

rng = np.random.default_rng(0)
pts = rng.standard_normal((40, 3))
pts /= np.linalg.norm(pts, axis=1, keepdims=True)
cfg = Configuration(d=2, fixed=pts[:10], free=pts[10:])
cert = weyl_residual(6, cfg)
grad = residual_gradient(6, cfg)
print(json.dumps({
    "backend": ACTIVE_BACKEND,
    "total": cert.total_residual,
    "per_degree": list(cert.per_degree),
    "grad_first": list(grad[0]),
    "grad_norm": float(np.linalg.norm(grad)),
}))
"""


def run_probe(backend: str):
    env = dict(os.environ, NDF_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", PROBE], env=env,
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_active_backend_is_sane():
    assert ACTIVE_BACKEND in ("numba", "numpy")
    if ACTIVE_BACKEND == "numba":
        assert HAS_NUMBA


def test_invalid_backend_rejected():
    env = dict(os.environ, NDF_BACKEND="gpu")
    proc = subprocess.run([sys.executable, "-c", "import ndf"], env=env,
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode != 0
    assert "NDF_BACKEND" in proc.stderr


@pytest.mark.skipif(not HAS_NUMBA, reason="single backend available")
def test_backend_parity():
    a = run_probe("numba")
    b = run_probe("numpy")
    assert a["backend"] == "numba" and b["backend"] == "numpy"
    assert a["total"] == pytest.approx(b["total"], rel=1e-12, abs=1e-12)
    np.testing.assert_allclose(a["per_degree"], b["per_degree"],
                               rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(a["grad_first"], b["grad_first"],
                               rtol=1e-12, atol=1e-14)
    assert a["grad_norm"] == pytest.approx(b["grad_norm"], rel=1e-12)
