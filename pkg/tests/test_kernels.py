import os
import subprocess
import sys

import numpy as np

from permwave import _pykernels, kernels


def _backend(env_extra):
    env = {**os.environ, **env_extra}
    out = subprocess.run([sys.executable, "-c", "from permwave import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    return out.stdout.strip()


def test_pure_python_switch():
    assert _backend({"PERMWAVE_PURE_PYTHON": "1"}) == "python"
    assert _backend({"PERMWAVE_PURE_PYTHON": "0"}) == kernels.BACKEND


def test_backend_is_known():
    assert kernels.BACKEND in ("cython", "python")


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("PERMWAVE_THREADS", "3")
    assert kernels.default_threads() == 3
    monkeypatch.delenv("PERMWAVE_THREADS")
    assert kernels.default_threads() >= 1


def test_af_grid_thread_independent(rng):
    omega_sub = 2 * np.pi * rng.permutation(6).astype(float)
    theta = rng.uniform(0, 2 * np.pi, 6)
    taus = np.linspace(-6, 6, 71)
    omegas = np.linspace(-40, 40, 67)
    a = kernels.af_grid(omega_sub, theta, 1.0, taus, omegas, threads=1)
    b = kernels.af_grid(omega_sub, theta, 1.0, taus, omegas, threads=4)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose(a, _pykernels.af_grid(omega_sub, theta, 1.0, taus, omegas), atol=1e-12)


def test_sinc_series_branch():
    x = np.array([0.0, 1e-6, -3e-5, 1e-3, 2.0])
    np.testing.assert_allclose(_pykernels._sinc(x), np.sinc(x / np.pi), rtol=1e-15, atol=0)
