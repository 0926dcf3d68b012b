import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelab.torus import TorusGeometry, random_form
from hodgelab.torus import kernels
from hodgelab.torus.operators import c1_norms

G = TorusGeometry(n=2, K=3, oversample=2)


class TestBackends:
    def test_python_always_available(self):
        assert "python" in kernels.available_backends()

    def test_compiled_backend_selected_when_built(self):
        if "cython" not in kernels.available_backends():
            pytest.skip("extension not built")
        if os.environ.get("HODGELAB_KERNEL", "").lower() == "python":
            pytest.skip("fallback forced by environment")
        assert kernels.BACKEND == "cython"

    def test_environment_forces_fallback(self):
        code = "from hodgelab.torus import kernels; print(kernels.BACKEND)"
        env = dict(os.environ, HODGELAB_KERNEL="python")
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 2**31), band=st.integers(0, 3), count=st.integers(1, 3))
    def test_backends_agree(self, seed, band, count):
        rng = np.random.Generator(np.random.PCG64(seed))
        forms = [random_form(G, 0, 1, "tangent", rng, band=band) for _ in range(count)]
        ref = c1_norms(forms, backend="python")
        for name in kernels.available_backends():
            np.testing.assert_allclose(c1_norms(forms, backend=name), ref, rtol=1e-12)

    def test_direct_kernel_contract(self):
        rng = np.random.Generator(np.random.PCG64(0))
        A = rng.standard_normal((3, 5, 4)) + 1j * rng.standard_normal((3, 5, 4))
        E = rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))
        w = np.array([1.0, 2.0, 0.5])
        group = np.array([0, 1, 1])
        V = np.einsum("fpb,lb->fpl", A, E)
        mag = np.abs(V) ** 2 * w[:, None, None]
        expected = np.sqrt([mag[0].max(), (mag[1] + mag[2]).max()])
        for name in kernels.available_backends():
            got = kernels.grid_sup(A, E, w, group, 2, backend=name)
            np.testing.assert_allclose(got, expected, rtol=1e-12)
