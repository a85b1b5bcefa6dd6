"""Backend parity between the numba kernels and the pure-numpy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

from wqsc import _kernels

pytestmark = pytest.mark.skipif(
    _kernels.NUMBA_IMPL is None, reason="numba backend unavailable"
)


def _random_state(rng, n):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return amps / np.linalg.norm(amps)


def _pair_idx(n, qa, qb):
    rest = [q for q in range(1, n + 1) if q not in (qa, qb)]
    idx = np.empty((2, 2, 1 << len(rest)), dtype=np.int64)
    for ba in (0, 1):
        for bb in (0, 1):
            for r in range(1 << len(rest)):
                flat = (ba << (n - qa)) | (bb << (n - qb))
                for j, q in enumerate(rest):
                    flat |= ((r >> (len(rest) - 1 - j)) & 1) << (n - q)
                idx[ba, bb, r] = flat
    return idx


class TestBackendAgreement:
    def test_gate_application(self):
        rng = np.random.default_rng(0)
        raw = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        gate, _ = np.linalg.qr(raw)
        for n in (1, 3, 4):
            amps = _random_state(rng, n)
            for pos in range(n):
                a = _kernels.NUMBA_IMPL["apply_gate_1q"](amps, pos, gate)
                b = _kernels.NUMPY_IMPL["apply_gate_1q"](amps, pos, gate)
                assert np.max(np.abs(a - b)) <= 1e-15

    def test_cnot(self):
        rng = np.random.default_rng(1)
        amps = _random_state(rng, 4)
        for cpos in range(4):
            for tpos in range(4):
                if cpos == tpos:
                    continue
                a = _kernels.NUMBA_IMPL["apply_cnot"](amps, cpos, tpos)
                b = _kernels.NUMPY_IMPL["apply_cnot"](amps, cpos, tpos)
                assert np.array_equal(a, b)

    def test_z_probabilities_and_collapse(self):
        rng = np.random.default_rng(2)
        amps = _random_state(rng, 4)
        for positions in ([3], [3, 2], [1, 0], [3, 2, 1, 0]):
            pos = np.array(positions, dtype=np.int64)
            pa = _kernels.NUMBA_IMPL["z_probabilities"](amps, pos)
            pb = _kernels.NUMPY_IMPL["z_probabilities"](amps, pos)
            assert np.max(np.abs(pa - pb)) <= 1e-15
            for outcome in range(1 << len(positions)):
                if pa[outcome] < 1e-12:
                    continue
                ca = _kernels.NUMBA_IMPL["collapse_z"](amps, pos, outcome)
                cb = _kernels.NUMPY_IMPL["collapse_z"](amps, pos, outcome)
                assert np.max(np.abs(ca - cb)) <= 1e-15

    def test_bell_kernels(self):
        rng = np.random.default_rng(3)
        for n, qa, qb in ((2, 1, 2), (4, 1, 2), (4, 3, 4), (4, 2, 4)):
            amps = _random_state(rng, n)
            idx = _pair_idx(n, qa, qb)
            pa = _kernels.NUMBA_IMPL["bell_probabilities"](amps, idx)
            pb = _kernels.NUMPY_IMPL["bell_probabilities"](amps, idx)
            assert np.max(np.abs(pa - pb)) <= 1e-15
            assert np.sum(pa) == pytest.approx(1.0, abs=1e-12)
            for which in range(4):
                if pa[which] < 1e-12:
                    continue
                ca = _kernels.NUMBA_IMPL["bell_collapse"](amps, idx, which)
                cb = _kernels.NUMPY_IMPL["bell_collapse"](amps, idx, which)
                assert np.max(np.abs(ca - cb)) <= 1e-14


class TestBackendSelection:
    def _backend_in_subprocess(self, env_value):
        env = dict(os.environ)
        if env_value is None:
            env.pop("WQSC_BACKEND", None)
        else:
            env["WQSC_BACKEND"] = env_value
        out = subprocess.run(
            [sys.executable, "-c", "from wqsc import _kernels; print(_kernels.BACKEND)"],
            capture_output=True,
            text=True,
            env=env,
        )
        return out

    def test_numpy_forced(self):
        out = self._backend_in_subprocess("numpy")
        assert out.returncode == 0
        assert out.stdout.strip() == "numpy"

    def test_default_prefers_numba(self):
        out = self._backend_in_subprocess(None)
        assert out.returncode == 0
        assert out.stdout.strip() == "numba"

    def test_invalid_value_rejected(self):
        out = self._backend_in_subprocess("cuda")
        assert out.returncode != 0
        assert "WQSC_BACKEND" in out.stderr

    def test_warmup_runs(self):
        _kernels.warmup()


def test_simulation_results_identical_across_backends():
    """End to end: a seeded Monte Carlo run must not depend on the backend."""
    script = (
        "from wqsc.harness import RunConfig, run_monte_carlo, run_stats_to_dict, to_json;"
        "cfg = RunConfig(scheme='cao', attack='cao-ir-z', rounds=400, master_seed=17);"
        "print(to_json(run_stats_to_dict(run_monte_carlo(cfg))))"
    )
    outputs = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, WQSC_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True, env=env
        )
        assert out.returncode == 0, out.stderr
        outputs[backend] = out.stdout
    assert outputs["numba"] == outputs["numpy"]
