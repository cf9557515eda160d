import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gzk.grid import Field, make_grid

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

#: Filled by tests/test_acceptance.py: criterion number -> (passed, detail line).
ACCEPTANCE = {}


def gaussian(grid, sigma=1.0, amp=1.0, cx=0.0, cy=0.0):
    return Field.from_function(
        grid, lambda X, Y: amp * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * sigma**2))
    )


def smooth_random(grid, rng, width=1.0, decay=0.5, cplx=False):
    """Random field with Gaussian spectral envelope, windowed by a Gaussian of ``width``."""
    XI, ETA = grid.modes()
    spec = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    v = np.fft.ifft2(spec * np.exp(-decay * (XI**2 + ETA**2)))
    if not cplx:
        v = v.real
    X, Y = grid.mesh()
    v = v / np.max(np.abs(v)) * np.exp(-(X**2 + Y**2) / (2 * width**2))
    return Field(grid, v, "physical")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def box40():
    return make_grid(128, 128, 40.0, 40.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[num]
        tr.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {line}")
