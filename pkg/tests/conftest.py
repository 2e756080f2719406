import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fourier_rearrangement.grid import Field, GridSpec, Space, inverse_transform

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_field(spec: GridSpec, rng, space=Space.PHYSICAL) -> Field:
    vals = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
    return Field(spec, space, vals)


def central_band(spec: GridSpec) -> np.ndarray:
    """Mask of frequency nodes inside the central half of the grid."""
    idx = spec.index_mesh()
    return np.all([np.abs(k) <= (n - 1) // 4 for k, n in zip(idx, spec.points)], axis=0)


def band_limited_field(spec: GridSpec, rng) -> Field:
    vals = (rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)) * central_band(spec)
    return inverse_transform(Field.frequency(spec, vals))


def gaussian(spec: GridSpec, shift=None) -> Field:
    shift = np.zeros(spec.dim) if shift is None else np.asarray(shift, dtype=float)
    return Field.sample(spec, lambda *x: np.exp(-np.pi * sum((xa - s) ** 2 for xa, s in zip(x, shift))))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per criterion; returns ``verdict(num, name, ok, detail)``."""
    lines = request.config.acceptance_lines

    def verdict(num: int, name: str, ok: bool, detail: str) -> bool:
        line = f"ACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        print(line)
        lines.append(line)
        return ok

    return verdict


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
