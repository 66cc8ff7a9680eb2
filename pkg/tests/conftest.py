import numpy as np
import pytest

from coopmetro.cli import figure_rows
from coopmetro.scenarios import ScenarioSpec


@pytest.fixture(scope="session")
def fig2_rows():
    return figure_rows("fig2")[1]


@pytest.fixture(scope="session")
def fig3_rows():
    return figure_rows("fig3")[1]


@pytest.fixture(scope="session")
def fig4_rows():
    return figure_rows("fig4")[1]


@pytest.fixture(scope="session")
def fig5_rows():
    return figure_rows("fig5")[1]


@pytest.fixture(scope="session")
def figa1_rows():
    return figure_rows("figA1")[1]


def figure_scenarios():
    """All scenarios at their figure parameters, with per-scenario time grids
    kept short enough for the RK4 cross-checks."""
    return [
        (ScenarioSpec(kind="std-spont", b_z=0.1, gamma=0.5), (0.5, 1.0, 2.0, 5.0)),
        (ScenarioSpec(kind="coop-spont", b_z=0.1, b_x=0.1, gamma=0.5), (0.5, 1.0, 2.0, 5.0)),
        (ScenarioSpec(kind="std-deph", b_z=0.1, eta=0.5), (0.5, 1.0, 2.0, 5.0)),
        (ScenarioSpec(kind="coop-deph", b_z=0.1, b_x=0.1, eta=0.5), (0.5, 1.0, 2.0, 5.0)),
        (ScenarioSpec(kind="coop-thermal", b_z=0.3, b_x=0.1, dipole=2.0, t_e=0.0), (0.5, 1.0, 2.0, 5.0)),
        (ScenarioSpec(kind="two-spin-coop", b_z=1.0, b_x=0.1, dipole=10.0), (0.25, 0.5, 1.0)),
        (ScenarioSpec(kind="unitary-baseline", b_z=0.1, n_spins=1), (0.5, 1.0, 2.0, 5.0)),
        (ScenarioSpec(kind="unitary-baseline", b_z=0.3, n_spins=2), (0.5, 1.0, 2.0)),
    ]


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2.0


def random_mixed_qubit(rng: np.random.Generator, max_bloch: float = 0.9) -> np.ndarray:
    """Mixed qubit state with Bloch radius <= max_bloch (det bounded away from 0)."""
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    r = max_bloch * rng.uniform(0.05, 1.0) * direction
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return 0.5 * (np.eye(2, dtype=complex) + r[0] * sx + r[1] * sy + r[2] * sz)


def random_traceless_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    m = random_hermitian(rng, dim)
    return m - np.trace(m) / dim * np.eye(dim)
