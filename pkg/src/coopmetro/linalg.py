"""Dense complex linear algebra and spin operators for 2- and 4-level systems.

All operators, states and superoperators are plain complex numpy arrays
(row-major, square).  Superoperators go up to dimension 16.  Everything here
is a pure function over immutable inputs; nothing mutates its arguments.

Basis convention: sigma_z |0> = +|0>, sigma_z |1> = -|1>.  With this choice
(sigma_x + i*sigma_y)/2 = |0><1|.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "NonHermitianError",
    "HermitianEigensystem",
    "pauli",
    "identity",
    "tensor",
    "dag",
    "hermitize",
    "herm_deviation",
    "is_hermitian",
    "eigh",
    "expm",
    "ket",
    "projector",
    "outer",
    "normalize",
    "phase_align",
]

HERM_TOL = 1e-10
DEGENERACY_TOL = 1e-9
GAUGE_TOL = 1e-12

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


class NonHermitianError(ValueError):
    """Operator expected to be Hermitian deviates beyond tolerance."""


def pauli(which: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for axis 'x', 'y' or 'z'."""
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {which!r}") from None


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dim(a*b) = dim(a)*dim(b)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dag(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    """Symmetrize (m + m†)/2.  The result is exactly Hermitian entrywise."""
    m = np.asarray(m, dtype=complex)
    return (m + m.conj().T) / 2.0


def herm_deviation(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return herm_deviation(m) <= tol


@dataclass(frozen=True)
class HermitianEigensystem:
    """Eigenvalues (ascending) and unitary eigenvector matrix (columns).

    Phase gauge: the first component of each eigenvector whose magnitude
    exceeds 1e-12 is real and positive.  Within a degenerate cluster
    (eigenvalue gap < 1e-9) columns are ordered by descending magnitude
    of their first component.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k].copy()


def _fix_gauge(vectors: np.ndarray) -> np.ndarray:
    v = vectors.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        nonzero = np.flatnonzero(np.abs(col) > GAUGE_TOL)
        if nonzero.size:
            lead = col[nonzero[0]]
            v[:, k] = col * (lead.conjugate() / abs(lead))
    return v


def _order_degenerate(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Reorder columns inside each degenerate cluster by descending |v[0]|."""
    v = vectors.copy()
    n = values.shape[0]
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] < DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            block = v[:, start:stop]
            order = np.argsort(-np.abs(block[0, :]), kind="stable")
            v[:, start:stop] = block[:, order]
        start = stop
    return v


def eigh(h: np.ndarray, tol: float = HERM_TOL) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix with a deterministic gauge.

    Raises NonHermitianError if max |h - h†| exceeds tol.  Eigenvalues are
    returned ascending; the decomposition satisfies h @ V = V @ diag(w).
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    deviation = herm_deviation(h)
    if deviation > tol:
        raise NonHermitianError(
            f"matrix is not Hermitian: max |h - h†| = {deviation:.3e} > {tol:.1e}"
        )
    values, vectors = np.linalg.eigh(hermitize(h))
    vectors = _order_degenerate(values, vectors)
    vectors = _fix_gauge(vectors)
    return HermitianEigensystem(values=values, vectors=vectors)


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring Padé, via scipy)."""
    return scipy.linalg.expm(np.asarray(m, dtype=complex))


def ket(dim: int, index: int) -> np.ndarray:
    """Computational basis column vector |index> of the given dimension."""
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a><b| for state vectors a, b."""
    return np.outer(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex).conj())


def projector(psi: np.ndarray) -> np.ndarray:
    return outer(psi, psi)


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def phase_align(psi: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate the global phase of psi so that <reference|psi> is real positive.

    Needed before finite-differencing eigenvectors: eigensolver output
    carries an arbitrary phase per call.
    """
    overlap = np.vdot(reference, psi)
    mag = abs(overlap)
    if mag < GAUGE_TOL:
        raise ValueError("states are (numerically) orthogonal; phase undefined")
    return psi * (overlap.conjugate() / mag)
