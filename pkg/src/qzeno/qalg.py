"""Small dense complex linear algebra for exact evolution of d-level systems.

Matrices are plain ``numpy`` complex arrays of shape ``(d, d)``; state vectors
are arrays of shape ``(d,)``. Functions never mutate their inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, InvalidDensity, NonHermitianInput, NotNormalized

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
NORM_TOL = 1e-9
TRACE_TOL = 1e-9
DENSITY_HERMITIAN_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square complex array, raising on bad shapes."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1 or a.size == 0:
        raise DimensionMismatch(f"expected a 1-d state vector, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(m)
    return bool(np.max(np.abs(a - dagger(a))) <= tol)


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    a = as_matrix(m)
    return bool(np.max(np.abs(dagger(a) @ a - np.eye(a.shape[0]))) <= tol)


def is_positive_semidefinite(m, tol: float = -EIGENVALUE_FLOOR) -> bool:
    a = as_matrix(m)
    if not is_hermitian(a, max(tol, HERMITIAN_TOL)):
        return False
    return bool(np.linalg.eigvalsh(_symmetrize(a))[0] >= -tol)


def _symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def basis_state(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(dim: int, index: int) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    p[index, index] = 1.0
    return p


def transition(dim: int, i: int, j: int) -> np.ndarray:
    """Return the operator |i><j|."""
    m = np.zeros((dim, dim), dtype=complex)
    m[i, j] = 1.0
    return m


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a Hermitian matrix.

    Returns ascending real eigenvalues ``w`` and a unitary ``V`` whose columns
    are the eigenvectors, so that ``m == V @ diag(w) @ V^dagger``.
    """
    a = as_matrix(m)
    if not is_hermitian(a):
        raise NonHermitianInput("matrix is not Hermitian within 1e-10")
    # LAPACK zheevd is deterministic for identical inputs on a given build.
    w, v = np.linalg.eigh(_symmetrize(a))
    return w, v


def expm_hermitian(h, t: float) -> np.ndarray:
    """Return the unitary exp(-i h t) through the eigendecomposition of ``h``."""
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    w, v = hermitian_eig(h)
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def check_state(psi, tol: float = NORM_TOL) -> np.ndarray:
    v = as_vector(psi)
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > tol:
        raise NotNormalized(f"state has squared norm {norm2!r}")
    return v


def density_from_state(psi) -> np.ndarray:
    """Return the pure-state density matrix |psi><psi|."""
    v = check_state(psi)
    return np.outer(v, np.conj(v))


def check_density(
    rho,
    *,
    trace_tol: float = TRACE_TOL,
    hermitian_tol: float = DENSITY_HERMITIAN_TOL,
    eigenvalue_floor: float = EIGENVALUE_FLOOR,
) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises ``InvalidDensity`` when Hermiticity, unit trace or positivity fail
    at the given tolerances.
    """
    a = as_matrix(rho)
    herm_dev = float(np.max(np.abs(a - dagger(a))))
    if herm_dev > hermitian_tol:
        raise InvalidDensity(f"not Hermitian (deviation {herm_dev:.3e})")
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidDensity(f"trace is {tr!r}")
    lam = float(np.linalg.eigvalsh(_symmetrize(a))[0])
    if lam < eigenvalue_floor:
        raise InvalidDensity(f"minimum eigenvalue {lam:.3e} below floor")
    return a


def check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"dimension {a.shape[0]} does not match {b.shape[0]}")


def populations(rho: np.ndarray) -> np.ndarray:
    return np.real(np.diag(rho)).copy()


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (a + dagger(a))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Draw a random density matrix from a seeded generator (Ginibre ensemble)."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real
