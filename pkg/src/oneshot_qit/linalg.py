"""Dense Hermitian linear algebra at small dimension (d <= ~64).

Operators are plain complex numpy arrays; ``as_hermitian`` is the gate
through which every routine pulls its inputs, symmetrizing and rejecting
anything that is not (numerically) Hermitian.  All functions are pure,
hold no state, and are safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NumericalError

# Eigenvalue-merge tolerance, relative to the spectral radius.  Controls
# spectrum clustering, support detection, and the projector conventions.
DEFAULT_CLUSTER_TOL = 1e-9

_HERMITICITY_TOL = 1e-12
_RECONSTRUCTION_TOL = 1e-10


def as_hermitian(entries, tol: float = _HERMITICITY_TOL) -> np.ndarray:
    """Return the Hermitian part (A + A†)/2 after validating near-symmetry."""
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    asym = float(np.max(np.abs(a - a.conj().T)))
    if asym > tol * scale:
        raise DomainError(f"matrix is not Hermitian: max asymmetry {asym:.3e}")
    return (a + a.conj().T) / 2


def _radius(eigenvalues: np.ndarray) -> float:
    return float(np.max(np.abs(eigenvalues)))


def _cluster_labels(eigenvalues: np.ndarray, cluster_tol: float) -> np.ndarray:
    """Label ascending eigenvalues, merging gaps below cluster_tol * radius."""
    lam = np.asarray(eigenvalues, dtype=float)
    atol = cluster_tol * _radius(lam)
    labels = np.zeros(lam.size, dtype=int)
    for i in range(1, lam.size):
        labels[i] = labels[i - 1] + (1 if lam[i] - lam[i - 1] > atol else 0)
    return labels


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition of a Hermitian operator.

    ``eigenvalues`` ascend; column ``eigenvectors[:, i]`` belongs to
    ``eigenvalues[i]``.  ``cluster_tol`` is the relative merge tolerance
    used when near-degenerate eigenvalues must be treated as one.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    cluster_tol: float = DEFAULT_CLUSTER_TOL

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def cluster_labels(self) -> np.ndarray:
        return _cluster_labels(self.eigenvalues, self.cluster_tol)

    def clusters(self) -> list[np.ndarray]:
        labels = self.cluster_labels()
        return [np.flatnonzero(labels == k) for k in range(labels[-1] + 1)]


def eig_herm(a, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> EigenSystem:
    """Eigendecompose a Hermitian operator (ascending eigenvalues)."""
    a = as_hermitian(a)
    try:
        lam, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    system = EigenSystem(lam, v, cluster_tol)
    residual = float(np.max(np.abs(system.reconstruct() - a)))
    if residual > _RECONSTRUCTION_TOL * max(1.0, _radius(lam)):
        raise NumericalError(
            f"eigendecomposition residual {residual:.3e} exceeds tolerance"
        )
    return system


def mat_func(
    a,
    f: Callable[[float], float],
    support_only: bool = False,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> np.ndarray:
    """Apply a scalar function to a Hermitian operator through its spectrum.

    With ``support_only`` the function acts on eigenvalues above the
    relative support threshold and the kernel maps to 0 (Moore-Penrose
    style); use it for inverses, logarithms, and negative powers of
    positive semi-definite operators.
    """
    system = eig_herm(a, cluster_tol)
    lam = system.eigenvalues
    out = np.zeros(lam.size, dtype=float)
    if support_only:
        mask = lam > cluster_tol * _radius(lam)
    else:
        mask = np.ones(lam.size, dtype=bool)
    try:
        with np.errstate(all="ignore"):
            out[mask] = [float(f(x)) for x in lam[mask]]
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(
            f"function undefined on a retained eigenvalue ({exc}); "
            "pass support_only to restrict to the support"
        ) from exc
    if not np.all(np.isfinite(out)):
        raise DomainError(
            "function undefined on a retained eigenvalue; "
            "pass support_only to restrict to the support"
        )
    v = system.eigenvectors
    return as_hermitian((v * out) @ v.conj().T)


def positive_part_trace(a) -> float:
    """Sum of the strictly positive eigenvalues."""
    return _positive_part_trace_raw(as_hermitian(a))


def _positive_part_trace_raw(a: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(a)
    return float(np.sum(lam[lam > 0]))


def trace_norm(a) -> float:
    """Schatten-1 norm: the sum of absolute eigenvalues."""
    lam = np.linalg.eigvalsh(as_hermitian(a))
    return float(np.sum(np.abs(lam)))


def pinch(h, l, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> np.ndarray:
    """Erase the blocks of ``l`` that connect distinct eigenvalue clusters of ``h``.

    The result commutes with ``h`` and has the same trace as ``l``.
    """
    h = as_hermitian(h)
    l = as_hermitian(l)
    if h.shape != l.shape:
        raise DomainError(f"dimension mismatch: {h.shape} vs {l.shape}")
    system = eig_herm(h, cluster_tol)
    labels = system.cluster_labels()
    v = system.eigenvectors
    m = v.conj().T @ l @ v
    mask = labels[:, None] == labels[None, :]
    return as_hermitian(v @ (m * mask) @ v.conj().T)


def spec_count(h, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> int:
    """Number of distinct eigenvalue clusters."""
    system = eig_herm(h, cluster_tol)
    return int(system.cluster_labels()[-1]) + 1


def quotient(k, l, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> np.ndarray:
    """Two-sided whitening L^{-1/2} K L^{-1/2} of a PSD numerator.

    ``l`` must be positive definite; a singular denominator is rejected
    with a hint to regularize (mix with a multiple of the identity).
    """
    k = as_hermitian(k)
    l = as_hermitian(l)
    if k.shape != l.shape:
        raise DomainError(f"dimension mismatch: {k.shape} vs {l.shape}")
    k_lam = np.linalg.eigvalsh(k)
    if k_lam[0] < -max(1e-10, cluster_tol * _radius(k_lam)):
        raise DomainError(f"numerator not PSD: min eigenvalue {k_lam[0]:.3e}")
    l_lam = np.linalg.eigvalsh(l)
    if l_lam[0] <= cluster_tol * _radius(l_lam):
        raise DomainError(
            f"denominator is singular (min eigenvalue {l_lam[0]:.3e}); "
            "regularize it, e.g. mix with eps * identity, before dividing"
        )
    inv_sqrt = mat_func(l, lambda x: x ** -0.5)
    return as_hermitian(inv_sqrt @ k @ inv_sqrt)


def projector_leq(a, b, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> np.ndarray:
    """Spectral projector for the event {a <= b}.

    Non-strict convention: eigenvectors of b - a with eigenvalue >=
    -cluster_tol * radius are retained; the complement realizes {a > b}.
    """
    diff = as_hermitian(b) - as_hermitian(a)
    system = eig_herm(diff, cluster_tol)
    atol = cluster_tol * _radius(system.eigenvalues)
    cols = system.eigenvectors[:, system.eigenvalues >= -atol]
    return cols @ cols.conj().T


def support_projector(a, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> np.ndarray:
    """Projector onto the span of eigenvectors with eigenvalue above threshold."""
    system = eig_herm(a, cluster_tol)
    atol = cluster_tol * _radius(system.eigenvalues)
    cols = system.eigenvectors[:, system.eigenvalues > atol]
    return cols @ cols.conj().T
