"""Small symmetric-matrix linear algebra.

Covariance matrices here are tiny (2x2 for the storm model, up to ~6x6 in
tests), so the eigensolver is self-contained: a closed form for dimension 2
and cyclic Jacobi rotations above that. Eigenvalues are reported through
their square roots (ellipse semi-axes), sorted descending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateCovariance",
    "SymPosDefMatrix",
    "EigenDecomposition",
    "sym_eigen",
]

# Relative eigenvalue floor below which a matrix counts as singular
# (condition number > 1e12).
_PD_RTOL = 1e-12

_JACOBI_SWEEPS = 50
_OFFDIAG_RTOL = 1e-14


class DegenerateCovariance(ValueError):
    """Matrix is not numerically positive definite (collinear or duplicate data)."""


def _jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns (eigenvalues, V) with columns of V the eigenvectors, unordered.
    Sweeps until the off-diagonal Frobenius norm falls below
    _OFFDIAG_RTOL times the matrix Frobenius norm.
    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(_JACOBI_SWEEPS):
        # Frobenius norm of the off-diagonal part, summed directly; the
        # textbook ||A||^2 - sum(diag^2) form cancels catastrophically once
        # the matrix is nearly diagonal.
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off <= _OFFDIAG_RTOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= _OFFDIAG_RTOL * scale / (n * n):
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / a[p, q]
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    return np.diag(a).copy(), v


def _eigh_2x2(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigendecomposition of a symmetric 2x2 matrix.

    Returns (eigenvalues, V) with columns of V the unit eigenvectors.
    """
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    half_tr = 0.5 * (a + c)
    half_diff = 0.5 * (a - c)
    radius = math.hypot(half_diff, b)
    lam1 = half_tr + radius
    lam2 = half_tr - radius
    if radius == 0.0 or abs(b) == 0.0:
        vals = np.array([a, c])
        return vals, np.eye(2)
    # Eigenvector of lam1; the branch keeps the bigger component in the
    # denominator for stability.
    if half_diff >= 0.0:
        v1 = np.array([half_diff + radius, b])
    else:
        v1 = np.array([b, radius - half_diff])
    v1 /= math.hypot(v1[0], v1[1])
    v2 = np.array([-v1[1], v1[0]])
    return np.array([lam1, lam2]), np.column_stack([v1, v2])


def _canonical_sign(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first component of significant magnitude is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        k = int(np.argmax(np.abs(col)))
        if col[k] < 0.0:
            out[:, j] = -col
    return out


@dataclass(frozen=True)
class SymPosDefMatrix:
    """Symmetric positive definite matrix, validated at construction.

    Raises DegenerateCovariance when the smallest eigenvalue is at most
    _PD_RTOL times the largest (or nonpositive).
    """

    entries: np.ndarray
    dim: int = field(init=False)

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"SymPosDefMatrix: expected a square matrix, got shape {m.shape}")
        scale = float(np.max(np.abs(m))) or 1.0
        if np.max(np.abs(m - m.T)) > 1e-12 * scale:
            raise ValueError("SymPosDefMatrix: matrix is not symmetric")
        m = 0.5 * (m + m.T)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "dim", m.shape[0])
        vals = _eigh_2x2(m)[0] if self.dim == 2 else _jacobi_eigh(m)[0]
        largest = float(np.max(vals))
        smallest = float(np.min(vals))
        if largest <= 0.0 or smallest <= _PD_RTOL * largest:
            raise DegenerateCovariance(
                f"matrix is not positive definite (eigenvalues {smallest:.3e} .. {largest:.3e})")

    def __array__(self, dtype=None) -> np.ndarray:
        return np.asarray(self.entries, dtype=dtype)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))


@dataclass(frozen=True)
class EigenDecomposition:
    """Orthogonal diagonalization S = Q^T diag(a_i^2) Q.

    Rows of ``rotation`` are the eigenvectors; ``semi_axes`` holds the
    square roots of the eigenvalues, sorted descending (ties keep original
    axis order).
    """

    rotation: np.ndarray
    semi_axes: np.ndarray

    def reconstruct(self) -> np.ndarray:
        d = np.diag(self.semi_axes ** 2)
        return self.rotation.T @ d @ self.rotation


def sym_eigen(sigma: SymPosDefMatrix) -> EigenDecomposition:
    """Eigendecomposition of a symmetric positive definite matrix.

    Closed form for dim 2, cyclic Jacobi otherwise. Deterministic: axes
    sorted by descending eigenvalue (stable under ties) and eigenvector
    signs canonicalized.
    """
    m = sigma.entries
    if sigma.dim == 2:
        vals, vecs = _eigh_2x2(m)
    else:
        vals, vecs = _jacobi_eigh(m)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = _canonical_sign(vecs[:, order])
    if np.min(vals) <= 0.0:
        raise DegenerateCovariance("matrix is not positive definite")
    rotation = vecs.T.copy()
    rotation.flags.writeable = False
    semi_axes = np.sqrt(vals)
    semi_axes.flags.writeable = False
    return EigenDecomposition(rotation=rotation, semi_axes=semi_axes)
