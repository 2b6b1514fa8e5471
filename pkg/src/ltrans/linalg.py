"""Dense complex Hermitian eigensolver and basis transforms.

The eigensolver is a cyclic Jacobi iteration with complex plane rotations.
It is deliberately dependency-free (no LAPACK) so that results are bitwise
reproducible across platforms and runs; the unit tests cross-check it
against numpy and against characteristic-polynomial roots.
"""

from __future__ import annotations

import numpy as np

__all__ = ["hermitian_eigensystem", "to_eigenbasis", "ValidationError", "NumericError"]


class ValidationError(ValueError):
    """Input violates a documented precondition."""


class NumericError(RuntimeError):
    """Iteration failed to converge within its cap."""


HERMITICITY_RTOL = 1e-12
UNITARITY_TOL = 1e-10
OFFDIAG_TOL_FACTOR = 1e-14
MAX_SWEEPS = 100


def _check_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {h.shape}")
    scale = max(np.max(np.abs(h)), 1e-300)
    dev = np.max(np.abs(h - h.conj().T))
    if dev > HERMITICITY_RTOL * scale:
        raise ValidationError(
            f"matrix is not Hermitian: max |H - H^dag| = {dev:.3e} "
            f"exceeds {HERMITICITY_RTOL:.1e} * max|H| = {HERMITICITY_RTOL * scale:.3e}"
        )
    return 0.5 * (h + h.conj().T)


def hermitian_eigensystem(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a complex Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvalues ascending and
    eigenvectors as unitary columns.  The phase of each eigenvector is fixed
    so that its largest-magnitude component is real and positive, which makes
    repeated runs on identical input bitwise identical.  Degenerate
    eigenvalues are returned in input-stable order.
    """
    a = _check_hermitian(h)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n == 1:
        return a.real.reshape(1).copy(), v

    norm_h = np.linalg.norm(a)
    thresh = OFFDIAG_TOL_FACTOR * max(norm_h, 1e-300)

    def offdiag_norm(mat):
        stripped = mat.copy()
        np.fill_diagonal(stripped, 0.0)
        return np.linalg.norm(stripped)

    converged = False
    for _ in range(MAX_SWEEPS):
        if offdiag_norm(a) <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0.0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c * phase  # rotation [[c, s], [-conj(s), c]] on (p, q)

                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - np.conj(s) * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * rowq
                a[q, :] = np.conj(s) * rowp + c * rowq
                # the pivot is annihilated exactly; diagonal stays real
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real

                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - np.conj(s) * vq
                v[:, q] = s * vp + c * vq
    if not converged:
        off = offdiag_norm(a)
        if off > thresh:
            raise NumericError(
                f"Jacobi iteration did not converge within {MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {off:.3e}, threshold {thresh:.3e})"
            )

    lam = np.diag(a).real.copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    v = v[:, order]
    # phase convention: largest-magnitude component real positive
    for k in range(n):
        j = int(np.argmax(np.abs(v[:, k])))
        z = v[j, k]
        v[:, k] *= np.conj(z) / abs(z)
    return lam, v


def to_eigenbasis(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Transform a matrix into the basis of eigenvector columns, V^dag A V."""
    a = np.asarray(a, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if a.shape != v.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"dimension mismatch: A {a.shape} vs V {v.shape}")
    dev = np.max(np.abs(v.conj().T @ v - np.eye(v.shape[0])))
    if dev > UNITARITY_TOL:
        raise ValidationError(f"V is not unitary: max |V^dag V - 1| = {dev:.3e}")
    return v.conj().T @ a @ v
