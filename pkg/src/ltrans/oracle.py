"""Brute-force kernel oracle on a small explicit system + bath Hilbert space.

Builds the full interaction Liouvillian, free propagator and bath-trace
projector as operations on composite density matrices, and multiplies out
the coupling expansion term by term at finite Laplace variable.  Bosonic
modes are truncated oscillators with renormalized thermal weights; fermionic
modes are exact two-level factors with Jordan-Wigner strings, so the
anticommutation bookkeeping of the diagram rules is validated against first
principles.  This module exists for validation; nothing in the production
paths depends on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagrams import DiscreteModeBath
from .linalg import ValidationError

__all__ = ["CompositeSpace", "exact_kernel_order"]

DIM_CAP = 256
DEFAULT_BOSON_LEVELS = 9


@dataclass
class CompositeSpace:
    """System factor + one factor per reservoir mode, with thermal state."""

    omega_sys: np.ndarray
    d_ops: dict[str, np.ndarray]
    baths: list[DiscreteModeBath]
    boson_levels: int = DEFAULT_BOSON_LEVELS
    system_parity: np.ndarray | None = None    # (-1)^N_sys, fermionic systems

    def __post_init__(self):
        self.omega_sys = np.asarray(self.omega_sys, dtype=float)
        self.nsys = len(self.omega_sys)
        self.factors = []                       # (bath_index, mode_index)
        dims = [self.nsys]
        for bi, b in enumerate(self.baths):
            for mi in range(len(b.modes)):
                self.factors.append((bi, mi))
                dims.append(2 if b.statistics == "fermi" else self.boson_levels)
        self.dims = dims
        self.dim = int(np.prod(dims))
        if self.dim > DIM_CAP:
            raise ValidationError(
                f"composite dimension {self.dim} exceeds the cap {DIM_CAP}")
        self._build()

    def _embed(self, ops: list[np.ndarray | None]) -> np.ndarray:
        out = np.eye(1, dtype=complex)
        for d, op in zip(self.dims, ops):
            out = np.kron(out, np.eye(d, dtype=complex) if op is None else op)
        return out

    def _build(self):
        nfac = len(self.dims)
        h_bath = np.zeros((self.dim, self.dim), dtype=complex)
        h_int = np.zeros((self.dim, self.dim), dtype=complex)
        rho_factors = []
        any_fermi = any(b.statistics == "fermi" for b in self.baths)
        if any_fermi and self.system_parity is None:
            raise ValidationError("fermionic modes need system_parity")

        for k, (bi, mi) in enumerate(self.factors, start=1):
            bath = self.baths[bi]
            om, cpl = bath.modes[mi]
            ops: list[np.ndarray | None] = [None] * nfac
            if bath.statistics == "fermi":
                lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
                number = np.diag([0.0, 1.0]).astype(complex)
                ops[k] = number
                h_bath += om * self._embed(ops)
                # Jordan-Wigner string through the system and earlier modes
                cops: list[np.ndarray | None] = [None] * nfac
                cops[0] = self.system_parity.astype(complex)
                for kk, (bj, mj) in enumerate(self.factors, start=1):
                    if kk < k and self.baths[bj].statistics == "fermi":
                        cops[kk] = np.diag([1.0, -1.0]).astype(complex)
                cops[k] = lower
                c_op = self._embed(cops)
                dops: list[np.ndarray | None] = [None] * nfac
                dops[0] = self.d_ops[bath.id].astype(complex)
                d_op = self._embed(dops)
                h_int += cpl * (c_op.conj().T @ d_op + d_op.conj().T @ c_op)
                w = np.array([1.0, np.exp(-bath.beta * (om - bath.mu))])
                rho_factors.append(np.diag(w / np.sum(w)))
            else:
                nb = self.boson_levels
                a = np.diag(np.sqrt(np.arange(1, nb)), 1).astype(complex)
                ops[k] = a.conj().T @ a
                h_bath += om * self._embed(ops)
                qops: list[np.ndarray | None] = [None] * nfac
                qops[0] = self.d_ops[bath.id].astype(complex)
                xops: list[np.ndarray | None] = [None] * nfac
                xops[k] = a + a.conj().T
                h_int += cpl * (self._embed(qops) @ self._embed(xops))
                w = np.exp(-bath.beta * om * np.arange(nb))
                rho_factors.append(np.diag(w / np.sum(w)))

        sys_ops: list[np.ndarray | None] = [None] * nfac
        sys_ops[0] = np.diag(self.omega_sys).astype(complex)
        self.h_free_diag = np.diag(self._embed(sys_ops) + h_bath).real
        self.h_int = h_int
        rho_b = np.eye(1, dtype=complex)
        for r in rho_factors:
            rho_b = np.kron(rho_b, r)
        self.rho_bath = rho_b

    # superoperator actions on composite density matrices -------------------

    def liouville_int(self, x: np.ndarray) -> np.ndarray:
        return -1j * (self.h_int @ x - x @ self.h_int)

    def free_resolvent(self, x: np.ndarray, lam: complex) -> np.ndarray:
        de = self.h_free_diag[:, None] - self.h_free_diag[None, :]
        return x / (lam + 1j * de)

    def trace_bath(self, x: np.ndarray) -> np.ndarray:
        nb = self.dim // self.nsys
        return np.einsum("aibi->ab", x.reshape(self.nsys, nb, self.nsys, nb))

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.kron(self.trace_bath(x), self.rho_bath)

    def complement(self, x: np.ndarray) -> np.ndarray:
        return x - self.project(x)


def exact_kernel_order(space: CompositeSpace, lam: complex, order: int,
                       reducible_subtraction: bool = True) -> np.ndarray:
    """Order-by-order kernel term as an N^2 x N^2 system superoperator.

    Expands Tr_B{ L_V G0 [Q L_V Q G0]^(order-2) L_V (. x rho_B) }; the Q
    projectors implement the subtraction of reducible contributions.  With
    reducible_subtraction=False the bare product (no Q) is returned, which
    differs from order 4 upward.
    """
    if order < 2:
        raise ValidationError("order must be >= 2")
    if not np.real(lam) > 0:
        raise ValidationError("need Re lam > 0")
    ns = space.nsys
    kernel = np.zeros((ns * ns, ns * ns), dtype=complex)
    for n in range(ns):
        for m in range(ns):
            e = np.zeros((ns, ns), dtype=complex)
            e[n, m] = 1.0
            x = np.kron(e, space.rho_bath)
            x = space.liouville_int(x)
            x = space.free_resolvent(x, lam)
            for _ in range(order - 2):
                if reducible_subtraction:
                    x = space.complement(x)
                x = space.liouville_int(x)
                if reducible_subtraction:
                    x = space.complement(x)
                x = space.free_resolvent(x, lam)
            x = space.liouville_int(x)
            kernel[:, n * ns + m] = space.trace_bath(x).reshape(ns * ns)
    return kernel
