"""Qubit-resonator junction (quantum Rabi model) and its analytic limits.

The numeric route builds the Hamiltonian on a truncated Fock space,
diagonalizes it with the in-house Jacobi solver, and exports the lowest
levels together with the coupling operators (resonator quadrature to the
left bath, qubit flux to the right bath) as a JunctionModel.  The rotating
wave approximation, second-order Van Vleck perturbation theory and the
generalized RWA provide closed-form spectra used for cross-checks and for
interpreting the conductance features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import ValidationError, hermitian_eigensystem
from .model import JunctionModel

__all__ = ["RabiParams", "ApproxSpectrum", "build_rabi_junction", "rwa_spectrum",
           "vvpt_spectrum", "grwa_spectrum", "kondo_temperature",
           "grwa_zero_bias_gap", "generalized_laguerre"]

CONVERGENCE_TOL = 1e-10
CONVERGENCE_EXTRA = 10


@dataclass(frozen=True)
class RabiParams:
    """Flux-qubit + resonator parameters, all in units of omega_r by default."""

    epsilon: float          # qubit bias
    delta: float            # qubit tunneling splitting
    g: float                # qubit-resonator coupling
    omega_r: float = 1.0
    fock_cutoff: int = 40
    retained_levels: int = 5

    def __post_init__(self):
        if not self.omega_r > 0:
            raise ValidationError("omega_r must be positive")
        if self.g < 0:
            raise ValidationError("g must be >= 0")
        if self.fock_cutoff < self.retained_levels + 10:
            raise ValidationError("fock_cutoff must exceed retained_levels + 10")

    @property
    def omega_q(self) -> float:
        return float(np.hypot(self.epsilon, self.delta))


@dataclass(frozen=True)
class ApproxSpectrum:
    """Closed-form spectrum of one approximation scheme.

    levels follows the scheme's own doublet indexing, which orders correctly
    only at small coupling; sorted() re-orders ascending and reports the
    permutation.  q_elements holds the coupling matrix elements out of the
    ground state where the scheme provides them.
    """

    method: str
    levels: np.ndarray
    u_minus: np.ndarray
    u_plus: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray
    q_elements: dict[str, float] = field(default_factory=dict)

    def sorted(self) -> tuple[np.ndarray, np.ndarray]:
        perm = np.argsort(self.levels, kind="stable")
        return self.levels[perm], perm

    def doublet_norm_residual(self) -> float:
        return float(max(np.max(np.abs(self.u_minus**2 + self.v_minus**2 - 1.0)),
                         np.max(np.abs(self.u_plus**2 + self.v_plus**2 - 1.0))))


# ---------------------------------------------------------------------------
# numeric diagonalization
# ---------------------------------------------------------------------------

def _rabi_hamiltonian(p: RabiParams, n_fock: int) -> np.ndarray:
    ident_f = np.eye(n_fock)
    a = np.diag(np.sqrt(np.arange(1, n_fock)), 1)
    x = a + a.T
    num = a.T @ a
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    h = (-0.5 * p.epsilon * np.kron(sz, ident_f)
         - 0.5 * p.delta * np.kron(sx, ident_f)
         + p.omega_r * np.kron(np.eye(2), num)
         + p.g * np.kron(sz, x))
    return h


def _diag_lowest(p: RabiParams, n_fock: int, keep: int):
    h = _rabi_hamiltonian(p, n_fock)
    lam, v = hermitian_eigensystem(h)
    return lam[:keep], v[:, :keep], v


def build_rabi_junction(params: RabiParams, left_id: str = "L",
                        right_id: str = "R") -> JunctionModel:
    """Diagonalize the Rabi Hamiltonian and retain the lowest levels.

    The left bath couples to the resonator quadrature a + a^dag, the right
    bath to the qubit sigma_z (localized flux basis).  Raises if increasing
    the Fock cutoff by 10 still moves the retained eigenvalues by more than
    1e-10 * omega_r.
    """
    keep = params.retained_levels
    lam, vk, _ = _diag_lowest(params, params.fock_cutoff, keep)
    lam_chk, _, _ = _diag_lowest(params, params.fock_cutoff + CONVERGENCE_EXTRA, keep)
    drift = float(np.max(np.abs(lam - lam_chk)))
    if drift > CONVERGENCE_TOL * params.omega_r:
        raise ValidationError(
            f"Fock truncation not converged: retained levels move by {drift:.3e}; "
            "increase fock_cutoff")

    n_fock = params.fock_cutoff
    a = np.diag(np.sqrt(np.arange(1, n_fock)), 1)
    q_left_full = np.kron(np.eye(2), a + a.T)
    q_right_full = np.kron(np.diag([1.0, -1.0]), np.eye(n_fock))
    q_left = (vk.conj().T @ q_left_full @ vk).real
    q_right = (vk.conj().T @ q_right_full @ vk).real
    # real Hamiltonian + phase convention => real eigenvectors => symmetric Q
    q_left = 0.5 * (q_left + q_left.T)
    q_right = 0.5 * (q_right + q_right.T)
    return JunctionModel(omega=lam, q_ops={left_id: q_left, right_id: q_right})


def kondo_temperature(model: JunctionModel) -> float:
    """Temperature scale set by the lowest excitation gap, T_K = omega_10."""
    if model.dim < 2:
        raise ValidationError("need at least two levels")
    return float(model.omega[1] - model.omega[0])


# ---------------------------------------------------------------------------
# rotating-wave approximation
# ---------------------------------------------------------------------------

def _doublet_coefficients(delta_n: np.ndarray, off: np.ndarray):
    """Normalized 2x2 diagonalization weights for detuning/coupling arrays."""
    root = np.sqrt(delta_n**2 + off**2)
    um = np.zeros_like(delta_n)
    up = np.zeros_like(delta_n)
    vm = np.zeros_like(delta_n)
    vp = np.zeros_like(delta_n)
    for i, (d, o, r) in enumerate(zip(delta_n, off, root)):
        num_m = d - r
        num_p = d + r
        den_m = np.sqrt(num_m**2 + o**2)
        den_p = np.sqrt(num_p**2 + o**2)
        if den_m < 1e-300:   # decoupled doublet: lower state is pure |e, n-1>
            um[i], vm[i] = 1.0, 0.0
        else:
            um[i], vm[i] = num_m / den_m, -o / den_m
        if den_p < 1e-300:
            up[i], vp[i] = 1.0, 0.0
        else:
            up[i], vp[i] = num_p / den_p, -o / den_p
    return um, up, vm, vp


def rwa_spectrum(params: RabiParams, n_max: int = 5) -> ApproxSpectrum:
    """Jaynes-Cummings spectrum and ground-doublet coupling elements."""
    p = params
    wq = p.omega_q
    gx = p.g * p.delta / wq if wq > 0 else 0.0
    detuning = wq - p.omega_r
    ns = np.arange(1, n_max + 1, dtype=float)
    root = np.sqrt(detuning**2 + 4.0 * ns * gx**2)
    levels = np.empty(2 * n_max + 1)
    levels[0] = -0.5 * wq
    levels[1::2] = (ns - 0.5) * p.omega_r - 0.5 * root
    levels[2::2] = (ns - 0.5) * p.omega_r + 0.5 * root
    um, up, vm, vp = _doublet_coefficients(np.full(n_max, detuning),
                                           2.0 * np.sqrt(ns) * gx)
    q = {"L01": float(vm[0]), "R01": float(um[0] * p.delta / wq) if wq > 0 else 0.0,
         "L02": float(vp[0]), "R02": float(up[0] * p.delta / wq) if wq > 0 else 0.0}
    return ApproxSpectrum(method="RWA", levels=levels, u_minus=um, u_plus=up,
                          v_minus=vm, v_plus=vp, q_elements=q)


# ---------------------------------------------------------------------------
# Van Vleck perturbation theory, second order in g
# ---------------------------------------------------------------------------

def vvpt_detuning(params: RabiParams, n: int = 1) -> float:
    """delta_n = omega_q + 2 n g_x^2/(omega_q + omega_r) - omega_r."""
    wq = params.omega_q
    gx = params.g * params.delta / wq if wq > 0 else 0.0
    wbar = wq + params.omega_r
    return float(wq + 2.0 * n * gx**2 / wbar - params.omega_r)


def vvpt_spectrum(params: RabiParams, n_max: int = 5) -> ApproxSpectrum:
    """Second-order Van Vleck levels; reduces to the RWA as g -> 0."""
    p = params
    wq = p.omega_q
    gz = p.g * p.epsilon / wq if wq > 0 else 0.0
    gx = p.g * p.delta / wq if wq > 0 else p.g
    wbar = wq + p.omega_r
    ns = np.arange(1, n_max + 1, dtype=float)
    wq_n = wq + 2.0 * ns * gx**2 / wbar
    delta_n = wq_n - p.omega_r
    root = np.sqrt(delta_n**2 + 4.0 * ns * gx**2)
    shift = -gz**2 / p.omega_r - gx**2 / wbar
    levels = np.empty(2 * n_max + 1)
    levels[0] = -0.5 * (wq + 2.0 * gx**2 / wbar) - gz**2 / p.omega_r
    levels[1::2] = -0.5 * wq_n + 0.5 * delta_n + ns * p.omega_r + shift - 0.5 * root
    levels[2::2] = -0.5 * wq_n + 0.5 * delta_n + ns * p.omega_r + shift + 0.5 * root
    um, up, vm, vp = _doublet_coefficients(delta_n, 2.0 * np.sqrt(ns) * gx)

    q: dict[str, float] = {}
    if p.epsilon == 0.0:
        # first-order states at zero bias
        r = p.g / (p.delta + p.omega_r)
        norm0 = np.sqrt(1.0 + r**2)
        norm1 = np.sqrt(um[0]**2 + vm[0]**2 * (1.0 + 2.0 * r**2))
        q["L01"] = float((vm[0] * (1.0 + np.sqrt(2.0) * r) + um[0] * r)
                         / (norm0 * norm1))
        q["R01"] = float((um[0] + vm[0] * r) / (norm0 * norm1))
    return ApproxSpectrum(method="VVPT", levels=levels, u_minus=um, u_plus=up,
                          v_minus=vm, v_plus=vp, q_elements=q)


# ---------------------------------------------------------------------------
# generalized rotating-wave approximation
# ---------------------------------------------------------------------------

def generalized_laguerre(n: int, k: int, x: float) -> float:
    """L_n^k(x) by the three-term recurrence (L_0 = 1, L_1 = 1 + k - x)."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    l0 = 1.0
    if n == 0:
        return l0
    l1 = 1.0 + k - x
    for j in range(1, n):
        l0, l1 = l1, ((2.0 * j + 1.0 + k - x) * l1 - (j + k) * l0) / (j + 1.0)
    return float(l1)


def _dressed_gap(delta: float, alpha_t: float, i: int, j: int) -> float:
    """Coupling-dressed tunneling matrix element Delta_ij (i >= j)."""
    if i < j:
        i, j = j, i
    fact = 1.0
    for m in range(j + 1, i + 1):
        fact *= m
    return float(delta * np.exp(-0.5 * alpha_t) * alpha_t**((i - j) / 2.0)
                 / np.sqrt(fact) * generalized_laguerre(j, i - j, alpha_t))


def grwa_spectrum(params: RabiParams, n_max: int = 5) -> ApproxSpectrum:
    """Generalized RWA spectrum of the biased Rabi model.

    Perturbative in the displacement-dressed qubit gap; captures the
    ultrastrong-coupling down-renormalization that pushes the resonance to
    bare detuning Delta > omega_r.
    """
    p = params
    alpha_t = (2.0 * p.g / p.omega_r)**2
    wq_n = np.array([np.hypot(_dressed_gap(p.delta, alpha_t, n, n), p.epsilon)
                     for n in range(n_max + 1)])
    c_plus = np.sqrt((wq_n + p.epsilon) / (2.0 * wq_n))
    c_minus = np.sqrt((wq_n - p.epsilon) / (2.0 * wq_n))
    ns = np.arange(1, n_max + 1)
    delta_n = 0.5 * (wq_n[1:] + wq_n[:-1]) - p.omega_r
    off = np.array([_dressed_gap(p.delta, alpha_t, n, n - 1)
                    * (c_plus[n] * c_plus[n - 1] + c_minus[n] * c_minus[n - 1])
                    for n in ns])
    root = np.sqrt(delta_n**2 + off**2)
    levels = np.empty(2 * n_max + 1)
    levels[0] = -0.5 * wq_n[0] - p.g**2 / p.omega_r
    base = -0.5 * wq_n[1:] + 0.5 * delta_n + ns * p.omega_r - p.g**2 / p.omega_r
    levels[1::2] = base - 0.5 * root
    levels[2::2] = base + 0.5 * root
    um, up, vm, vp = _doublet_coefficients(delta_n, off)
    q = {"L01": float(4.0 * p.g / p.omega_r * um[0] * c_minus[0] * c_plus[0]
                      + vm[0] * (c_minus[0] * c_minus[1] + c_plus[0] * c_plus[1])),
         "R01": float(-2.0 * um[0] * c_minus[0] * c_plus[0])}
    return ApproxSpectrum(method="GRWA", levels=levels, u_minus=um, u_plus=up,
                          v_minus=vm, v_plus=vp, q_elements=q)


def grwa_zero_bias_gap(delta: float, g: float, omega_r: float = 1.0) -> float:
    """Closed-form GRWA gap omega_10 at zero bias."""
    alpha_t = (2.0 * g / omega_r)**2
    dt = delta * np.exp(-0.5 * alpha_t)
    d = dt - omega_r - 0.5 * alpha_t * dt
    return float(dt - 0.5 * d - 0.5 * np.sqrt(d**2 + alpha_t * dt**2))
