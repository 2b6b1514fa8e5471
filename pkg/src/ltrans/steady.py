"""Steady-state solvers: full secular, partial secular, and the analytic
three-level coherence cross-check.

The partial-secular solver keeps the coherences of quasi-degenerate level
pairs coupled to the populations and solves the resulting real linear system
with a trace constraint replacing one redundant population row.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .linalg import ValidationError, NumericError
from .model import JunctionModel
from .redfield import RateMatrix, RedfieldTensor

__all__ = ["SteadyState", "FrequencyClusters", "cluster_bohr_frequencies",
           "full_secular_steady", "partial_secular_steady",
           "three_level_coherence_analytic", "propagate_rate_equation"]

log = logging.getLogger(__name__)

TRACE_TOL = 1e-12
POSITIVITY_WARN = -1e-8
CONDITION_WARN = 1e12
DEFAULT_CLUSTER_FACTOR = 10.0


@dataclass(frozen=True)
class SteadyState:
    """Stationary reduced density matrix with bookkeeping of kept coherences."""

    rho: np.ndarray
    retained_pairs: tuple[tuple[int, int], ...]
    solver_tag: str

    @property
    def populations(self) -> np.ndarray:
        return np.diag(self.rho).real

    def check(self) -> None:
        tr = np.trace(self.rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NumericError(f"steady state trace deviates: {tr}")
        herm = np.max(np.abs(self.rho - self.rho.conj().T))
        if herm > TRACE_TOL:
            raise NumericError(f"steady state not Hermitian: {herm:.3e}")
        pmin = float(np.min(self.populations))
        if pmin < POSITIVITY_WARN:
            log.warning("steady-state population below zero: %.3e "
                        "(weak-coupling theory is leaving its validity range)", pmin)


@dataclass(frozen=True)
class FrequencyClusters:
    """Partition of index pairs into retained (quasi-degenerate) and dropped."""

    retained: frozenset[tuple[int, int]]
    threshold: float

    def is_retained(self, n: int, m: int) -> bool:
        return (n, m) in self.retained


def cluster_bohr_frequencies(model: JunctionModel, gamma_scale: float,
                             c: float = DEFAULT_CLUSTER_FACTOR) -> FrequencyClusters:
    """Retain the pair (n, m) iff |omega_nm| <= c * gamma_scale.

    gamma_scale should be the magnitude of the largest relevant relaxation
    rate; diagonal pairs are always retained and the set is symmetric.
    """
    if not gamma_scale > 0:
        raise ValidationError("gamma_scale must be positive")
    bohr = model.bohr_matrix()
    thresh = c * gamma_scale
    retained = {(i, i) for i in range(model.dim)}
    for i in range(model.dim):
        for j in range(model.dim):
            if i != j and abs(bohr[i, j]) <= thresh:
                retained.add((i, j))
                retained.add((j, i))
    return FrequencyClusters(retained=frozenset(retained), threshold=thresh)


# ---------------------------------------------------------------------------
# full secular
# ---------------------------------------------------------------------------

def _connected_components(gamma: np.ndarray, tol: float) -> list[list[int]]:
    n = gamma.shape[0]
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(n):
            if i != j and (abs(gamma[i, j]) > tol or abs(gamma[j, i]) > tol):
                parent[find(i)] = find(j)
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return list(comps.values())


def full_secular_steady(rates: RateMatrix) -> SteadyState:
    """Stationary populations of the classical rate equation gamma @ p = 0."""
    g = rates.gamma
    n = g.shape[0]
    scale = max(np.max(np.abs(g)), 1e-300)
    comps = _connected_components(g, 1e-14 * scale)
    if len(comps) > 1:
        raise ValidationError(
            f"rate graph is disconnected; stationary state not unique. "
            f"Components: {comps}")
    a = g.copy()
    a[0, :] = 1.0          # replace the lowest-index redundant row by the trace
    b = np.zeros(n)
    b[0] = 1.0
    p = np.linalg.solve(a, b)
    resid = float(np.max(np.abs(g @ p)))
    if resid > 1e-12 * scale:
        raise NumericError(f"rate-equation residual too large: {resid:.3e}")
    state = SteadyState(rho=np.diag(p.astype(complex)),
                        retained_pairs=tuple((i, i) for i in range(n)),
                        solver_tag="FullSecular")
    state.check()
    return state


def propagate_rate_equation(rates: RateMatrix, p0: np.ndarray, t: float,
                            steps: int = 200000) -> np.ndarray:
    """Explicit RK4 integration of dp/dt = gamma @ p; test oracle only."""
    g = rates.gamma
    p = np.asarray(p0, dtype=float).copy()
    h = t / steps
    for _ in range(steps):
        k1 = g @ p
        k2 = g @ (p + 0.5 * h * k1)
        k3 = g @ (p + 0.5 * h * k2)
        k4 = g @ (p + h * k3)
        p = p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return p


# ---------------------------------------------------------------------------
# partial secular
# ---------------------------------------------------------------------------

def _pair_unknowns(dim: int, clusters: FrequencyClusters):
    """Real unknown layout: populations first, then (Re, Im) per n<m pair."""
    pops = [(i, i) for i in range(dim)]
    cohs = sorted((n, m) for (n, m) in clusters.retained if n < m)
    return pops, cohs


def partial_secular_steady(model: JunctionModel, k2: RedfieldTensor,
                           clusters: FrequencyClusters,
                           lamb_shift: bool = True) -> SteadyState:
    """Solve 0 = -i w_nm rho_nm + sum K[n,m,n',m'] rho_n'm' on retained pairs.

    Unknowns are the populations and Re/Im of each retained coherence; the
    population equation of the lowest state is replaced by the trace
    constraint.  With lamb_shift=False the imaginary (level-shift) part of
    the diagonal coherence couplings K[n,m,n,m] is discarded.
    """
    n = model.dim
    if k2.dim != n:
        raise ValidationError("kernel dimension does not match the model")
    k = k2.k
    if not lamb_shift:
        k = k.copy()
        for (a, b) in clusters.retained:
            if a != b:
                k[a, b, a, b] = k[a, b, a, b].real
    bohr = model.bohr_matrix()
    pops, cohs = _pair_unknowns(n, clusters)
    nun = len(pops) + 2 * len(cohs)

    def col_re(pair):  # column index of Re rho_pair
        if pair[0] == pair[1]:
            return pair[0]
        return n + 2 * cohs.index(pair)

    # accumulate the complex linear map L(rho) restricted to retained pairs,
    # expressed on real unknowns x = (p_0..p_{N-1}, Re c_1, Im c_1, ...)
    rows_eq = pops + cohs
    a = np.zeros((nun, nun))
    for r, (rn, rm) in enumerate(rows_eq):
        # complex row: -i w_nm rho_nm + sum_{n'm' retained} K rho
        crow = np.zeros(nun, dtype=complex)

        def add(coeff: complex, src: tuple[int, int]):
            sn, sm = src
            if sn == sm:
                crow[sn] += coeff
            elif sn < sm:
                j = col_re((sn, sm))
                crow[j] += coeff
                crow[j + 1] += 1j * coeff
            else:  # rho_{sn,sm} = conj(rho_{sm,sn})
                j = col_re((sm, sn))
                crow[j] += coeff
                crow[j + 1] += -1j * coeff

        add(-1j * bohr[rn, rm], (rn, rm))
        for (sn, sm) in clusters.retained:
            add(k[rn, rm, sn, sm], (sn, sm))

        if rn == rm:
            a[rn, :] = crow.real   # population rows are real
        else:
            i0 = col_re((rn, rm))
            a[i0, :] = crow.real
            a[i0 + 1, :] = crow.imag

    b = np.zeros(nun)
    a[0, :] = 0.0
    a[0, :n] = 1.0                 # trace row replaces population row 0
    b[0] = 1.0

    cond = np.linalg.cond(a)
    if cond > CONDITION_WARN:
        log.warning("partial-secular system badly conditioned: cond = %.3e", cond)
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"partial-secular system is singular: {exc}") from exc

    rho = np.zeros((n, n), dtype=complex)
    for i in range(n):
        rho[i, i] = x[i]
    for idx, (pn, pm) in enumerate(cohs):
        c = x[n + 2 * idx] + 1j * x[n + 2 * idx + 1]
        rho[pn, pm] = c
        rho[pm, pn] = np.conj(c)

    retained = tuple(sorted(clusters.retained))
    state = SteadyState(rho=rho, retained_pairs=retained, solver_tag="PartialSecular")
    state.check()

    # residual of the retained-block equations (excluding the replaced row)
    resid = 0.0
    for (rn, rm) in rows_eq[1:]:
        val = -1j * bohr[rn, rm] * rho[rn, rm]
        for (sn, sm) in clusters.retained:
            val += k[rn, rm, sn, sm] * rho[sn, sm]
        resid = max(resid, abs(val))
    scale = max(np.max(np.abs(k)), 1e-300)
    if resid > 1e-10 * scale:
        raise NumericError(f"partial-secular residual {resid:.3e} exceeds tolerance")
    return state


# ---------------------------------------------------------------------------
# analytic three-level coherence (states 0, 1, 2 with 1, 2 quasi-degenerate)
# ---------------------------------------------------------------------------

def three_level_coherence_analytic(k2: RedfieldTensor,
                                   omega_12: float) -> tuple[complex, np.ndarray]:
    """Closed-form steady state of the three-level partial-secular equations.

    Returns (rho_12, populations).  Requires the kernel of a three-level
    model whose states 1 and 2 are quasi-degenerate; the retained coherence
    is rho_12 only.
    """
    if k2.dim != 3:
        raise ValidationError("three-level solver needs a 3x3 model kernel")
    k = k2.k
    om_p = omega_12 - k[1, 2, 1, 2].imag + k[1, 2, 2, 1].imag
    om_m = omega_12 - k[1, 2, 1, 2].imag - k[1, 2, 2, 1].imag
    big_p = k[1, 2, 1, 2].real + k[1, 2, 2, 1].real
    big_m = k[1, 2, 1, 2].real - k[1, 2, 2, 1].real

    den = om_p * om_m + big_p * big_m
    if abs(den) < 1e-300:
        raise NumericError("coherence denominator vanished (exact degeneracy)")

    a = np.zeros(3)
    b = np.zeros(3)
    for i in range(3):
        kp = k[1, 2, i, i].real
        kpp = k[1, 2, i, i].imag
        b[i] = (om_m * kp + big_p * kpp) / den
        a[i] = (kpp - big_m * b[i]) / om_m

    gamma = np.zeros((3, 3))
    for nn in (1, 2):
        for i in range(3):
            gamma[nn, i] = (k[nn, nn, i, i].real
                            + 2.0 * (k[nn, nn, 1, 2].real * a[i]
                                     + k[nn, nn, 1, 2].imag * b[i]))

    # 0 = G_n0 + (G_n1 - G_n0) rho11 + (G_n2 - G_n0) rho22,  n = 1, 2
    m = np.array([[gamma[1, 1] - gamma[1, 0], gamma[1, 2] - gamma[1, 0]],
                  [gamma[2, 1] - gamma[2, 0], gamma[2, 2] - gamma[2, 0]]])
    rhs = -np.array([gamma[1, 0], gamma[2, 0]])
    rho11, rho22 = np.linalg.solve(m, rhs)
    pops = np.array([1.0 - rho11 - rho22, rho11, rho22])

    rho12_re = float(a @ pops)
    rho12_im = -float(b @ pops)
    return complex(rho12_re, rho12_im), pops
