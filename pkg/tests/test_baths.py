import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import digamma as scipy_digamma

from ltrans.baths import (bose_signed, digamma, dn_dDeltaT, fermi_pv_integral,
                          matsubara_sums, occupation, spectral_density, w_rate,
                          w_rate_pv_oracle, w_rate_real, w_rate_real_resummed,
                          wbar_rate)
from ltrans.linalg import NumericError, ValidationError
from ltrans.model import Reservoir, SpectralDensity


def drude_bath(beta, alpha=1e-3, omega_c=5.0, rid="L"):
    return Reservoir(rid, "bose", beta, 0.0, SpectralDensity(alpha, omega_c))


# ---------------------------------------------------------------------------
# occupation
# ---------------------------------------------------------------------------

def test_bose_log2_point():
    beta = np.log(2.0)
    assert abs(occupation("bose", 1.0, beta) - 1.0) < 1e-14


def test_fermi_half_filling():
    assert occupation("fermi", 0.3, 2.0, mu=0.3) == 0.5


def test_bose_identity():
    n_plus = occupation("bose", 0.3, 1.0)
    n_minus = occupation("bose", 0.3, 1.0, p=-1)
    assert abs(n_minus - n_plus - 1.0) < 1e-15


def test_bose_domain_error():
    with pytest.raises(ValidationError):
        occupation("bose", -0.5, 1.0)
    with pytest.raises(ValidationError):
        occupation("bose", 0.0, 1.0)


def test_fermi_bounds_and_bose_positive():
    for x in (-40.0, -1.0, 0.0, 1.0, 40.0, 2000.0):
        f = occupation("fermi", x, 1.0)
        assert 0.0 <= f <= 1.0
    assert occupation("bose", 1e-6, 1.0) > 0


def test_kms_detailed_balance():
    for bw in np.geomspace(1e-3, 30.0, 25):
        n = occupation("bose", bw, 1.0)
        assert abs(n / (1.0 + n) - np.exp(-bw)) < 1e-13


def test_bose_signed_continuation():
    for w in (0.2, 1.7, 9.0):
        assert abs(bose_signed(-w, 2.0) + 1.0 + bose_signed(w, 2.0)) < 1e-14
    assert bose_signed(1e6, 1.0) == 0.0
    assert bose_signed(-1e6, 1.0) == -1.0


# ---------------------------------------------------------------------------
# spectral density
# ---------------------------------------------------------------------------

def test_drude_special_points():
    sd = SpectralDensity(alpha=1e-3, omega_c=5.0)
    assert spectral_density(sd, 5.0) == pytest.approx(1e-3 * 5.0 / 2.0, rel=0, abs=0)
    assert spectral_density(sd, 0.0) == 0.0


def test_drude_odd_exact():
    sd = SpectralDensity(alpha=2e-2, omega_c=3.0)
    for w in (0.1, 1.0, 7.7):
        assert spectral_density(sd, -w) == -spectral_density(sd, w)


def test_drude_slope_and_bound():
    sd = SpectralDensity(alpha=1e-3, omega_c=5.0)
    h = 1e-6
    slope = (sd.value(h) - sd.value(-h)) / (2.0 * h)
    assert abs(slope - sd.alpha) < 1e-9
    ws = np.linspace(-100, 100, 4001)
    assert np.max(np.abs(sd.value(ws))) <= sd.alpha * sd.omega_c / 2.0 + 1e-18


# ---------------------------------------------------------------------------
# W rates
# ---------------------------------------------------------------------------

def test_w_rate_resonant_piece_paper_point():
    # alpha=1e-3, omega_c=5, beta=10, omega=1: Re W = pi*(1e-3/1.04)/(e^10 - 1)
    bath = drude_bath(beta=10.0)
    want = np.pi * (1e-3 / 1.04) / np.expm1(10.0)
    got = w_rate(1.0, bath).real
    assert abs(got - want) < 1e-12 * want


def test_w_rate_zero_frequency_limit():
    bath = drude_bath(beta=3.0)
    assert w_rate(0.0, bath).real == pytest.approx(np.pi * 1e-3 / 3.0, rel=1e-13)


def test_w_rate_vs_pv_oracle_single_point():
    bath = drude_bath(beta=5.0)
    got = w_rate(0.7, bath)
    ref, err = w_rate_pv_oracle(0.7, bath)
    assert abs(got - ref) <= 1e-8 * abs(ref)


def test_w_rate_vs_pv_oracle_grid():
    # 20-point (beta, omega) grid at alpha=1e-3, omega_c=5
    betas = (0.7, 2.0, 5.0, 8.0)
    omegas = (-2.4, -0.6, 0.31, 1.0, 2.9)
    for beta in betas:
        bath = drude_bath(beta=beta)
        for w in omegas:
            got = w_rate(w, bath)
            ref, _ = w_rate_pv_oracle(w, bath)
            assert abs(got - ref) <= 1e-6 * abs(ref), (beta, w)


def test_w_rate_real_identity_and_resummed():
    bath = drude_bath(beta=2.3)
    scale = np.pi * 1e-3 * 5.0
    for w in (-1.8, -0.2, 0.0, 0.45, 2.2):
        direct = w_rate_real(w, bath)
        ref = (np.pi * bath.spectral.value(w) * bose_signed(w, bath.beta)
               if w != 0.0 else np.pi * 1e-3 / 2.3)
        assert abs(direct - ref) <= 1e-12 * max(abs(ref), 1e-300)
        assert abs(w_rate_real_resummed(w, bath) - ref) <= 1e-11 * scale


def test_w_rate_rejects_fermi():
    lead = Reservoir("L", "fermi", 2.0, 0.0, None)
    with pytest.raises(ValidationError):
        w_rate(1.0, lead)


def test_w_rate_matsubara_pole_guard():
    # omega_c exactly on nu_1 = 2 pi / beta
    omega_c = 5.0
    beta = 2.0 * np.pi / omega_c
    with pytest.raises(NumericError):
        w_rate(1.0, drude_bath(beta=beta))


def test_matsubara_tail_doubling():
    s2a, s3a = matsubara_sums(0.7, 5.0, 4.0, n_terms=128)
    s2b, s3b = matsubara_sums(0.7, 5.0, 4.0, n_terms=256)
    assert abs(s2a - s2b) <= 1e-12
    assert abs(s3a - s3b) <= 1e-12


def test_wbar_rate():
    bath = drude_bath(beta=4.0)
    assert wbar_rate(0.0, bath) == 0.0
    w = 0.3
    assert abs(wbar_rate(w, bath) / w_rate(w, bath) - w) < 1e-12


# ---------------------------------------------------------------------------
# dn/dDeltaT
# ---------------------------------------------------------------------------

def test_dn_ddt_direct_point():
    # beta*omega = 2 at T = 1: omega = 2 -> omega/(4 sinh^2(1))
    want = 2.0 / (4.0 * np.sinh(1.0) ** 2)
    assert dn_dDeltaT(2.0, 1.0) == pytest.approx(want, rel=1e-14)


def test_dn_ddt_underflow():
    assert dn_dDeltaT(3000.0, 1.0) == 0.0
    assert dn_dDeltaT(1400.0, 1.0) >= 0.0


def test_dn_ddt_finite_difference():
    omega, t = 0.9, 0.7
    h = 1e-5 * t
    fd = (bose_signed(omega, 1.0 / (t + h)) - bose_signed(omega, 1.0 / (t - h))) / (2 * h)
    assert abs(fd - dn_dDeltaT(omega, t)) <= 1e-8 * abs(fd)


def test_dn_ddt_validation():
    with pytest.raises(ValidationError):
        dn_dDeltaT(-1.0, 1.0)


# ---------------------------------------------------------------------------
# digamma and the fermionic lead integral
# ---------------------------------------------------------------------------

def test_digamma_known_values():
    gamma_e = 0.5772156649015328606
    assert digamma(0.5).real == pytest.approx(-gamma_e - 2.0 * np.log(2.0), abs=1e-14)
    assert digamma(1.0).real == pytest.approx(-gamma_e, abs=1e-14)


def test_digamma_vs_scipy():
    for x in (0.5, 1.3, 4.2, 11.0):
        assert digamma(x).real == pytest.approx(float(scipy_digamma(x)), abs=1e-13)
    # complex line Re z = 1/2 (scipy's psi supports complex input)
    for y in (0.1, 1.0, 5.0, 40.0):
        got = digamma(0.5 + 1j * y)
        ref = scipy_digamma(complex(0.5, y))
        assert abs(got - ref) < 1e-12 * max(1.0, abs(ref))


def test_fermi_pv_integral_at_mu():
    gamma_e = 0.5772156649015328606
    t, wband = 0.3, 500.0
    got = fermi_pv_integral(0.0, 0.0, t, wband)
    assert got.real == pytest.approx(-gamma_e - 2 * np.log(2) - np.log(wband / (2 * np.pi * t)),
                                     abs=1e-12)
    assert got.imag == pytest.approx(-np.pi / 2, abs=1e-13)


def test_fermi_pv_imaginary_identity():
    t = 0.4
    e = 3.0 * t
    got = fermi_pv_integral(e, 0.0, t, 100.0)
    f = occupation("fermi", e, 1.0 / t)
    assert abs(got.imag + np.pi * f) < 1e-10


def pv_reference(e, mu, t, wband):
    """Finite-bandwidth PV integral with analytic far tails (f=1 / f=0)."""

    def f(x):
        return occupation("fermi", x, 1.0 / t, mu=mu)

    lo_edge, hi_edge = mu - 60.0 * t, mu + 60.0 * t
    d = 0.5 * t
    mid, _ = quad(lambda s: (f(e + s) - f(e - s)) / s, 1e-14, d, limit=200)
    lo, _ = quad(lambda x: f(x) / (x - e), lo_edge, e - d, limit=400)
    hi, _ = quad(lambda x: f(x) / (x - e), e + d, hi_edge, limit=400)
    tail = np.log((e - lo_edge) / (wband + e))     # f = 1 below lo_edge
    return mid + lo + hi + tail


def test_fermi_pv_vs_quadrature():
    t, mu, e = 0.5, 0.1, 0.1 + 0.75
    # wide-band limit: agreement to 1e-6 once W dwarfs (E - mu)
    wband = 1e7 * t
    got = fermi_pv_integral(e, mu, t, wband)
    ref = pv_reference(e, mu, t, wband)
    assert abs(got.real - ref) < 1e-6 * abs(ref)

    # finite W = 1000 T: the wide-band form is off by the O((E-mu)/W) edge term
    wband = 1000.0 * t
    got = fermi_pv_integral(e, mu, t, wband)
    ref = pv_reference(e, mu, t, wband)
    edge = (abs(e - mu) + abs(mu) + t) / wband
    assert abs(got.real - ref) < 3.0 * edge
    # with the band centered on the physics (mu = 0, E ~ 0) the edge term is
    # gone at the 1e-6 level even for W = 1e3 T
    e2 = 1e-3 * t
    got2 = fermi_pv_integral(e2, 0.0, t, wband)
    ref2 = pv_reference(e2, 0.0, t, wband)
    assert abs(got2.real - ref2) < 1e-6 * abs(ref2)

    def f(x):
        return occupation("fermi", x, 1.0 / t, mu=mu)

    assert abs(got.imag + np.pi * f(e)) < 1e-10
