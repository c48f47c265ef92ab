"""Whole-line Jacobi coefficients from an admissible representing measure.

The route: the measure determines F; the expansions of F at lambda -> 0 and
|lambda| -> infinity are the 1/z expansions of the two half-line m functions,
whose representing probability measures rho+- have three-term recurrence
coefficients equal to the half-line Jacobi parameters.  Power moments come
out of the series engine by compositional reversion; the recurrence rows are
produced by the modified Chebyshev algorithm with auxiliary Chebyshev
polynomials rescaled to [-R, R], whose modified moments are read directly
off the expansion of the m function in the inverse Joukowski variable of
[-R, R] (going through raw power moments is exponentially unstable).

An independent continued-fraction oracle evaluates the m functions of a
finite coefficient window padded by the free operator, which pins the index
conventions and cross-validates every reconstruction.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import (
    AdmissibilityRequired,
    FreeOperator,
    HankelBreakdown,
    InadmissibleSigma,
    MomentMismatch,
)
from .herglotz import admissible_discrete
from .measure import moment
from .series import (
    DEFAULT_ORDER,
    _compose_dense,
    _conv,
    monomial,
    ts_compose,
    ts_poly,
    ts_revert,
)

ORACLE_PAD = 200
CLAMP_TOL = 1e-6
BREAKDOWN_TOL = 1e-12


@dataclass(frozen=True)
class JacobiWindow:
    """Coefficient window a_n > 0, b_n for n_min <= n <= n_max (a_n couples
    sites n and n+1)."""

    n_min: int
    n_max: int
    a: tuple
    b: tuple
    R: float

    def __post_init__(self):
        if not (self.n_min <= 0 <= self.n_max):
            raise ValueError("window must contain site 0")
        if len(self.a) != self.n_max - self.n_min + 1 or len(self.b) != len(self.a):
            raise ValueError("coefficient arrays must match the window")

    def a_at(self, n):
        return self.a[n - self.n_min] if self.n_min <= n <= self.n_max else 1.0

    def b_at(self, n):
        return self.b[n - self.n_min] if self.n_min <= n <= self.n_max else 0.0

    @staticmethod
    def free(N, R=2.0):
        n = 2 * N + 1
        return JacobiWindow(-N, N, (1.0,) * n, (0.0,) * n, float(R))


@dataclass(frozen=True)
class AsymptoticMoments:
    """Moment data of one half-line spectral measure.

    mu are the power moments (mu[0] = 1 for probability normalization);
    cheb_mu are moments against Chebyshev polynomials rescaled to [-R, R],
    which is what the recurrence extraction actually consumes.  a0/b0 are the
    site-0 coefficients determined by the measure; a_minus1 only exists on
    the minus side.
    """

    side: str
    mu: tuple
    a0: float
    b0: float
    a_minus1: float
    R: float
    cheb_mu: tuple


# ---------------------------------------------------------------------------
# cached universal series


@lru_cache(maxsize=8)
def _lambda_of_u(order):
    """Reversion of u(lambda) = 1/phi(lambda) = -lambda/(1+lambda^2)."""
    coeffs = np.zeros(order - 1)
    coeffs[0::4] = -1.0
    coeffs[2::4] = 1.0
    return ts_revert(ts_poly(coeffs, lead=1, order=order))


@lru_cache(maxsize=32)
def _lambda_small_of_v(R, order):
    """Unit-disk root of lam^2 + z lam + 1 = 0 along z = R(v + 1/v)/2.

    Dense fixed-point iteration on lam = -(2v/R)(1 + lam^2)/(1 + v^2); all
    coefficients stay O(1) because the series has unit radius.
    """
    inv = np.zeros(order)
    inv[0::4] = 1.0
    inv[2::4] = -1.0  # 1/(1+v^2)
    lam = np.zeros(order)
    prev = None
    for _ in range(order // 2 + 2):
        t = _conv(_conv(lam, lam, order), inv, order)
        new = np.zeros(order)
        new[1:] = -(2.0 / R) * (inv[: order - 1] + t[: order - 1])
        if prev is not None and np.array_equal(new, prev):
            break
        prev = lam = new
    return lam


def _f_taylor_dense(sigma, order):
    """Taylor coefficients of F at lambda = 0 (jacobi formula)."""
    c = np.zeros(order)
    s1 = moment(sigma, -1)
    s2 = moment(sigma, -2)
    c[0] = -s1 + s1        # constant of F cancels the k=0 Cauchy term exactly
    c[1] = (1.0 - s2) + s2  # so F(lam) = lam + O(lam^2) holds to the last bit
    for k in range(2, order):
        c[k] = moment(sigma, -1 - k)
    return c


def _positive_moment_gen_dense(sigma, order):
    """G(x) = sum_k s_k x^{k+1} with s_k the positive power moments."""
    g = np.zeros(order)
    for k in range(order - 1):
        g[k + 1] = moment(sigma, k)
    return g


def _cheb_moments_from_m_series(mser_lead1, R, count):
    """Coefficients of m(z(v)) -> Chebyshev moments of its measure.

    Uses 1/(t - z(v)) = -(2v/(1-v^2))/R * (1 + 2 sum T_k(t/R) v^k) so that
    multiplying the v-series of the Cauchy transform by -R(1-v^2)/(2v)
    exposes nu_k = int T_k(t/R) d rho directly.
    """
    shifted = mser_lead1[1:]
    out = shifted.copy()
    out[2:] -= shifted[:-2]
    out *= -R / 2.0
    nu = out[:count].copy()
    nu[1:] *= 0.5
    return nu


# ---------------------------------------------------------------------------
# moment extraction


def rho_plus_moments(sigma, setting, K, order=None):
    """Moments of rho+ from the lambda -> 0 expansion of F.

    Reverts the coordinate u = 1/phi(lambda), composes with the Taylor
    series of F, and reads mu_k from m_plus(z) = -sum mu_k z^{-k-1}.
    """
    order = order if order is not None else max(DEFAULT_ORDER, K + 6)
    fser = ts_poly(_f_taylor_dense(sigma, order), lead=0, order=order)
    mser = ts_compose(fser, _lambda_of_u(order))
    mu = np.array([-mser.coeff(k + 1) for k in range(K + 1)])
    if abs(mu[0] - 1.0) > 1e-10:
        raise MomentMismatch(f"rho+ normalization check failed: mu0 = {mu[0]!r}")
    lam_v = _lambda_small_of_v(setting.R, order)
    mv = _compose_dense(_f_taylor_dense(sigma, order), lam_v, order)
    nu = _cheb_moments_from_m_series(mv, setting.R, K + 1)
    s2 = moment(sigma, -2)
    a0 = (1.0 - s2) ** -0.5 if s2 < 1.0 else math.nan
    b0 = -moment(sigma, -1) / (1.0 - s2) if s2 < 1.0 else math.nan
    return AsymptoticMoments(
        side="plus", mu=tuple(mu), a0=a0, b0=b0, a_minus1=None,
        R=setting.R, cheb_mu=tuple(nu),
    )


def rho_minus_moments(sigma, setting, K, order=None):
    """Moments of rho- plus the boundary coefficients (a0, b0, a_{-1}).

    a0 = (1 - s_{-2})^{-1/2} and b0 = -s_{-1}/(1 - s_{-2}); the |lambda| ->
    infinity Laurent expansion of -F then carries rho- through
    a0^2 m_-(z) = z - b0 - a_{-1}^2 sum mu_k z^{-k-1}.
    """
    order = order if order is not None else max(DEFAULT_ORDER, K + 6)
    s1 = moment(sigma, -1)
    s2 = moment(sigma, -2)
    s0 = moment(sigma, 0)
    if not s2 < 1.0:
        raise InadmissibleSigma(f"needs s_{{-2}} < 1, got {s2}")
    a0 = (1.0 - s2) ** -0.5
    b0 = -s1 / (1.0 - s2)
    q = 1.0 - s2 + s0
    if not q > 0.0:
        raise InadmissibleSigma(f"needs 1 - s_{{-2}} + s_0 > 0, got {q}")
    a_minus1 = a0 * math.sqrt(q)

    lam_u = _lambda_of_u(order)
    # v = the large root: lam_small * v = 1 and lam_small + v = -1/u
    v = monomial(-1.0, -1, order=order) - lam_u
    gser = ts_poly(_positive_moment_gen_dense(sigma, order), lead=0, order=order)
    f_at_v = monomial(-s1, 0, order=order) + (1.0 - s2) * v - ts_compose(gser, lam_u)
    mser = -(a0 ** 2) * f_at_v
    lead_c = mser.coeff(-1)
    const_c = mser.coeff(0)
    if abs(lead_c - 1.0) > 1e-10 or abs(const_c - (-b0)) > 1e-8 * max(1.0, abs(b0)):
        raise MomentMismatch(
            f"rho- expansion inconsistent: z-coefficient {lead_c}, constant {const_c}"
        )
    mu = np.array([-mser.coeff(k + 1) for k in range(K + 1)]) / a_minus1 ** 2
    if abs(mu[0] - 1.0) > 1e-10:
        raise MomentMismatch(f"rho- normalization check failed: mu0 = {mu[0]!r}")

    # Chebyshev moments of rho- from g(z(v)) = (a0^2 m_-(z(v)) - z(v) + b0)/a_{-1}^2
    R = setting.R
    lam_v = _lambda_small_of_v(R, order)
    gl = _compose_dense(_positive_moment_gen_dense(sigma, order), lam_v, order)
    ser = np.zeros(order)  # exponents -1 .. order-2
    c = 1.0 - s2
    ser[0] += a0 ** 2 * c * (R / 2.0)   # -a0^2 c * (-(R/2)/v)
    ser[2] += a0 ** 2 * c * (R / 2.0)
    ser[1:] += a0 ** 2 * c * lam_v[: order - 1]
    ser[1] += a0 ** 2 * s1
    ser[1:] += a0 ** 2 * gl[: order - 1]
    ser[0] -= R / 2.0                    # subtract z(v)
    ser[2] -= R / 2.0
    ser[1] += b0
    if abs(ser[0]) > 1e-9 or abs(ser[1]) > 1e-7 * max(1.0, abs(b0)):
        raise MomentMismatch("rho- Chebyshev expansion lost its leading cancellation")
    nu = _cheb_moments_from_m_series(ser[1:] / a_minus1 ** 2, R, K + 1)
    return AsymptoticMoments(
        side="minus", mu=tuple(mu), a0=a0, b0=b0, a_minus1=a_minus1,
        R=R, cheb_mu=tuple(nu),
    )


# ---------------------------------------------------------------------------
# recurrence extraction (modified Chebyshev)


def _modified_from_power(mu, R, count):
    """Fallback: monic-Chebyshev moments by expanding in the power basis.

    Exponentially lossy with depth; fine for shallow windows when only raw
    power moments are available.
    """
    nu = np.zeros(count)
    pm1 = np.zeros(count + 1)
    pm1[0] = 1.0
    p = np.zeros(count + 1)
    p[1] = 1.0
    m_arr = np.asarray(mu, dtype=float)
    nu[0] = m_arr[0]
    if count > 1:
        nu[1] = m_arr[1]
    for k in range(2, count):
        bhat = R * R / (2.0 if k == 2 else 4.0)
        pn = np.roll(p, 1) - bhat * pm1
        pm1, p = p, pn
        n = min(len(p), len(m_arr))
        nu[k] = float(np.dot(p[:n], m_arr[:n]))
    return nu


def _recurrence_via_cholesky(mu, N):
    """Raw-moment Hankel Cholesky route to (alpha, beta); cross-check only.

    Exponentially ill-conditioned with depth, so this is never on the
    production path, but at shallow N it independently confirms the modified
    Chebyshev output.
    """
    H = np.array([[mu[i + j] for j in range(N + 1)] for i in range(N + 1)])
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise HankelBreakdown(N + 1, str(exc)) from None
    alpha = np.empty(N)
    beta = np.empty(N)
    beta[0] = mu[0]
    for k in range(1, N):
        beta[k] = (L[k, k] / L[k - 1, k - 1]) ** 2
    for k in range(N):
        t1 = L[k + 1, k] / L[k, k]
        t0 = L[k, k - 1] / L[k - 1, k - 1] if k > 0 else 0.0
        alpha[k] = t1 - t0
    return alpha, beta


def _wheeler(nu_monic, N, R):
    """Modified Chebyshev algorithm: monic auxiliary moments -> (alpha, beta)."""
    K = 2 * N
    bhat = np.full(K, R * R / 4.0)
    bhat[0] = 0.0
    if K > 1:
        bhat[1] = R * R / 2.0
    alpha = np.zeros(N)
    beta = np.zeros(N)
    sig_prev = np.zeros(K)
    sig = np.asarray(nu_monic[:K], dtype=float).copy()
    alpha[0] = sig[1] / sig[0]
    beta[0] = sig[0]
    for k in range(1, N):
        sig_new = np.zeros(K)
        for l in range(k, K - k):
            sig_new[l] = (
                sig[l + 1]
                - alpha[k - 1] * sig[l]
                - beta[k - 1] * sig_prev[l]
                + bhat[l] * sig[l - 1]
            )
        if sig_new[k] == 0.0 or sig[k - 1] == 0.0:
            alpha[k:] = np.nan
            beta[k:] = np.nan
            break
        alpha[k] = sig_new[k + 1] / sig_new[k] - sig[k] / sig[k - 1]
        beta[k] = sig_new[k] / sig[k - 1]
        sig_prev, sig = sig, sig_new
    return alpha, beta


def moments_to_recurrence(m, N, allow_early_stop=False):
    """Three-term recurrence coefficients of the orthonormal polynomials.

    Returns (alpha, beta) with beta[0] the total mass and sqrt(beta[k]) the
    off-diagonal entries.  Raises HankelBreakdown at the first nonpositive
    pivot unless allow_early_stop is set, in which case the valid row count
    is returned as a third element.
    """
    if m.cheb_mu is not None and len(m.cheb_mu) >= 2 * N:
        nu = np.asarray(m.cheb_mu[: 2 * N], dtype=float).copy()
        k = np.arange(1, 2 * N)
        nu[1:] *= m.R ** k * 2.0 ** (1 - k)
    else:
        if len(m.mu) < 2 * N:
            raise HankelBreakdown(N, f"need {2 * N} moments for {N} rows, have {len(m.mu)}")
        nu = _modified_from_power(np.asarray(m.mu, dtype=float), m.R, 2 * N)
    alpha, beta = _wheeler(nu, N, m.R)
    n_valid = N
    tol = BREAKDOWN_TOL * max(1.0, m.R ** 2 / 4.0)
    for k in range(1, N):
        if not beta[k] > tol:
            n_valid = k
            break
    if n_valid < N and not allow_early_stop:
        raise HankelBreakdown(n_valid + 1)
    if allow_early_stop:
        return alpha, beta, n_valid
    return alpha, beta


# ---------------------------------------------------------------------------
# window assembly


def _assemble_side(alpha, beta, n_valid, n_rows, clamp_tol):
    """Turn recurrence rows into (a, b) site lists with the free-tail clamp.

    Coefficient deviations from the free values decay geometrically, so once
    a row is within clamp_tol of free the whole remaining tail is below that
    scale and is replaced by the exact free coefficients.  A pivot breakdown
    before any near-free row signals genuinely deficient moments.
    """
    a_rows = np.ones(n_rows)
    b_rows = np.zeros(n_rows)
    for k in range(n_rows):
        if k + 1 >= n_valid and n_valid < len(beta):
            raise HankelBreakdown(
                n_valid + 1,
                "moment pivot failed before the coefficients reached the free tail",
            )
        a_k = math.sqrt(beta[k + 1])
        b_k = alpha[k]
        if max(abs(a_k - 1.0), abs(b_k)) < clamp_tol:
            break  # geometric decay: the rest of the tail is below clamp_tol
        a_rows[k] = a_k
        b_rows[k] = b_k
    return a_rows, b_rows


def reconstruct(sigma, setting, N, clamp_tol=CLAMP_TOL, check_admissible=True):
    """Window of Jacobi coefficients for n in [-N, N] from an admissible measure.

    Site map fixed by oracle calibration: the rho+ recurrence fills sites
    1..N, (a0, b0, a_{-1}) come from the rho- asymptotics, and the rho-
    recurrence fills sites -1..-N (couplings a_{-2}..a_{-N}).
    """
    if N < 1:
        raise ValueError("window half-width N must be at least 1")
    setting.validated(sigma)
    if check_admissible:
        report = admissible_discrete(sigma, setting)
        if not report.passed:
            raise AdmissibilityRequired(
                f"measure fails the boundary inequality (min {report.min_value:.3e} "
                f"at E = {report.argmin:.6g})"
            )
    K = 2 * N + 2
    plus = rho_plus_moments(sigma, setting, K)
    minus = rho_minus_moments(sigma, setting, K)
    alp, bep, nvp = moments_to_recurrence(plus, N + 1, allow_early_stop=True)
    alm, bem, nvm = moments_to_recurrence(minus, N + 1, allow_early_stop=True)

    a_plus, b_plus = _assemble_side(alp, bep, nvp, N, clamp_tol)
    a_minus_rows, b_minus_rows = _assemble_side(alm, bem, nvm, N, clamp_tol)

    n_sites = 2 * N + 1
    a = np.ones(n_sites)
    b = np.zeros(n_sites)
    zero = N  # array index of site 0
    b[zero] = minus.b0
    a[zero] = minus.a0
    a[zero - 1] = minus.a_minus1
    for k in range(1, N + 1):
        a[zero + k] = a_plus[k - 1]
        b[zero + k] = b_plus[k - 1]
    for k in range(0, N):
        b[zero - 1 - k] = b_minus_rows[k]
        if k <= N - 2:
            a[zero - 2 - k] = a_minus_rows[k]

    if np.min(a) < 1.0 - 1e-9:
        raise MomentMismatch(
            f"window postcondition a_n >= 1 - 1e-9 violated (min a = {np.min(a)})"
        )
    window = JacobiWindow(-N, N, tuple(a), tuple(b), setting.R)
    try:
        ratios = prop311_check(window, setting.r)
        if not ratios.passed:
            raise MomentMismatch(
                f"window postcondition: adjacent ratio left (r^2, 1/r^2) by "
                f"{-ratios.worst_margin:.3e}"
            )
    except FreeOperator:
        pass
    return window


# ---------------------------------------------------------------------------
# continued-fraction oracle


def _disk_root(z):
    """Root of lam^2 + z lam + 1 = 0 inside the unit disk (free m_plus)."""
    s = cmath.sqrt(z * z - 4.0)
    r1, r2 = (-z + s) / 2.0, (-z - s) / 2.0
    return 1.0 / r1 if abs(r1) >= abs(r2) else 1.0 / r2


def m_oracle(J, z, side, pad=ORACLE_PAD):
    """m functions of the padded window by bottom-up continued fractions.

    The window is extended by `pad` free sites and seeded with the exact
    free m value at the far end; convergence is geometric off the real axis.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z_arr.imag <= 0):
        raise ValueError("oracle needs Im z > 0")
    seed_u = np.array([_disk_root(zz) for zz in z_arr], dtype=complex)
    if side == "plus":
        top = J.n_max + pad
        sites = np.arange(1, top + 1)
        a_arr = np.array([J.a_at(n) for n in sites])
        b_arr = np.array([J.b_at(n) for n in sites])
        out = _kernels.cf_plus(a_arr, b_arr, z_arr, seed_u)
    elif side == "minus":
        low = J.n_min - pad
        sites = np.arange(low + 1, 1)
        a_arr = np.array([J.a_at(n) for n in sites])
        b_arr = np.array([J.b_at(n) for n in sites])
        out = _kernels.cf_minus(a_arr, b_arr, z_arr, -1.0 / seed_u)
    else:
        raise ValueError(f"unknown side {side!r}")
    return out[0] if np.isscalar(z) or np.asarray(z).ndim == 0 else out


# ---------------------------------------------------------------------------
# coefficient-ratio check


@dataclass(frozen=True)
class RatioReport:
    passed: bool
    worst_margin: float
    n_pairs: int
    ratios: tuple


def prop311_check(J, r, min_excess=1e-6):
    """Adjacent-site ratio bounds r^2 < (a_{n+1}^2 - 1)/(a_n^2 - 1) < 1/r^2.

    Only pairs with both excesses a^2 - 1 above min_excess participate: below
    that the excess is beyond the resolution of double-precision moment data.
    Raises FreeOperator when no site qualifies.
    """
    a = np.asarray(J.a)
    excess = a * a - 1.0
    idx = [i for i in range(len(a)) if excess[i] > min_excess]
    if not idx:
        raise FreeOperator("window is free to within min_excess; ratio check not applicable")
    lo, hi = r * r, 1.0 / (r * r)
    ratios = []
    worst = math.inf
    for i in range(len(a) - 1):
        if excess[i] > min_excess and excess[i + 1] > min_excess:
            rho = excess[i + 1] / excess[i]
            ratios.append((J.n_min + i, float(rho)))
            worst = min(worst, rho - lo, hi - rho)
    if not ratios:
        raise FreeOperator("no adjacent pair above min_excess")
    return RatioReport(
        passed=bool(worst > 0.0),
        worst_margin=float(worst),
        n_pairs=len(ratios),
        ratios=tuple(ratios),
    )
