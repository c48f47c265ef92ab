"""Finite positive measures: atoms plus Chebyshev-density pieces.

A measure is the basic datum of the whole library: representing measures of
the Herglotz functions live here, and so do the spectral measures produced
on the way to coefficient reconstruction.  Densities are stored as Chebyshev
coefficient lists on their interval, which keeps the data format language
neutral and makes polynomial integrands exactly integrable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .errors import (
    BadR,
    NegativeMomentAtZero,
    NegativeWeight,
    OnSupport,
    SupportViolation,
)

SUPPORT_MARGIN_REL = 1e-9  # strict-inside margin, scaled by R
QUAD_RTOL = 1e-12
QUAD_MAX_DEPTH = 40


@dataclass(frozen=True)
class Piece:
    """Density piece: nonnegative Chebyshev series on [a, b]."""

    a: float
    b: float
    cheb: tuple

    def density(self, t):
        x = (2.0 * np.asarray(t, dtype=float) - self.a - self.b) / (self.b - self.a)
        return _cheb.chebval(x, self.cheb)


@dataclass(frozen=True)
class Measure:
    atoms: tuple = ()
    pieces: tuple = ()

    @staticmethod
    def from_atoms(atoms):
        return Measure(atoms=tuple((float(t), float(w)) for t, w in atoms))

    @staticmethod
    def point(t, w=1.0):
        return Measure.from_atoms([(t, w)])

    @staticmethod
    def zero():
        return Measure()

    @staticmethod
    def with_pieces(atoms, pieces):
        return Measure(
            atoms=tuple((float(t), float(w)) for t, w in atoms),
            pieces=tuple(Piece(float(a), float(b), tuple(float(c) for c in cheb))
                         for a, b, cheb in pieces),
        )

    @property
    def is_zero(self):
        return not self.atoms and not self.pieces

    def atom_arrays(self):
        if not self.atoms:
            return np.empty(0), np.empty(0)
        arr = np.asarray(self.atoms, dtype=float)
        return arr[:, 0], arr[:, 1]


@dataclass(frozen=True)
class SupportInfo:
    min: float
    max: float
    distance_to_zero: float

    @property
    def empty(self):
        return self.min > self.max


EMPTY_SUPPORT = SupportInfo(math.inf, -math.inf, math.inf)


def support_bounds(mu):
    """Exact support extremes over atoms and piece endpoints."""
    lo, hi, dist = math.inf, -math.inf, math.inf
    ts, _ = mu.atom_arrays()
    for t in ts:
        lo, hi = min(lo, t), max(hi, t)
        dist = min(dist, abs(t))
    for p in mu.pieces:
        lo, hi = min(lo, p.a), max(hi, p.b)
        dist = min(dist, 0.0 if p.a <= 0.0 <= p.b else min(abs(p.a), abs(p.b)))
    if lo > hi:
        return EMPTY_SUPPORT
    return SupportInfo(lo, hi, dist)


def solve_r(R):
    """Solve r + 1/r = R with 0 < r <= 1, polished to 1e-14."""
    if R < 2.0:
        raise BadR(f"jacobi setting needs R >= 2, got {R}")
    r = (R - math.sqrt(R * R - 4.0)) / 2.0 if R > 2.0 else 1.0
    for _ in range(3):
        d = 1.0 - 1.0 / (r * r)
        if d == 0.0:
            break
        r -= (r + 1.0 / r - R) / d
    return min(r, 1.0)


def _check_interval_inside(lo, hi, intervals, offender):
    for a, b in intervals:
        if a < lo and hi < b:
            return
    raise SupportViolation(
        f"support element {offender} not strictly inside the allowed region", offender
    )


def validate(mu, setting, R):
    """Check support, weights and densities for the given setting; returns mu.

    setting is 'jacobi' (support strictly inside (-1/r,-r) u (r,1/r) where
    r + 1/r = R) or 'schrodinger' (support strictly inside (-R, R)).
    """
    if setting == "jacobi":
        r = solve_r(R)
        m = SUPPORT_MARGIN_REL * R
        allowed = ((-1.0 / r + m, -r - m), (r + m, 1.0 / r - m))
    elif setting == "schrodinger":
        if not R > 0.0:
            raise BadR(f"schrodinger setting needs R > 0, got {R}")
        m = SUPPORT_MARGIN_REL * R
        allowed = ((-R + m, R - m),)
    else:
        raise BadR(f"unknown setting {setting!r}")

    occupied = []
    ts, ws = mu.atom_arrays()
    for t, w in zip(ts, ws):
        if not w > 0.0:
            raise NegativeWeight(f"atom at t={t} has weight {w} <= 0")
        _check_interval_inside(t, t, allowed, t)
        occupied.append((t, t))
    for p in mu.pieces:
        if not p.b > p.a:
            raise SupportViolation(f"degenerate piece [{p.a}, {p.b}]", (p.a, p.b))
        if not p.cheb:
            raise NegativeWeight(f"piece [{p.a}, {p.b}] has no density coefficients")
        _check_interval_inside(p.a, p.b, allowed, (p.a, p.b))
        xs = np.cos(np.pi * np.arange(4 * len(p.cheb) + 33) / (4 * len(p.cheb) + 32))
        vals = _cheb.chebval(xs, p.cheb)
        if np.min(vals) < -1e-12 * max(1.0, np.max(np.abs(vals))):
            raise NegativeWeight(f"density negative on [{p.a}, {p.b}]")
        occupied.append((p.a, p.b))
    occupied.sort()
    for (a1, b1), (a2, b2) in zip(occupied, occupied[1:]):
        if a2 <= b1:
            raise SupportViolation(
                f"support elements overlap near t={a2}", (a2, b2)
            )
    return mu


@lru_cache(maxsize=None)
def _gl_nodes(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _gl_apply(f, a, b, n):
    x, w = _gl_nodes(n)
    h = 0.5 * (b - a)
    return h * np.sum(w * f(a + h * (x + 1.0)))


def adaptive_gauss_legendre(f, a, b, rtol=QUAD_RTOL, max_depth=QUAD_MAX_DEPTH):
    """Adaptive Gauss-Legendre for a vectorized (possibly complex) integrand."""
    scale = abs(_gl_apply(f, a, b, 15)) + 1e-300
    total = 0.0 + 0.0j
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        coarse = _gl_apply(f, lo, hi, 15)
        fine = _gl_apply(f, lo, hi, 30)
        err = abs(fine - coarse)
        if err <= rtol * max(abs(fine), scale) or depth >= max_depth:
            total += fine
            scale = max(scale, abs(total))
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    return total


def _piece_polynomial_integral(piece, n):
    """Exact integral of t^n * density(t) over the piece for n >= 0."""
    deg = n + max(len(piece.cheb) - 1, 0)
    nodes = deg // 2 + 2
    f = lambda t: t ** n * piece.density(t)
    return _gl_apply(f, piece.a, piece.b, nodes).real


def moment(mu, n):
    """Generalized moment: sum of w t^n plus density integrals.

    Negative n requires the support to stay away from zero.  The atom
    convention 0^0 = 1 makes moment(mu, 0) the total mass even for an atom
    pinned at the origin.
    """
    if n < 0 and not mu.is_zero and support_bounds(mu).distance_to_zero <= 0.0:
        raise NegativeMomentAtZero(f"moment {n} undefined: support touches t = 0")
    total = 0.0
    ts, ws = mu.atom_arrays()
    if len(ts):
        total += float(np.sum(ws * np.float_power(ts, n))) if n != 0 else float(np.sum(ws))
    for p in mu.pieces:
        if n >= 0:
            total += _piece_polynomial_integral(p, n)
        else:
            total += adaptive_gauss_legendre(
                lambda t: t ** float(n) * p.density(t), p.a, p.b
            ).real
    return total


def cauchy(mu, lam):
    """Cauchy transform: integral of d mu(t) / (t - lam), lam off the support."""
    lam = complex(lam)
    ts, ws = mu.atom_arrays()
    if len(ts) and np.any(ts == lam):
        raise OnSupport(f"Cauchy transform evaluated on an atom at {lam}")
    if lam.imag == 0.0:
        for p in mu.pieces:
            if p.a <= lam.real <= p.b:
                raise OnSupport(f"Cauchy transform evaluated inside a piece at {lam}")
    total = 0.0 + 0.0j
    if len(ts):
        total += np.sum(ws / (ts - lam))
    for p in mu.pieces:
        total += adaptive_gauss_legendre(lambda t: p.density(t) / (t - lam), p.a, p.b)
    return complex(total)
