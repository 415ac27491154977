"""Integer-order Bessel machinery: values, derivatives, extrema, Lommel and Graf identities.

Everything here is real/complex scalar math on top of ``scipy.special.jv``;
the functions accept numpy arrays wherever that is natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import jv

__all__ = [
    "BesselEval",
    "ExtremumLocation",
    "ConvergenceError",
    "bessel_j",
    "bessel_j_prime",
    "bessel_extremum",
    "lommel_integral",
    "graf_partial_sum",
    "graf_closed_form",
]

#: supported order band for bessel_j
MAX_ORDER = 200
#: |J_l'(b)| tolerance for extremum refinement
EXTREMUM_TOL = 1e-11


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to converge."""


def bessel_j(n: int, x):
    """Bessel function of the first kind J_n(x) for integer order n.

    Parameters
    ----------
    n : int
        Order, |n| <= 200.
    x : float or ndarray
        Argument(s); must be finite.

    Returns
    -------
    float or ndarray
        J_n(x), absolute accuracy ~1e-12 or better on the supported band.
    """
    if abs(int(n)) > MAX_ORDER:
        raise ValueError(f"order {n} outside supported band |n| <= {MAX_ORDER}")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("bessel_j requires finite arguments")
    out = jv(int(n), xa)
    return float(out) if np.isscalar(x) or xa.ndim == 0 else out


def bessel_j_prime(n: int, x):
    """Derivative J_n'(x) via the recurrence (J_{n-1} - J_{n+1})/2."""
    return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x))


@dataclass(frozen=True)
class BesselEval:
    """A single Bessel evaluation bundling value and derivative."""

    order: int
    argument: float
    value: float
    derivative: float

    @classmethod
    def evaluate(cls, n: int, x: float) -> "BesselEval":
        return cls(order=n, argument=float(x),
                   value=bessel_j(n, x), derivative=bessel_j_prime(n, x))


@dataclass(frozen=True)
class ExtremumLocation:
    """Location b_{l,m0} of a stationary point of J_l.

    Indexed so that b_{l,m0} ~ (4*m0 + 2*l + 1)*pi/4 for large m0; the
    location is the stationary point of J_l nearest that asymptote.
    """

    order: int
    extremum_index: int
    location: float


def bessel_extremum(l: int, m0: int) -> ExtremumLocation:
    """Find the stationary point of J_l near the asymptote (4*m0+2*l+1)*pi/4.

    The bracket starts at [asymptote - pi/2, asymptote + pi/2] and widens in
    pi/2 steps if J_l' does not change sign there.  Bisection to 1e-6 is
    followed by Newton iterations on J_l' until |J_l'(b)| <= 1e-11.

    Raises
    ------
    ConvergenceError
        If no sign change of J_l' is found after widening the bracket.
    """
    if l < 0 or l > 100:
        raise ValueError("order l must be in [0, 100]")
    if m0 < 1 or m0 > 500:
        raise ValueError("extremum index m0 must be in [1, 500]")

    asym = (4 * m0 + 2 * l + 1) * math.pi / 4.0
    lo, hi = asym - math.pi / 2, asym + math.pi / 2

    def fprime(x):
        return bessel_j_prime(l, x)

    widenings = 0
    while fprime(lo) * fprime(hi) > 0.0:
        lo = max(lo - math.pi / 2, 1e-8)
        hi += math.pi / 2
        widenings += 1
        if widenings > 8:
            raise ConvergenceError(
                f"no bracket for extremum of J_{l} near {asym:.3f} (m0={m0})")

    # bisection down to 1e-6
    flo = fprime(lo)
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        fm = fprime(mid)
        if flo * fm <= 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    b = 0.5 * (lo + hi)

    # Newton on J_l'; J_l'' from the recurrence
    for _ in range(60):
        fp = fprime(b)
        if abs(fp) <= EXTREMUM_TOL:
            break
        fpp = 0.25 * (bessel_j(l - 2, b) - 2.0 * bessel_j(l, b) + bessel_j(l + 2, b))
        if fpp == 0.0:
            raise ConvergenceError(f"vanishing curvature refining extremum of J_{l}")
        b -= fp / fpp
    else:
        raise ConvergenceError(f"Newton refinement stalled for J_{l}, m0={m0}")
    return ExtremumLocation(order=l, extremum_index=m0, location=float(b))


def lommel_integral(l: int, k: float, R: float) -> float:
    """Closed form of the second Lommel integral int_0^R J_l(k r)^2 r dr.

    Equals (R^2/2) * [J_l(kR)^2 - J_{l-1}(kR) * J_{l+1}(kR)].
    """
    if k <= 0 or R <= 0:
        raise ValueError("k and R must be positive")
    if k * R > 1e4:
        raise ValueError("kR above supported range 1e4")
    z = k * R
    return 0.5 * R * R * (bessel_j(l, z) ** 2 - bessel_j(l - 1, z) * bessel_j(l + 1, z))


def graf_partial_sum(x: float, y: float, theta: float, l: int, band: int) -> complex:
    """Partial sum sum_{|n| <= band} J_n(x) J_{n-l}(y) e^{i n theta}.

    Verification helper for the addition-theorem closed form
    (:func:`graf_closed_form`).
    """
    n = np.arange(-band, band + 1)
    return complex(np.sum(jv(n, x) * jv(n - l, y) * np.exp(1j * n * theta)))


def graf_closed_form(x: float, y: float, theta: float, l: int) -> complex:
    """Closed form of sum_n J_n(x) J_{n-l}(y) e^{i n theta} for x != y.

    With w = sqrt(x^2 + y^2 - 2 x y cos(theta)) the sum equals
    J_l(w) * e^{i l theta} * ((x - y e^{-i theta}) / w)^l.  The factor
    (x - y e^{-i theta})/w is unimodular, and the power is an integer,
    so the expression is single-valued.
    """
    if x <= 0 or y <= 0:
        raise ValueError("x and y must be positive")
    w = math.sqrt(x * x + y * y - 2 * x * y * math.cos(theta))
    if w == 0.0:
        raise ValueError("degenerate configuration x = y, theta = 0")
    phase = (x - y * np.exp(-1j * theta)) / w
    return complex(jv(l, w) * np.exp(1j * l * theta) * phase ** l)
