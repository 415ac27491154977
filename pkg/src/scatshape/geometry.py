"""Star-shaped perturbed-disk domains and the symmetric-difference error metric.

A domain is parametrized by its boundary radius

    r(theta) = R * (1 + delta * h(theta)),      h(theta) = sum_l c_l e^{i l theta},

with real-valued profile h (so c_{-l} = conj(c_l)) and c_0 = 0; the zeroth
coefficient is normalized into R.  The Fourier convention is

    c_l = (1 / 2 pi) * int_0^{2 pi} h(theta) e^{-i l theta} d theta.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GeometryError",
    "StarDomain",
    "BoundaryCurve",
    "make_flower",
    "area",
    "relative_error",
]

#: theta grid size used for positivity validation and the error metric
VALIDATION_GRID = 4096
ERROR_GRID = 1 << 14


class GeometryError(ValueError):
    """Invalid star-domain geometry (non-positive boundary radius)."""


def _symmetrize(coeffs: dict) -> dict:
    """Return a full +-l coefficient map with conjugate symmetry enforced."""
    out = {}
    for l, c in coeffs.items():
        l = int(l)
        if l == 0:
            raise GeometryError("coefficient for l = 0 is not allowed "
                                "(normalized into the base radius)")
        out[l] = complex(c)
    for l in list(out):
        if -l in out:
            avg = 0.5 * (out[l] + np.conj(out[-l]))
            out[l], out[-l] = avg, np.conj(avg)
        else:
            out[-l] = np.conj(out[l])
    return out


@dataclass(frozen=True)
class StarDomain:
    """Perturbed disk r(theta) = R (1 + delta h(theta)).

    Attributes
    ----------
    base_radius : float
        Disk radius R > 0.
    perturbation_amplitude : float
        Amplitude delta >= 0 multiplying the unit-scale profile h.
    perturbation_coeffs : dict[int, complex]
        Fourier coefficients c_l of h for 0 < |l| <= N_h (both signs stored,
        conjugate-symmetric by construction).
    perturbation_exponent : float or None
        Optional analysis metadata alpha in (0, 1) linking delta = eps^alpha.
        Never used at runtime.
    """

    base_radius: float
    perturbation_amplitude: float = 0.0
    perturbation_coeffs: dict = field(default_factory=dict)
    perturbation_exponent: float | None = None

    def __post_init__(self):
        if self.base_radius <= 0:
            raise GeometryError("base radius must be positive")
        if self.perturbation_amplitude < 0:
            raise GeometryError("perturbation amplitude must be nonnegative")
        object.__setattr__(self, "perturbation_coeffs",
                           _symmetrize(self.perturbation_coeffs))
        theta = np.linspace(0.0, 2 * np.pi, VALIDATION_GRID, endpoint=False)
        if np.any(self.radius(theta) <= 0.0):
            raise GeometryError("boundary radius r(theta) must stay positive")

    def coefficient(self, l: int) -> complex:
        """F[h](l); zero outside the stored support (and for l = 0)."""
        return self.perturbation_coeffs.get(int(l), 0.0 + 0.0j)

    def profile(self, theta):
        """h(theta) evaluated from the Fourier coefficients (real output)."""
        theta = np.asarray(theta, dtype=float)
        s = np.zeros_like(theta, dtype=complex)
        for l, c in self.perturbation_coeffs.items():
            s += c * np.exp(1j * l * theta)
        return s.real

    def radius(self, theta):
        """Boundary radius r(theta) = R (1 + delta h(theta))."""
        return self.base_radius * (1.0 + self.perturbation_amplitude * self.profile(theta))

    @property
    def mode_band(self) -> int:
        """Largest |l| carrying a nonzero coefficient."""
        support = [abs(l) for l, c in self.perturbation_coeffs.items() if c != 0]
        return max(support) if support else 0


@dataclass(frozen=True)
class BoundaryCurve:
    """Sampled boundary (theta, r) on a uniform grid over (0, 2 pi]."""

    theta: np.ndarray
    r: np.ndarray

    @classmethod
    def from_domain(cls, domain: StarDomain, n_samples: int = 720) -> "BoundaryCurve":
        theta = 2 * np.pi * np.arange(1, n_samples + 1) / n_samples
        return cls(theta=theta, r=domain.radius(theta))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta", "r"])
            for t, r in zip(self.theta, self.r):
                writer.writerow([f"{t:.16e}", f"{r:.16e}"])

    @classmethod
    def from_csv(cls, path) -> "BoundaryCurve":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(theta=data[:, 0], r=data[:, 1])


def make_flower(R: float, delta: float, n: int,
                second_harmonic: float | None = None) -> StarDomain:
    """Flower domain r = R (1 + delta cos(n theta) [+ second_harmonic cos(2 n theta)]).

    ``second_harmonic`` is the absolute amplitude of the cos(2n theta) term in
    r/R, so the profile coefficient at +-2n is second_harmonic / (2 delta).
    """
    if n < 1:
        raise ValueError("harmonic index n must be >= 1")
    coeffs = {n: 0.5 + 0.0j}
    if second_harmonic is not None:
        if delta == 0:
            raise ValueError("second harmonic requires a nonzero delta")
        coeffs[2 * n] = complex(second_harmonic / (2.0 * delta))
    return StarDomain(base_radius=R, perturbation_amplitude=delta,
                      perturbation_coeffs=coeffs)


def area(domain: StarDomain) -> float:
    """Enclosed area, in closed form from the Fourier coefficients.

    (1/2) int r(theta)^2 dtheta = pi R^2 (1 + 2 delta^2 sum_{l>0} |c_l|^2).
    """
    ssq = sum(abs(c) ** 2 for l, c in domain.perturbation_coeffs.items() if l > 0)
    d = domain.perturbation_amplitude
    return float(np.pi * domain.base_radius ** 2 * (1.0 + 2.0 * d * d * ssq))


def relative_error(exact: StarDomain, approx: StarDomain) -> float:
    """Area of the symmetric difference, relative to the exact area.

    Both domains are star-shaped about the origin, so the symmetric
    difference area is (1/2) int |r_exact^2 - r_approx^2| dtheta, evaluated
    on a dense uniform grid.
    """
    theta = np.linspace(0.0, 2 * np.pi, ERROR_GRID, endpoint=False)
    re2 = exact.radius(theta) ** 2
    ra2 = approx.radius(theta) ** 2
    sym = 0.5 * np.mean(np.abs(re2 - ra2)) * 2 * np.pi
    return float(sym / area(exact))
