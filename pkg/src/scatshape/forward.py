"""Born-linearized forward model.

Scattering coefficients W_nm of a penetrable inclusion with small contrast
eps are computed from the Born integral

    W_nm = eps k^2 int_D J_n(k r) J_m(k r) e^{i (n - m) theta} dx,

and the far-field pattern is synthesized from them via

    A(theta_d, theta_x) = sum_{n,m} i^{m-n} e^{-i m theta_d} e^{i n theta_x} W_nm.

For a perturbed disk the pattern linearizes to a scalar disk kernel plus a
perturbation pairing:

    A ~ pi R^2 eps k^2 P_R + 2 pi R^2 eps delta k^2 <F[h], S_R>,

with P_R(theta, theta~, k) = J_0(u) + J_2(u) = 2 J_1(u)/u  (u = 2 k R sin((theta~-theta)/2))
and  S_R(theta, theta~, k)_l = e^{i l (theta + theta~)/2} J_l(2 k R sin((theta-theta~)/2)).
The inner product is conjugate-linear in the second slot:
<a, b> = sum_l a_l conj(b_l).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import jv

from .geometry import StarDomain
from .special import ConvergenceError, lommel_integral

__all__ = [
    "ScatteringMatrix",
    "FarFieldKernel",
    "sc_born_quadrature",
    "sc_born_matrix",
    "sc_ball_closed_form",
    "sc_perturbation_first_order",
    "far_field_from_sc",
    "far_field_grid",
    "farfield_kernel",
    "far_field_linearized",
]

#: base quadrature resolution (radial Gauss-Legendre nodes, angular trapezoid nodes)
QUAD_NR = 64
QUAD_NTHETA = 1024
#: relative disagreement between refinement levels that flags non-convergence
QUAD_REFINE_RTOL = 1e-6


@dataclass(frozen=True)
class ScatteringMatrix:
    """Truncated matrix of scattering coefficients W_nm for |n|, |m| <= band."""

    band: int
    contrast: float
    wavenumber: float
    entries: np.ndarray  # complex, shape (2*band+1, 2*band+1)

    def __post_init__(self):
        expected = 2 * self.band + 1
        if self.entries.shape != (expected, expected):
            raise ValueError("entries shape inconsistent with band")

    def entry(self, n: int, m: int) -> complex:
        return complex(self.entries[n + self.band, m + self.band])

    def orders(self) -> np.ndarray:
        return np.arange(-self.band, self.band + 1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "m", "re", "im"])
            for n in self.orders():
                for m in self.orders():
                    w = self.entry(n, m)
                    writer.writerow([n, m, f"{w.real:.16e}", f"{w.imag:.16e}"])

    @classmethod
    def from_csv(cls, path, contrast: float, wavenumber: float) -> "ScatteringMatrix":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        ns = [int(r[0]) for r in rows]
        band = max(abs(n) for n in ns)
        entries = np.zeros((2 * band + 1, 2 * band + 1), dtype=complex)
        for n, m, re, im in rows:
            entries[int(n) + band, int(m) + band] = float(re) + 1j * float(im)
        return cls(band=band, contrast=contrast, wavenumber=wavenumber, entries=entries)


def _born_entries(domain: StarDomain, eps: float, k: float, band: int,
                  n_r: int, n_theta: int) -> np.ndarray:
    """All W_nm for |n|,|m| <= band by tensor-product quadrature.

    Per theta ray the radial integral over [0, r(theta)] uses rescaled
    Gauss-Legendre nodes; the periodic theta integral uses the trapezoid
    rule.  The (n, m) contraction is organized as a single matrix product.
    """
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    rb = domain.radius(theta)
    x, w = leggauss(n_r)
    rr = 0.5 * (x[None, :] + 1.0) * rb[:, None]          # (n_theta, n_r)
    ww = 0.5 * w[None, :] * rb[:, None] * rr             # weight * jacobian r
    ns = np.arange(-band, band + 1)
    J = jv(ns[:, None, None], k * rr[None, :, :])        # (orders, n_theta, n_r)
    G = J * np.sqrt(ww)[None, :, :]
    phase = np.exp(1j * ns[:, None] * theta[None, :])
    H1 = (G * phase[:, :, None]).reshape(len(ns), -1)
    H2 = (G * np.conj(phase)[:, :, None]).reshape(len(ns), -1)
    return eps * k * k * (2 * np.pi / n_theta) * (H1 @ H2.T)


def sc_born_matrix(domain: StarDomain, eps: float, k: float, band: int,
                   n_r: int = QUAD_NR, n_theta: int = QUAD_NTHETA) -> ScatteringMatrix:
    """Full Born scattering matrix at the reference quadrature refinement."""
    entries = _born_entries(domain, eps, k, band, n_r, n_theta)
    return ScatteringMatrix(band=band, contrast=eps, wavenumber=k, entries=entries)


def sc_born_quadrature(domain: StarDomain, eps: float, k: float,
                       n: int, m: int) -> complex:
    """Single Born coefficient W_nm with a refinement convergence check.

    Evaluates the quadrature at the base refinement and at doubled
    resolution; raises :class:`ConvergenceError` if the two disagree by more
    than 1e-6 relative.  Returns the refined value.
    """
    if abs(n) > 60 or abs(m) > 60:
        raise ValueError("orders |n|, |m| <= 60 supported")

    def one(n_r, n_theta):
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        rb = domain.radius(theta)
        x, w = leggauss(n_r)
        rr = 0.5 * (x[None, :] + 1.0) * rb[:, None]
        ww = 0.5 * w[None, :] * rb[:, None] * rr
        rad = np.sum(jv(n, k * rr) * jv(m, k * rr) * ww, axis=1)
        ang = np.exp(1j * (n - m) * theta)
        return eps * k * k * (2 * np.pi / n_theta) * complex(np.sum(rad * ang))

    coarse = one(QUAD_NR, QUAD_NTHETA)
    fine = one(2 * QUAD_NR, 2 * QUAD_NTHETA)
    scale = max(abs(fine), abs(coarse), 1e-300)
    if abs(fine - coarse) / scale > QUAD_REFINE_RTOL and abs(fine) > 1e-14:
        raise ConvergenceError(
            f"Born quadrature for W[{n},{m}] did not converge "
            f"(levels differ by {abs(fine - coarse) / scale:.2e} relative)")
    return fine


def sc_ball_closed_form(R: float, eps: float, k: float, n: int) -> float:
    """Diagonal coefficient of the disk B_R: 2 pi eps k^2 int_0^R J_n(kr)^2 r dr."""
    return 2 * np.pi * eps * k * k * lommel_integral(n, k, R)


def sc_perturbation_first_order(domain: StarDomain, eps: float, k: float,
                                n: int, m: int) -> complex:
    """First-order W_nm of a perturbed disk.

    W_nm(B^delta) ~ delta_{nm} W_nn(B) + 2 pi R^2 eps delta k^2
                    J_n(kR) J_m(kR) F[h](m - n).

    The off-diagonal term is the shape derivative of the Born integral for
    r(theta) = R (1 + delta h(theta)); the boundary integral picks out the
    (m - n)-th Fourier coefficient of h under the analysis convention
    c_l = (1/2 pi) int h e^{-i l theta}.
    """
    R = domain.base_radius
    d = domain.perturbation_amplitude
    first = (2 * np.pi * R * R * eps * d * k * k
             * jv(n, k * R) * jv(m, k * R) * domain.coefficient(m - n))
    if n == m:
        first += sc_ball_closed_form(R, eps, k, n)
    return complex(first)


def far_field_from_sc(sc: ScatteringMatrix, theta_d: float, theta_x: float) -> complex:
    """Far-field pattern A(theta_d, theta_x) from a truncated matrix."""
    ns = sc.orders()
    phx = np.exp(1j * ns * theta_x) * (1j) ** (-ns)
    phd = np.exp(-1j * ns * theta_d) * (1j) ** (ns)
    return complex(phx @ sc.entries @ phd)


def far_field_grid(sc: ScatteringMatrix, theta_d, theta_x) -> np.ndarray:
    """Vectorized synthesis; returns A with shape (len(theta_d), len(theta_x))."""
    ns = sc.orders()
    Ex = np.exp(1j * np.outer(np.asarray(theta_x), ns)) * (1j) ** (-ns)[None, :]
    Ed = np.exp(-1j * np.outer(np.asarray(theta_d), ns)) * (1j) ** (ns)[None, :]
    return (Ex @ sc.entries @ Ed.T).T


@dataclass(frozen=True)
class FarFieldKernel:
    """Linearized far-field kernels at one measurement geometry.

    ``p_scalar`` is the disk (Airy) kernel P_R; ``s_vector`` holds S_R_l for
    |l| <= band in order l = -band..band.
    """

    band: int
    p_scalar: float
    s_vector: np.ndarray

    def s(self, l: int) -> complex:
        return complex(self.s_vector[l + self.band])


def kernel_p(R: float, theta, theta_t, k) -> float | np.ndarray:
    """Disk kernel P_R = J_0(u) + J_2(u) = 2 J_1(u)/u, u = 2kR sin((theta~-theta)/2).

    Even in u, equal to 1 at u = 0.  The J_0 + J_2 form avoids the removable
    singularity of 2 J_1(u)/u.
    """
    u = 2.0 * np.asarray(k) * R * np.sin((np.asarray(theta_t) - np.asarray(theta)) / 2.0)
    out = jv(0, u) + jv(2, u)
    return float(out) if out.ndim == 0 else out


def kernel_s_matrix(R: float, theta, theta_t, k, band: int) -> np.ndarray:
    """S_R rows for many measurements; shape (M, 2*band+1), columns l = -band..band."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    theta_t = np.atleast_1d(np.asarray(theta_t, dtype=float))
    k = np.broadcast_to(np.asarray(k, dtype=float), theta.shape)
    ls = np.arange(-band, band + 1)
    u = 2.0 * k * R * np.sin((theta - theta_t) / 2.0)
    return np.exp(1j * np.outer((theta + theta_t) / 2.0, ls)) * jv(ls[None, :], u[:, None])


def farfield_kernel(R: float, theta: float, theta_t: float, k: float,
                    band: int) -> FarFieldKernel:
    """P_R and the S_R vector at a single (theta, theta~, k)."""
    if band > 200:
        raise ValueError("band <= 200 supported")
    s = kernel_s_matrix(R, [theta], [theta_t], [k], band)[0]
    return FarFieldKernel(band=band, p_scalar=kernel_p(R, theta, theta_t, k), s_vector=s)


def far_field_linearized(domain: StarDomain, eps: float, theta: float,
                         theta_t: float, k: float) -> complex:
    """Linearized far-field of a perturbed disk.

    pi R^2 eps k^2 P_R + 2 pi R^2 eps delta k^2 sum_l F[h](l) conj(S_R_l).
    """
    R = domain.base_radius
    d = domain.perturbation_amplitude
    band = max(domain.mode_band, 1)
    ker = farfield_kernel(R, theta, theta_t, k, band)
    pairing = sum(domain.coefficient(l) * np.conj(ker.s(l))
                  for l in range(-band, band + 1) if l != 0)
    return complex(np.pi * R * R * eps * k * k * ker.p_scalar
                   + 2 * np.pi * R * R * eps * d * k * k * pairing)
