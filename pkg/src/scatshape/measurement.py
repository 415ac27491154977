"""Measurement plans, noise models, and the SNR resolution budget.

A plan is a list of triples (theta_inc, theta_obs, k).  The optimal
transmission plan places the S_R Bessel argument 2 k R at the asymptotic
location (4 m0 + 2 J + 1) pi / 4 of the m0-th extremum of J_J, which is what
drives the condition number of the inversion toward 1 as m0 grows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "MeasurementPlan",
    "FarFieldData",
    "NoiseSpec",
    "ResolutionBudget",
    "optimal_plan",
    "set1_plan",
    "set2_plan",
    "set3_plan",
    "apply_noise",
    "resolution_limit",
]

TWO_PI = 2.0 * math.pi
#: width parameter of the transmission offset interval U = (-pi/5, pi/5)
U_HALF_WIDTH = math.pi / 5


@dataclass(frozen=True)
class MeasurementPlan:
    """Measurement triples plus the indices that generated them.

    ``kind`` is one of "optimal", "set1", "set2", "set3", "custom";
    ``params`` records the generating parameters (m0, N, N0, k list, ...).
    """

    theta_inc: np.ndarray
    theta_obs: np.ndarray
    k: np.ndarray
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    index_i: np.ndarray | None = None
    index_j: np.ndarray | None = None

    def __post_init__(self):
        m = len(self.theta_inc)
        if len(self.theta_obs) != m or len(self.k) != m:
            raise ValueError("triple arrays must share one length")
        object.__setattr__(self, "theta_inc", np.mod(np.asarray(self.theta_inc, float), TWO_PI))
        object.__setattr__(self, "theta_obs", np.mod(np.asarray(self.theta_obs, float), TWO_PI))
        object.__setattr__(self, "k", np.asarray(self.k, float))

    def __len__(self) -> int:
        return len(self.k)

    def triples(self):
        return zip(self.theta_inc, self.theta_obs, self.k)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["theta_inc", "theta_obs", "k"])
            for ti, to, kk in self.triples():
                writer.writerow([f"{ti:.16e}", f"{to:.16e}", f"{kk:.16e}"])

    @classmethod
    def from_csv(cls, path, kind: str = "custom", params: dict | None = None):
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        arr = np.array([[float(a) for a in row] for row in rows])
        return cls(theta_inc=arr[:, 0], theta_obs=arr[:, 1], k=arr[:, 2],
                   kind=kind, params=params or {})


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model: "uniform" (multiplicative on magnitudes) or "gaussian"
    (complex circular on far-field values, variance sigma^2 k^4 per sample)."""

    model: str
    sigma: float
    seed: int

    def __post_init__(self):
        if self.model not in ("uniform", "gaussian"):
            raise ValueError(f"unknown noise model {self.model!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")


@dataclass(frozen=True)
class FarFieldData:
    """Far-field samples over a plan: complex values or magnitudes.

    ``sigma``/``seed`` record the noise realization applied (None if clean).
    """

    plan: MeasurementPlan
    values: np.ndarray
    kind: str  # "complex" | "magnitude"
    sigma: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("complex", "magnitude"):
            raise ValueError(f"unknown data kind {self.kind!r}")
        if len(self.values) != len(self.plan):
            raise ValueError("values must align with the plan")

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values) if self.kind == "complex" else np.asarray(self.values)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if self.kind == "complex":
                writer.writerow(["theta_inc", "theta_obs", "k", "re", "im"])
                for (ti, to, kk), v in zip(self.plan.triples(), self.values):
                    writer.writerow([f"{ti:.16e}", f"{to:.16e}", f"{kk:.16e}",
                                     f"{v.real:.16e}", f"{v.imag:.16e}"])
            else:
                writer.writerow(["theta_inc", "theta_obs", "k", "magnitude"])
                for (ti, to, kk), v in zip(self.plan.triples(), self.values):
                    writer.writerow([f"{ti:.16e}", f"{to:.16e}", f"{kk:.16e}", f"{v:.16e}"])

    @classmethod
    def from_csv(cls, path, kind: str, plan_kind: str = "custom",
                 params: dict | None = None) -> "FarFieldData":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        arr = np.array([[float(a) for a in row] for row in rows])
        plan = MeasurementPlan(theta_inc=arr[:, 0], theta_obs=arr[:, 1], k=arr[:, 2],
                               kind=plan_kind, params=params or {})
        if kind == "complex":
            values = arr[:, 3] + 1j * arr[:, 4]
        else:
            values = arr[:, 3]
        return cls(plan=plan, values=values, kind=kind)


def optimal_plan(N: int, m0: int, R: float) -> MeasurementPlan:
    """Transmission plan with wavenumbers at Bessel-extremum asymptotes.

    Enumerates (I, J) over {1..N}^2 with

        theta = 2 pi I / N,   theta~ = theta + pi,
        k_J   = (4 m0 + 2 J + 1) pi / (8 R),

    so 2 k_J R sits at the asymptotic m0-th extremum of J_J.  N^2 triples.
    """
    if N < 1 or m0 < 1:
        raise ValueError("N and m0 must be >= 1")
    I, J = np.meshgrid(np.arange(1, N + 1), np.arange(1, N + 1), indexing="ij")
    I, J = I.ravel(), J.ravel()
    theta = TWO_PI * I / N
    k = (4 * m0 + 2 * J + 1) * math.pi / (8.0 * R)
    return MeasurementPlan(theta_inc=theta, theta_obs=theta + math.pi, k=k,
                           kind="optimal", params={"N": N, "m0": m0, "R": R},
                           index_i=I, index_j=J)


def set1_plan(N0: int, k_list) -> MeasurementPlan:
    """Full angle grid: all (2 pi I/N0, 2 pi K/N0) pairs for every wavenumber."""
    if N0 < 1:
        raise ValueError("N0 must be >= 1")
    k_list = np.atleast_1d(np.asarray(k_list, float))
    grid = TWO_PI * np.arange(1, N0 + 1) / N0
    tis, tos, ks = [], [], []
    for kk in k_list:
        TI, TO = np.meshgrid(grid, grid, indexing="ij")
        tis.append(TI.ravel())
        tos.append(TO.ravel())
        ks.append(np.full(N0 * N0, kk))
    return MeasurementPlan(theta_inc=np.concatenate(tis), theta_obs=np.concatenate(tos),
                           k=np.concatenate(ks), kind="set1",
                           params={"N0": N0, "k_list": list(map(float, k_list))})


def _offsets(u_count: int) -> np.ndarray:
    """Uniform midpoint grid of u_count offsets inside (-pi/5, pi/5)."""
    if u_count < 1:
        raise ValueError("u_count must be >= 1")
    edges = np.linspace(-U_HALF_WIDTH, U_HALF_WIDTH, u_count + 1)
    return 0.5 * (edges[:-1] + edges[1:])


def set2_plan(N: int, u_count: int, k_list) -> MeasurementPlan:
    """Transmission angles with offsets: theta~ = theta + pi + u, u in (-pi/5, pi/5)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    k_list = np.atleast_1d(np.asarray(k_list, float))
    us = _offsets(u_count)
    angles = TWO_PI * np.arange(1, N + 1) / N
    tis, tos, ks = [], [], []
    for kk in k_list:
        for t in angles:
            for u in us:
                tis.append(t)
                tos.append(t + math.pi + u)
                ks.append(kk)
    return MeasurementPlan(theta_inc=np.array(tis), theta_obs=np.array(tos),
                           k=np.array(ks), kind="set2",
                           params={"N": N, "u_count": u_count,
                                   "k_list": list(map(float, k_list))})


def set3_plan(N: int, u_count: int, k_list) -> MeasurementPlan:
    """Half of the transmission angles: ceil(N/2) incident directions."""
    n_half = (N + 1) // 2
    plan = set2_plan(n_half, u_count, k_list)
    return replace(plan, kind="set3",
                   params={"N": N, "n_angles": n_half, "u_count": u_count,
                           "k_list": plan.params["k_list"]})


def _substream_draws(seed: int, n_indices: int, draws_per_index: int,
                     normal: bool) -> np.ndarray:
    """Counter-indexed Philox draws: index i owns positions [i*d, (i+1)*d).

    The draw for a given measurement index is independent of the total
    number of indices and of any parallel mapping order.
    """
    bitgen = np.random.Philox(key=int(seed) & ((1 << 64) - 1))
    gen = np.random.Generator(bitgen)
    if normal:
        return gen.standard_normal(n_indices * draws_per_index).reshape(n_indices, draws_per_index)
    return gen.random(n_indices * draws_per_index).reshape(n_indices, draws_per_index)


def apply_noise(data: FarFieldData, spec: NoiseSpec) -> FarFieldData:
    """Seeded, reproducible noisy copy of a far-field dataset.

    uniform:  |A| -> |A| (1 + sigma xi), xi ~ U[-1, 1], magnitude data only.
    gaussian: A -> A + eta, eta complex circular Gaussian with
              E|eta|^2 = sigma^2 k^4 per sample, complex data only.
    """
    m = len(data.plan)
    if spec.model == "uniform":
        if data.kind != "magnitude":
            raise ValueError("the multiplicative model applies to magnitude data")
        xi = 2.0 * _substream_draws(spec.seed, m, 1, normal=False)[:, 0] - 1.0
        values = np.asarray(data.values) * (1.0 + spec.sigma * xi)
    else:
        if data.kind != "complex":
            raise ValueError("the gaussian far-field model applies to complex data")
        g = _substream_draws(spec.seed, m, 2, normal=True)
        scale = spec.sigma * data.plan.k ** 2 / math.sqrt(2.0)
        values = np.asarray(data.values) + scale * (g[:, 0] + 1j * g[:, 1])
    return FarFieldData(plan=data.plan, values=values, kind=data.kind,
                        sigma=spec.sigma, seed=spec.seed)


@dataclass(frozen=True)
class ResolutionBudget:
    """Largest resolvable Fourier band for a given SNR.

    n_max is the largest N with constant_c * N^{4N} / R^{2+4N} < snr^{1+alpha/2}.
    """

    snr: float
    R: float
    alpha: float
    constant_c: float
    n_max: int


#: cap for the resolution-budget scan; the left side grows like N^{4N}
RESOLUTION_SCAN_CAP = 1000


def resolution_limit(snr: float, R: float, alpha: float,
                     constant_c: float = 1.0) -> ResolutionBudget:
    """Scan N = 1, 2, ... for the resolution budget (log-domain comparison)."""
    if snr <= 0 or R <= 0 or constant_c <= 0:
        raise ValueError("snr, R, constant_c must be positive")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    rhs = (1.0 + alpha / 2.0) * math.log(snr)
    n_max = 0
    for N in range(1, RESOLUTION_SCAN_CAP + 1):
        lhs = math.log(constant_c) + 4 * N * math.log(N) - (2 + 4 * N) * math.log(R)
        if lhs < rhs:
            n_max = N
    return ResolutionBudget(snr=snr, R=R, alpha=alpha, constant_c=constant_c, n_max=n_max)
