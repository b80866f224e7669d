"""Finite-volume spectral statistics: eigensolves, integrated density of
states, spectrum-coverage checks, Thouless residuals, eigenfunction decay,
the Wegner probability probe and the transport second-moment probe.

Dirichlet boundary conditions throughout for the self-adjoint builders;
unitary families use exactly-unitary closures, and their spectral points are
eigen-angles on the branch (-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import lyapunov, models
from .errors import (
    BoundaryContamination,
    NoInteriorModes,
    NotSymmetric,
    UnsupportedModel,
    ValidationError,
)
from .models import (
    DiscreteQuasi1D,
    Energy,
    ExtendedCMV,
    SeedSpec,
    UnitaryAnderson,
)

__all__ = [
    "IdsCurve", "WegnerTable", "WegnerRow", "SpectrumCoverage",
    "ThoulessFit", "EigenmodeDecay", "TransportResult",
    "eigensolve_sym", "ids_estimate", "spectrum_coverage",
    "thouless_residual", "eigenmode_decay", "wegner_probe",
    "transport_probe",
]


# --- eigensolvers -----------------------------------------------------------

def eigensolve_sym(m: np.ndarray, vectors: bool = False):
    """Full ascending spectrum of a symmetric/Hermitian matrix.

    Backward-stable LAPACK solve; the symmetry residual is checked against
    1e-10 relative to the matrix norm.
    """
    m = np.asarray(m)
    scale = max(1.0, float(np.linalg.norm(m, "fro")))
    if np.linalg.norm(m - m.conj().T, "fro") > 1e-10 * scale:
        raise NotSymmetric("symmetry residual above 1e-10")
    if vectors:
        return np.linalg.eigh(m)
    return np.linalg.eigvalsh(m)


def _banded_eigvals(h: np.ndarray, bandwidth: int) -> np.ndarray:
    """Eigenvalues of a real symmetric banded matrix given densely."""
    n = h.shape[0]
    bands = np.zeros((bandwidth + 1, n))
    for b in range(bandwidth + 1):
        bands[b, :n - b] = np.diagonal(h, -b)
    return scipy.linalg.eig_banded(bands, lower=True, eigvals_only=True)


def _discrete_eigvals(spec: DiscreteQuasi1D, L: int, seed: SeedSpec) -> np.ndarray:
    h = models.build_finite_discrete(spec, L, seed)
    return _banded_eigvals(h, spec.dim)


def _unitary_angles(spec, L: int, seed: SeedSpec) -> np.ndarray:
    if isinstance(spec, ExtendedCMV):
        u = models.build_extended_cmv(spec, L, seed)
    elif isinstance(spec, UnitaryAnderson):
        u = models.build_unitary_anderson_ring(spec, 2 * L, seed)
    else:
        raise UnsupportedModel(type(spec).__name__)
    return np.angle(np.linalg.eigvals(u))  # branch (-pi, pi]


# --- integrated density of states -------------------------------------------

@dataclass(frozen=True)
class IdsCurve:
    """Per-site eigenvalue counting function on a grid.

    Values are counts divided by the number of lattice sites, so they are
    bounded by D and non-decreasing along the grid.
    """

    grid: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    L: int
    realizations: int
    per_realization: np.ndarray = field(repr=False, default=None)


def ids_estimate(spec, grid, L: int, realizations: int, seed: SeedSpec) -> IdsCurve:
    """Monte Carlo IDS: count eigenvalues (or eigen-angles) at or below each
    grid point, per site, averaged over realizations."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) < 0):
        raise ValidationError("grid must be ordered")
    if L < 8:
        raise ValidationError("L must be >= 8")
    if realizations < 4:
        raise ValidationError("need at least 4 realizations")

    sites = 2 * L + 1 if not isinstance(spec, UnitaryAnderson) else 2 * L
    rows = np.empty((realizations, grid.size))
    base = seed.realization
    for r in range(realizations):
        rseed = seed.with_realization(base + r)
        if isinstance(spec, DiscreteQuasi1D):
            values = np.sort(_discrete_eigvals(spec, L, rseed))
        elif isinstance(spec, (ExtendedCMV, UnitaryAnderson)):
            values = np.sort(_unitary_angles(spec, L, rseed))
        else:
            raise UnsupportedModel(type(spec).__name__)
        rows[r] = np.searchsorted(values, grid, side="right") / sites
    values = rows.mean(axis=0)
    std = rows.std(axis=0, ddof=1) / math.sqrt(realizations)
    return IdsCurve(grid, values, std, L, realizations, per_realization=rows)


# --- spectrum coverage -------------------------------------------------------

@dataclass(frozen=True)
class SpectrumCoverage:
    observed_min: float
    observed_max: float
    target: tuple           # closed intervals (energies or angles)
    violations: int
    coverage_fraction: float
    wrapped: bool = False   # True when the target lives on the circle


def _merge_intervals(intervals):
    intervals = sorted(intervals)
    merged = [list(intervals[0])]
    for lo, hi in intervals[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return tuple((float(a), float(b)) for a, b in merged)


def _discrete_target(spec: DiscreteQuasi1D):
    """[-2, 2] + coupling * supp(law) as a union of closed intervals."""
    kind = spec.laws[0].support()
    lam = spec.coupling
    if kind[0] == "points":
        vals = np.asarray(kind[1]).real
        return _merge_intervals([(-2.0 + lam * v, 2.0 + lam * v) for v in vals])
    return _merge_intervals([(-2.0 + lam * kind[1], 2.0 + lam * kind[2])])


def _unitary_anderson_target(spec: UnitaryAnderson):
    """Arcs [-lam0, lam0] - supp(mu) on the angle branch, wrapped; lam0 =
    arccos(r^2 - t^2)."""
    lam0 = math.acos(spec.reflection ** 2 - spec.transmission ** 2)
    kind = spec.phase_law.support()
    if kind[0] == "interval":
        if kind[2] - kind[1] >= 2 * math.pi - 1e-12:
            return (( -math.pi, math.pi),), True
        arcs = [(-lam0 - kind[2], lam0 - kind[1])]
    else:
        arcs = [(-lam0 - float(v.real), lam0 - float(v.real)) for v in np.asarray(kind[1])]
    # wrap each arc onto the (-pi, pi] branch, splitting at the cut
    wrapped = []
    for lo, hi in arcs:
        width = hi - lo
        if width >= 2 * math.pi:
            return ((-math.pi, math.pi),), True
        lo_w = (lo + math.pi) % (2 * math.pi) - math.pi
        hi_w = lo_w + width
        if hi_w <= math.pi:
            wrapped.append((lo_w, hi_w))
        else:
            wrapped.append((lo_w, math.pi))
            wrapped.append((-math.pi, hi_w - 2 * math.pi))
    return _merge_intervals(wrapped), True


def _covered_fraction(target, points, wrapped):
    total = sum(hi - lo for lo, hi in target)
    if total == 0:
        return 1.0
    delta = max(0.01 * total, 1e-6)
    grid = np.concatenate([np.linspace(lo, hi, 256) for lo, hi in target])
    pts = np.sort(points)
    idx = np.searchsorted(pts, grid)
    lo_n = np.abs(grid - pts[np.clip(idx - 1, 0, pts.size - 1)])
    hi_n = np.abs(pts[np.clip(idx, 0, pts.size - 1)] - grid)
    dist = np.minimum(lo_n, hi_n)
    if wrapped:
        dist = np.minimum(dist, 2 * math.pi - dist)
    return float(np.mean(dist <= delta))


def spectrum_coverage(spec, L: int, realizations: int, seed: SeedSpec) -> SpectrumCoverage:
    """Check that every finite-volume eigenvalue lies inside the printed
    almost-sure spectrum (inflated by 1e-8), and report coverage."""
    tol = 1e-8
    base = seed.realization
    if isinstance(spec, DiscreteQuasi1D):
        if spec.dim != 1:
            raise UnsupportedModel("printed spectrum available only for D = 1")
        target = _discrete_target(spec)
        wrapped = False
        pooled = np.concatenate([
            _discrete_eigvals(spec, L, seed.with_realization(base + r))
            for r in range(realizations)])
    elif isinstance(spec, UnitaryAnderson):
        target, wrapped = _unitary_anderson_target(spec)
        pooled = np.concatenate([
            _unitary_angles(spec, L, seed.with_realization(base + r))
            for r in range(realizations)])
    else:
        raise UnsupportedModel(
            f"no printed almost-sure spectrum for {type(spec).__name__}")
    inside = np.zeros(pooled.size, dtype=bool)
    for lo, hi in target:
        inside |= (pooled >= lo - tol) & (pooled <= hi + tol)
    violations = int(np.sum(~inside))
    fraction = _covered_fraction(target, pooled, wrapped)
    return SpectrumCoverage(float(pooled.min()), float(pooled.max()),
                            target, violations, fraction, wrapped)


# --- Thouless consistency ----------------------------------------------------

@dataclass(frozen=True)
class ThoulessFit:
    alpha_hat: float
    rms_residual: float
    energies: np.ndarray
    gamma1: np.ndarray
    convolution: np.ndarray
    window_sensitivity: float


def _log_kernel(eigs: np.ndarray, e: float, window: float) -> float:
    d = np.abs(eigs - e)
    keep = d > window
    return float(np.sum(np.log(d[keep]) - 0.5 * np.log(eigs[keep] ** 2 + 1.0)))


def thouless_residual(spec: DiscreteQuasi1D, grid, L: int, realizations: int,
                      n_lyap: int, seed: SeedSpec, lyap_realizations: int = 8,
                      reorth_period: int = 10) -> ThoulessFit:
    """Fit the single energy-independent constant linking the top exponent
    to the log-potential of the empirical density of states.

    The empirical measure pools eigenvalues of ``realizations`` independent
    volumes, weighted per site; the singular log kernel excludes a symmetric
    1e-6 window around each grid energy, and the reported sensitivity is the
    change under doubling that window.
    """
    if not isinstance(spec, DiscreteQuasi1D) or spec.dim != 1:
        raise UnsupportedModel("Thouless residual implemented for discrete D = 1")
    grid = np.asarray(grid, dtype=float)
    base = seed.realization
    pooled = np.concatenate([
        _discrete_eigvals(spec, L, seed.with_realization(base + r))
        for r in range(realizations)])
    weight = 1.0 / (realizations * (2 * L + 1))

    conv = np.array([weight * _log_kernel(pooled, e, 1e-6) for e in grid])
    conv_wide = np.array([weight * _log_kernel(pooled, e, 2e-6) for e in grid])
    sensitivity = float(np.max(np.abs(conv - conv_wide)))

    gam = np.empty(grid.size)
    for i, e in enumerate(grid):
        st = lyapunov.CocycleStream(spec, Energy(float(e)), seed)
        res = lyapunov.lyap_spectrum(st, n_lyap, lyap_realizations, reorth_period)
        if res.std_errors[0] >= 0.01:
            raise ValidationError(
                f"top-exponent std error {res.std_errors[0]:.3g} >= 0.01 at E={e}")
        gam[i] = res.exponents[0]

    alpha_hat = float(np.mean(conv - gam))
    residual = gam + alpha_hat - conv
    return ThoulessFit(alpha_hat, float(np.sqrt(np.mean(residual ** 2))),
                       grid, gam, conv, sensitivity)


# --- eigenfunction decay ------------------------------------------------------

@dataclass(frozen=True)
class EigenmodeDecay:
    rates: np.ndarray
    median_rate: float
    gamma_smallest: float
    ratio: float


def eigenmode_decay(spec: DiscreteQuasi1D, L: int, window, realizations: int,
                    seed: SeedSpec, n_lyap: int = 100_000,
                    lyap_realizations: int = 8) -> EigenmodeDecay:
    """Exponential decay rates of interior eigenmodes against the smallest
    positive exponent (the inverse localization length).

    Modes qualify when at least 90% of their mass sits in the middle half of
    the lattice; the rate is the negative slope of log block-profile versus
    distance from the mode's center.
    """
    lo, hi = float(window[0]), float(window[1])
    d = spec.dim
    rates = []
    base = seed.realization
    for r in range(realizations):
        h = models.build_finite_discrete(spec, L, seed.with_realization(base + r))
        vals, vecs = eigensolve_sym(h, vectors=True)
        sel = np.where((vals >= lo) & (vals <= hi))[0]
        sites = np.arange(-L, L + 1)
        middle = np.abs(sites) <= L // 2
        for idx in sel:
            prof = np.linalg.norm(vecs[:, idx].reshape(2 * L + 1, d), axis=1)
            mass = prof ** 2
            if mass[middle].sum() < 0.9 * mass.sum():
                continue
            center = sites[np.argmax(prof)]
            x = np.abs(sites - center)
            keep = prof > prof.max() * 1e-12
            if keep.sum() < 8:
                continue
            slope = np.polyfit(x[keep], np.log(prof[keep]), 1)[0]
            rates.append(-slope)
    if not rates:
        raise NoInteriorModes("no eigenpair passed the interior-mass filter")
    rates = np.asarray(rates)

    st = lyapunov.CocycleStream(spec, Energy(0.5 * (lo + hi)), seed)
    res = lyapunov.lyap_spectrum(st, n_lyap, lyap_realizations)
    gamma_d = float(res.exponents[d - 1])
    med = float(np.median(rates))
    return EigenmodeDecay(rates, med, gamma_d,
                          med / gamma_d if gamma_d != 0 else np.inf)


# --- Wegner probe -------------------------------------------------------------

@dataclass(frozen=True)
class WegnerRow:
    L: int
    kappa: float
    beta: float
    threshold: float
    probability: float
    ci_low: float
    ci_high: float
    reference: float


@dataclass(frozen=True)
class WegnerTable:
    rows: tuple


def _wilson(hits: int, n: int, z: float = 1.959963984540054):
    p = hits / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def wegner_probe(spec: DiscreteQuasi1D, energy: float, L_list, kappa: float,
                 beta: float, realizations: int, seed: SeedSpec,
                 xi: float | None = None) -> WegnerTable:
    """Monte Carlo estimate of P(dist(E, spec(H^Lambda)) <= e^{-kappa L^beta})
    with Wilson 95% intervals and an optional e^{-xi L^beta} reference."""
    if not isinstance(spec, DiscreteQuasi1D):
        raise UnsupportedModel("Wegner probe implemented for the discrete family")
    if kappa <= 0 or not 0 < beta < 1:
        raise ValidationError("need kappa > 0 and beta in (0, 1)")
    if realizations < 200:
        raise ValidationError("need at least 200 realizations per L")
    rows = []
    base = seed.realization
    for L in L_list:
        eps = math.exp(-kappa * L ** beta)
        hits = 0
        for r in range(realizations):
            eigs = _discrete_eigvals(spec, L, seed.with_realization(base + r))
            if np.min(np.abs(eigs - energy)) <= eps:
                hits += 1
        lo, hi = _wilson(hits, realizations)
        ref = math.exp(-xi * L ** beta) if xi is not None else float("nan")
        rows.append(WegnerRow(int(L), kappa, beta, eps, hits / realizations,
                              lo, hi, ref))
    return WegnerTable(tuple(rows))


# --- transport probe ------------------------------------------------------------

@dataclass(frozen=True)
class TransportResult:
    times: np.ndarray
    m2: np.ndarray
    sup_m2: float
    growth_exponent: float


def transport_probe(spec: DiscreteQuasi1D, L: int, t_grid, realizations: int,
                    seed: SeedSpec) -> TransportResult:
    """Second spatial moment of a delta packet evolved by the finite-volume
    operator, with a boundary guard zone of 10 sites.

    The growth exponent is fitted on the tail of the time grid (last three
    quarters, t > 0) in log-log coordinates.
    """
    if not isinstance(spec, DiscreteQuasi1D):
        raise UnsupportedModel("transport probe implemented for the discrete family")
    t_grid = np.asarray(t_grid, dtype=float)
    d = spec.dim
    sites = np.arange(-L, L + 1)
    guard = np.abs(sites) > L - 10
    m2_rows = np.zeros((realizations, t_grid.size))
    base = seed.realization
    for r in range(realizations):
        h = models.build_finite_discrete(spec, L, seed.with_realization(base + r))
        vals, vecs = eigensolve_sym(h, vectors=True)
        psi0 = np.zeros(h.shape[0])
        psi0[L * d] = 1.0  # site 0, first channel
        amps = vecs.T @ psi0
        phases = np.exp(-1j * np.outer(vals, t_grid)) * amps[:, None]
        psi_t = vecs @ phases  # (N, n_t)
        mass = np.abs(psi_t.reshape(2 * L + 1, d, t_grid.size)) ** 2
        site_mass = mass.sum(axis=1)
        if np.max(site_mass[guard]) > 1e-8:
            raise BoundaryContamination(
                f"wave front reached the 10-site guard zone at L={L}")
        m2_rows[r] = (sites[:, None] ** 2 * site_mass).sum(axis=0)
    m2 = m2_rows.mean(axis=0)
    sup_m2 = float(m2.max())
    tail = (t_grid >= t_grid.max() / 4.0) & (t_grid > 0) & (m2 > 0)
    if tail.sum() >= 3:
        slope = np.polyfit(np.log(t_grid[tail]), np.log(m2[tail]), 1)[0]
    else:
        slope = float("nan")
    return TransportResult(t_grid, m2, sup_m2, float(slope))
