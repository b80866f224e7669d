"""Cocycle evaluation and Lyapunov-spectrum estimation.

The workhorse is the QR-reorthonormalized product: a frame is propagated
through the transfer cocycle and the logs of the R diagonals accumulate the
exponents.  The exterior-power growth rate is kept as an independent oracle
for the partial sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import models
from .errors import BadOrder, NotHyperbolic, SizeTooLarge
from .matkit import qr_pos, wedge_power
from .models import SeedSpec, TransferStream
from .randsrc import KIND_PROBE, stream_rng

__all__ = [
    "BURN_IN",
    "CocycleStream",
    "LyapunovSpectrum",
    "lyap_spectrum",
    "wedge_oracle",
    "oseledets_probe",
    "OseledetsProbe",
    "holder_diag",
    "HolderDiagnostics",
]

BURN_IN = 1000       # steps discarded before accumulation
_CHUNK_BLOCKS = 256  # reorthonormalization blocks per sampling chunk
_WEDGE_CAP = 70      # largest exterior dimension the oracle will handle


class CocycleStream(TransferStream):
    """Deterministic, seeded producer of the i.i.d. transfer sequence of a
    model at a fixed spectral point.

    The forward product of the first n emitted matrices is the n-step
    cocycle.  Identical (spec, point, seed) replay identical sequences.
    """

    def with_realization(self, r: int) -> "CocycleStream":
        return CocycleStream(self.spec, self.point, self.seed.with_realization(r))


@dataclass(frozen=True)
class LyapunovSpectrum:
    """Ordered exponent estimates with across-realization standard errors."""

    exponents: np.ndarray
    std_errors: np.ndarray
    steps: int
    realizations: int
    reorth_period: int
    pairing_defect: float
    per_realization: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if np.any(np.diff(self.exponents) > 1e-15):
            raise AssertionError("exponents must be non-increasing")


def _block_products(chunk: np.ndarray, k: int) -> np.ndarray:
    """Collapse (R, c*k, s, s) into (R, c, s, s) ordered k-step products."""
    r, n, s, _ = chunk.shape
    c = n // k
    blocks = chunk[:, :c * k].reshape(r, c, k, s, s)
    prod = blocks[:, :, 0]
    for j in range(1, k):
        prod = blocks[:, :, j] @ prod
    return prod


def _evolve(streams, q, n_steps, k, log_sums):
    """Advance the frames by n_steps, absorbing R factors every k steps.

    ``log_sums`` is an (R, s) accumulator or None during burn-in.  Returns
    the updated frames.
    """
    done = 0
    while done < n_steps:
        c = min(_CHUNK_BLOCKS, (n_steps - done) // k)
        if c >= 1:
            take = c * k
            chunk = np.stack([st.take(take) for st in streams])
            prods = _block_products(chunk, k)
            for j in range(c):
                q, r = qr_pos(prods[:, j] @ q)
                if log_sums is not None:
                    log_sums += np.log(np.abs(np.diagonal(r, axis1=-2, axis2=-1)))
        else:
            take = n_steps - done
            chunk = np.stack([st.take(take) for st in streams])
            prod = chunk[:, 0]
            for j in range(1, take):
                prod = chunk[:, j] @ prod
            q, r = qr_pos(prod @ q)
            if log_sums is not None:
                log_sums += np.log(np.abs(np.diagonal(r, axis1=-2, axis2=-1)))
        done += take
    return q


def lyap_spectrum(stream: CocycleStream, n: int, realizations: int = 16,
                  reorth_period: int = 10) -> LyapunovSpectrum:
    """Estimate all 2D Lyapunov exponents of the cocycle.

    Realization r uses the stream reseeded at realization index
    ``stream.seed.realization + r``; a fixed burn-in of 1000 steps is
    discarded before accumulation.  Standard errors come from the
    across-realization spread, so they are honest i.i.d. confidence
    numbers (realizations >= 2 for finite errors).
    """
    if n < 1000:
        raise ValueError("n must be >= 1e3")
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    if not 1 <= reorth_period <= 50:
        raise ValueError("reorth period must lie in [1, 50]")

    base = stream.seed.realization
    streams = [stream.with_realization(base + r) for r in range(realizations)]
    s = stream.dim
    dtype = complex if isinstance(stream.spec, models.UNITARY) else float
    q = np.broadcast_to(np.eye(s, dtype=dtype), (realizations, s, s)).copy()

    q = _evolve(streams, q, BURN_IN, reorth_period, None)
    sums = np.zeros((realizations, s))
    _evolve(streams, q, n, reorth_period, sums)

    per_real = sums / n
    mean = per_real.mean(axis=0)
    if realizations >= 2:
        std = per_real.std(axis=0, ddof=1) / math.sqrt(realizations)
    else:
        std = np.full(s, np.inf)
    order = np.argsort(-mean, kind="stable")
    exponents = mean[order]
    std = std[order]
    defect = float(np.max(np.abs(exponents + exponents[::-1])))
    return LyapunovSpectrum(exponents, std, n, realizations, reorth_period,
                            defect, per_realization=per_real[:, order])


def wedge_oracle(stream: CocycleStream, p: int, n: int,
                 realizations: int = 16, reorth_period: int = 10):
    """Growth rate of the p-th exterior power of the cocycle.

    Independent estimate of the partial sum gamma_1 + ... + gamma_p, straight
    from the defining limit.  Returns (estimate, std_error).
    """
    s = stream.dim
    if not 1 <= p <= s:
        raise BadOrder(f"exterior order {p} outside [1, {s}]")
    if math.comb(s, p) > _WEDGE_CAP:
        raise SizeTooLarge(f"exterior dimension {math.comb(s, p)} exceeds {_WEDGE_CAP}")

    base = stream.seed.realization
    rates = np.empty(realizations)
    for r in range(realizations):
        st = stream.with_realization(base + r)
        st.take(BURN_IN)  # align with the QR estimator's discarded prefix
        dim_w = math.comb(s, p)
        w = np.eye(dim_w, dtype=complex if isinstance(st.spec, models.UNITARY) else float)
        acc = 0.0
        done = 0
        while done < n:
            take = min(_CHUNK_BLOCKS * reorth_period, n - done)
            chunk = st.take(take)[None, ...]
            c = take // reorth_period
            if c >= 1:
                prods = _block_products(chunk, reorth_period)[0]
                for j in range(c):
                    w = wedge_power(prods[j], p) @ w
                    nrm = np.linalg.norm(w, 2)
                    acc += math.log(nrm)
                    w /= nrm
            rem = take - c * reorth_period
            if rem:
                tail = chunk[0, c * reorth_period:]
                prod = tail[0]
                for j in range(1, rem):
                    prod = tail[j] @ prod
                w = wedge_power(prod, p) @ w
                nrm = np.linalg.norm(w, 2)
                acc += math.log(nrm)
                w /= nrm
            done += take
        rates[r] = acc / n
    est = rates.mean()
    err = rates.std(ddof=1) / math.sqrt(realizations) if realizations >= 2 else np.inf
    return float(est), float(err)


@dataclass(frozen=True)
class OseledetsProbe:
    gamma: float
    std_error: float
    v_minus: np.ndarray
    rate_minus: float
    rate_plus: float


def _inv_2x2(t: np.ndarray) -> np.ndarray:
    det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
    return np.array([[t[1, 1], -t[0, 1]], [-t[1, 0], t[0, 0]]]) / det


def oseledets_probe(stream: CocycleStream, n: int) -> OseledetsProbe:
    """Locate the contracting line of a hyperbolic 2x2 cocycle and verify
    the two-sided rates along and off it.

    The contracting direction is the row space of the inverse-transpose
    cocycle applied for n steps; pushing it forward through the first n/2
    steps of the same realization must decay at -gamma, while a generic
    vector grows at +gamma.
    """
    if stream.dim != 2:
        raise ValueError("oseledets_probe requires a D = 1 model")

    mats = stream.with_realization(stream.seed.realization).take(n)

    # forward QR pass with batch-of-20 segment means for the error bar
    seg = max(1, n // 20)
    q = np.eye(2)
    seg_sums, acc, count = [], 0.0, 0
    for i in range(n):
        q, r = qr_pos(mats[i] @ q)
        acc += math.log(abs(r[0, 0]))
        count += 1
        if count == seg:
            seg_sums.append(acc / seg)
            acc, count = 0.0, 0
    seg_sums = np.array(seg_sums)
    gamma = float(seg_sums.mean())
    sigma = float(seg_sums.std(ddof=1) / math.sqrt(len(seg_sums)))
    if gamma <= 5 * sigma:
        raise NotHyperbolic(f"gamma = {gamma:.3g} not resolved above 5 sigma = {5 * sigma:.3g}")

    # inverse-transpose cocycle; its transposed limit spans the contracting line
    m = np.eye(2)
    for i in range(n):
        m = _inv_2x2(mats[i]).T @ m
        if i % 25 == 0:
            m /= np.linalg.norm(m, 2)
    rng = stream_rng(stream.seed, KIND_PROBE, 0)
    w = rng.standard_normal(2)
    v_minus = m.T @ w
    v_minus /= np.linalg.norm(v_minus)

    def forward_rate(v0: np.ndarray, steps: int) -> float:
        v = v0.copy()
        total = 0.0
        for i in range(steps):
            v = mats[i] @ v
            nrm = np.linalg.norm(v)
            total += math.log(nrm)
            v /= nrm
        return total / steps

    half = n // 2
    rate_minus = forward_rate(v_minus, half)
    generic = rng.standard_normal(2)
    generic /= np.linalg.norm(generic)
    rate_plus = forward_rate(generic, half)
    return OseledetsProbe(gamma, sigma, v_minus, rate_minus, rate_plus)


@dataclass(frozen=True)
class HolderDiagnostics:
    """Empirical regularity diagnostics of the top exponent over an energy
    window, plus the raw ingredients of the two transfer-matrix bounds."""

    energies: np.ndarray
    gamma1: np.ndarray
    std_errors: np.ndarray
    pair_table: list        # rows (E, E', |dgamma| / |dE|)
    holder_exponent: float  # nan when the window shows no resolved variation
    holder_ci: tuple
    max_wedge_norm_sq: dict  # p -> largest observed ||wedge^p T(E)||^2
    implied_c1: float
    lipschitz_ratio: float   # max ||T(E)-T(E')|| / |E-E'| over common draws


def holder_diag(spec, energies, n: int, realizations: int = 8,
                seed: SeedSpec | None = None, reorth_period: int = 10) -> HolderDiagnostics:
    """Scan the top exponent over an energy grid and report local Hoelder
    behaviour along with the norm/Lipschitz constants entering the
    regularity bounds."""
    energies = np.asarray(energies, dtype=float)
    if energies.size < 8:
        raise ValueError("need at least 8 grid energies")
    seed = seed if seed is not None else SeedSpec(0)

    gam = np.empty(energies.size)
    err = np.empty(energies.size)
    for i, e in enumerate(energies):
        st = CocycleStream(spec, models.Energy(float(e)), seed)
        res = lyap_spectrum(st, n, realizations, reorth_period)
        gam[i] = res.exponents[0]
        err[i] = res.std_errors[0]

    draws = 200
    d = spec.dim
    mats = {float(e): CocycleStream(spec, models.Energy(float(e)), seed).take(draws)
            for e in energies}
    max_wedge = {}
    for p in range(1, d + 1):
        worst = 0.0
        for e in energies:
            for t in mats[float(e)]:
                worst = max(worst, np.linalg.norm(wedge_power(t, p), 2) ** 2)
        max_wedge[p] = worst
    implied_c1 = max(
        (math.log(max(np.linalg.norm(wedge_power(t, p), 2) ** 2, 1e-300)) - p * abs(e) - p) / p
        for p in range(1, d + 1) for e in energies for t in mats[float(e)])

    lip = 0.0
    for i in range(energies.size - 1):
        e0, e1 = float(energies[i]), float(energies[i + 1])
        diff = mats[e0] - mats[e1]
        lip = max(lip, max(np.linalg.norm(m, 2) for m in diff) / abs(e1 - e0))

    pair_table = []
    xs, ys = [], []
    for i in range(energies.size):
        for j in range(i + 1, energies.size):
            de = abs(energies[j] - energies[i])
            dg = abs(gam[j] - gam[i])
            pair_table.append((float(energies[i]), float(energies[j]),
                               float(dg / de) if de > 0 else np.nan))
            noise = 2.0 * math.hypot(err[i], err[j])
            if dg > noise and de > 0:
                xs.append(math.log(de))
                ys.append(math.log(dg))
    if len(xs) >= 3:
        x = np.asarray(xs)
        y = np.asarray(ys)
        coef, cov = np.polyfit(x, y, 1, cov=True)
        alpha = float(coef[0])
        half = 1.96 * math.sqrt(cov[0, 0])
        ci = (alpha - half, alpha + half)
    else:
        alpha, ci = float("nan"), (float("nan"), float("nan"))

    return HolderDiagnostics(energies, gam, err, pair_table, alpha, ci,
                             max_wedge, float(implied_c1), float(lip))
