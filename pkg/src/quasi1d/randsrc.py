"""Deterministic, splittable randomness: scalar disorder laws and Haar
unitaries.

Streams are counter-based: every (master_seed, realization, stream kind,
chunk) quadruple keys an independent Philox generator, so realizations can
be drawn in parallel with no coordination and any site can be addressed
randomly.  Scalar laws consume exactly one uniform per draw, which is what
makes site addressing inside a chunk exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import matkit
from .errors import BadLaw

__all__ = [
    "CHUNK",
    "SeedSpec",
    "DisorderLaw",
    "TwoPoint",
    "Bernoulli01",
    "UniformInterval",
    "FiniteSupport",
    "draw_site_vector",
    "draw_site_block",
    "haar_unitary",
]

# Sites per keyed sub-stream.  Fixed: changing it changes every stream.
CHUNK = 4096

# Stream kinds (part of the key; keep stable).
KIND_DISORDER = 0
KIND_PHASES = 1
KIND_HAAR = 2
KIND_PROBE = 3

_MASK36 = (1 << 36) - 1
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus a (realization, site) stream id.

    Identical SeedSpecs reproduce identical draws on every platform.  The
    ``site`` field is a base offset; operations that walk sites add their
    own site index on top of it.
    """

    master_seed: int
    realization: int = 0
    site: int = 0

    def with_realization(self, r: int) -> "SeedSpec":
        return replace(self, realization=r)

    def at_site(self, n: int) -> "SeedSpec":
        return replace(self, site=n)


def stream_rng(seed: SeedSpec, kind: int, chunk: int) -> np.random.Generator:
    """Philox generator keyed by (master_seed, realization, kind, chunk)."""
    if not 0 <= seed.realization < (1 << 24):
        raise ValueError("realization index out of the 24-bit key range")
    if not 0 <= chunk <= _MASK36:
        raise ValueError("chunk index out of the 36-bit key range")
    key = np.array(
        [np.uint64(seed.master_seed & _MASK64),
         np.uint64(((seed.realization & 0xFFFFFF) << 40)
                   | ((kind & 0xF) << 36) | (chunk & _MASK36))],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


class DisorderLaw:
    """A bounded scalar law, drawn through a single uniform per sample.

    Concrete laws implement ``_from_uniform`` (the measurable transform of
    a uniform [0,1) draw) and ``support``.  The one-uniform contract is load
    bearing: per-site random access relies on it.
    """

    def _from_uniform(self, u):
        raise NotImplementedError

    def support(self):
        """Support description: ("points", values) or ("interval", lo, hi)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size):
        return self._from_uniform(rng.random(size))

    def bound(self) -> float:
        kind = self.support()
        if kind[0] == "points":
            return float(np.max(np.abs(kind[1])))
        return float(max(abs(kind[1]), abs(kind[2])))


@dataclass(frozen=True)
class TwoPoint(DisorderLaw):
    """Takes the value ``b`` with probability ``p``, else ``a``."""

    a: complex
    b: complex
    p: float = 0.5

    def __post_init__(self):
        if not (np.isfinite(complex(self.a).real) and np.isfinite(complex(self.b).real)
                and np.isfinite(complex(self.a).imag) and np.isfinite(complex(self.b).imag)):
            raise BadLaw("two-point law needs finite support values")
        if self.a == self.b:
            raise BadLaw("two-point law needs two distinct support points")
        if not 0.0 <= self.p <= 1.0:
            raise BadLaw("two-point probability outside [0, 1]")

    def _from_uniform(self, u):
        a, b = complex(self.a), complex(self.b)
        if a.imag == 0.0 and b.imag == 0.0:
            a, b = a.real, b.real
        return np.where(np.asarray(u) < self.p, b, a)

    def support(self):
        return ("points", np.array([self.a, self.b]))


def Bernoulli01(p: float = 0.5) -> TwoPoint:
    """The canonical Bernoulli law on {0, 1}; p defaults to 1/2."""
    return TwoPoint(0.0, 1.0, p)


@dataclass(frozen=True)
class UniformInterval(DisorderLaw):
    """Uniform law on the real interval [lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise BadLaw("uniform law needs a bounded interval")
        if not self.lo < self.hi:
            raise BadLaw("uniform law needs lo < hi")

    def _from_uniform(self, u):
        return self.lo + (self.hi - self.lo) * np.asarray(u)

    def support(self):
        return ("interval", self.lo, self.hi)


@dataclass(frozen=True)
class FiniteSupport(DisorderLaw):
    """Finitely supported law given by values and positive weights."""

    values: tuple
    weights: tuple

    def __post_init__(self):
        vals = np.asarray(self.values)
        wts = np.asarray(self.weights, dtype=float)
        if vals.size != wts.size or vals.size == 0:
            raise BadLaw("values and weights must be matching nonempty tuples")
        if len(set(np.asarray(vals).tolist())) < 2:
            raise BadLaw("finite law needs at least two distinct support points")
        if np.any(wts <= 0) or not np.all(np.isfinite(wts)):
            raise BadLaw("weights must be positive and finite")
        if not np.all(np.isfinite(vals.real)) or not np.all(np.isfinite(vals.imag)):
            raise BadLaw("support values must be finite")
        object.__setattr__(self, "values", tuple(vals.tolist()))
        object.__setattr__(self, "weights", tuple((wts / wts.sum()).tolist()))

    def _cumulative(self):
        return np.cumsum(np.asarray(self.weights, dtype=float))

    def _from_uniform(self, u):
        idx = np.searchsorted(self._cumulative(), np.asarray(u), side="right")
        idx = np.minimum(idx, len(self.values) - 1)
        vals = np.asarray(self.values)
        if np.all(vals.imag == 0.0):
            vals = vals.real
        return vals[idx]

    def index_from_uniform(self, u):
        idx = np.searchsorted(self._cumulative(), np.asarray(u), side="right")
        return np.minimum(idx, len(self.values) - 1)

    def support(self):
        return ("points", np.asarray(self.values))


def _check_laws(laws) -> None:
    if len(laws) == 0:
        raise BadLaw("empty law list")
    for law in laws:
        if not isinstance(law, DisorderLaw):
            raise BadLaw(f"not a disorder law: {law!r}")


def draw_uniform_block(seed: SeedSpec, width: int, start: int, count: int) -> np.ndarray:
    """(count, width) uniforms for sites start..start+count-1.

    Row n holds the ``width`` uniforms of site ``seed.site + start + n``;
    identical to what per-site addressing would produce draw by draw.
    """
    first = seed.site + start
    out = np.empty((count, width))
    filled = 0
    while filled < count:
        site = first + filled
        chunk, offset = divmod(site, CHUNK)
        take = min(CHUNK - offset, count - filled)
        rng = stream_rng(seed, KIND_DISORDER, chunk)
        u = rng.random(CHUNK * width).reshape(CHUNK, width)
        out[filled:filled + take] = u[offset:offset + take]
        filled += take
    return out


def draw_site_block(seed: SeedSpec, laws, start: int, count: int) -> np.ndarray:
    """(count, D) disorder values for sites start..start+count-1."""
    _check_laws(laws)
    u = draw_uniform_block(seed, len(laws), start, count)
    cols = [law._from_uniform(u[:, i]) for i, law in enumerate(laws)]
    return np.stack(cols, axis=1)


def draw_site_vector(seed: SeedSpec, laws, n: int) -> np.ndarray:
    """The length-D disorder vector at site ``n``; coordinate i follows
    laws[i], coordinates and sites are independent."""
    return draw_site_block(seed, laws, n, 1)[0]


def _complex_gaussians(rng: np.random.Generator, shape) -> np.ndarray:
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def haar_unitary(seed: SeedSpec, d: int) -> np.ndarray:
    """One Haar-distributed d x d unitary.

    Standard complex Gaussian fill followed by the positive-diagonal QR of
    :func:`matkit.qr_pos`; the diagonal phase fix is exactly what makes the
    Q factor Haar rather than merely unitary.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = stream_rng(seed, KIND_HAAR, seed.site)
    q, _ = matkit.qr_pos(_complex_gaussians(rng, (d, d)))
    return q


def haar_block(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    """(count, d, d) Haar unitaries drawn sequentially from ``rng``."""
    q, _ = matkit.qr_pos(_complex_gaussians(rng, (count, d, d)))
    return q
