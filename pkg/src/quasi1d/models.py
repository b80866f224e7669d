"""Model families: transfer-matrix samplers and finite-volume builders.

Each family is described by a frozen spec object carrying all parameters.
Self-adjoint families (discrete, continuous, point interactions) evaluate at
real energies and produce real symplectic transfer matrices; unitary
families (unitary Anderson, scattering zipper, extended CMV) evaluate at
unimodular spectral points and produce complex Lorentz transfer matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matkit, randsrc
from .errors import (
    DegenerateTransmission,
    DimensionMismatch,
    SingularBeta,
    UnsupportedModel,
    ValidationError,
    VerblunskyTooLarge,
)
from .matkit import GroupTag
from .randsrc import DisorderLaw, SeedSpec, UniformInterval

__all__ = [
    "DiscreteQuasi1D", "ContinuousQuasi1D", "PointInteractions",
    "UnitaryAnderson", "ScatteringZipper", "ExtendedCMV",
    "Energy", "Unimodular", "TransferSample",
    "default_interaction",
    "discrete_transfer", "continuous_transfer", "point_interaction_transfer",
    "unitary_anderson_transfer", "scattering_matrix", "phi_map",
    "zipper_transfer", "zipper_hats",
    "unitary_anderson_form", "unitary_anderson_frame",
    "build_finite_discrete", "build_extended_cmv",
    "build_unitary_anderson_ring",
    "group_tag", "cocycle_dim", "check_point", "TransferStream",
]

_CONFIG_CAP = 4096  # largest finite-support configuration table


def default_interaction(d: int) -> np.ndarray:
    """Tridiagonal coupling: zero diagonal, ones on the off-diagonals."""
    v = np.zeros((d, d))
    idx = np.arange(d - 1)
    v[idx, idx + 1] = 1.0
    v[idx + 1, idx] = 1.0
    return v


def _as_symmetric(v, d: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (d, d):
        raise ValidationError(f"{name} must be {d}x{d}, got {v.shape}")
    if not np.allclose(v, v.T, atol=1e-12):
        raise ValidationError(f"{name} must be symmetric")
    return v


def _default_laws(d: int):
    return tuple(randsrc.Bernoulli01() for _ in range(d))


@dataclass(frozen=True, eq=False)
class DiscreteQuasi1D:
    """Discrete Schroedinger operator on Z with D coupled layers.

    Potential at site n is coupling * (interaction + diag(omega)); the free
    case is coupling = 0.
    """

    dim: int
    coupling: float = 1.0
    interaction: np.ndarray | None = None
    laws: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if self.coupling < 0:
            raise ValidationError("coupling must be >= 0")
        v = default_interaction(self.dim) if self.interaction is None \
            else _as_symmetric(self.interaction, self.dim, "interaction")
        object.__setattr__(self, "interaction", v)
        laws = self.laws or _default_laws(self.dim)
        if len(laws) != self.dim:
            raise ValidationError(f"need {self.dim} disorder laws, got {len(laws)}")
        object.__setattr__(self, "laws", tuple(laws))


@dataclass(frozen=True, eq=False)
class ContinuousQuasi1D:
    """Continuous model with piecewise-constant potential on cells of
    length ``cell``; one transfer matrix per cell is a single matrix
    exponential."""

    dim: int
    cell: float
    couplings: tuple = ()
    interaction: np.ndarray | None = None
    laws: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        if not self.cell > 0:
            raise ValidationError("cell length must be > 0")
        c = self.couplings or tuple(1.0 for _ in range(self.dim))
        if len(c) != self.dim or any(ci == 0 for ci in c):
            raise ValidationError("couplings must be dim non-zero numbers")
        object.__setattr__(self, "couplings", tuple(float(ci) for ci in c))
        v = default_interaction(self.dim) if self.interaction is None \
            else _as_symmetric(self.interaction, self.dim, "interaction")
        object.__setattr__(self, "interaction", v)
        laws = self.laws or _default_laws(self.dim)
        if len(laws) != self.dim:
            raise ValidationError(f"need {self.dim} disorder laws, got {len(laws)}")
        object.__setattr__(self, "laws", tuple(laws))


@dataclass(frozen=True, eq=False)
class PointInteractions:
    """Free propagation on unit cells with random point couplings at the
    integers."""

    dim: int
    couplings: tuple = ()
    interaction: np.ndarray | None = None
    laws: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        c = self.couplings or tuple(1.0 for _ in range(self.dim))
        if len(c) != self.dim or any(ci == 0 for ci in c):
            raise ValidationError("couplings must be dim non-zero numbers")
        object.__setattr__(self, "couplings", tuple(float(ci) for ci in c))
        v = default_interaction(self.dim) if self.interaction is None \
            else _as_symmetric(self.interaction, self.dim, "interaction")
        object.__setattr__(self, "interaction", v)
        laws = self.laws or _default_laws(self.dim)
        if len(laws) != self.dim:
            raise ValidationError(f"need {self.dim} disorder laws, got {len(laws)}")
        object.__setattr__(self, "laws", tuple(laws))


@dataclass(frozen=True, eq=False)
class UnitaryAnderson:
    """Band unitary operator D_omega * S with reflection/transmission pair
    (r, t), r^2 + t^2 = 1, and i.i.d. phases on the circle."""

    reflection: float
    transmission: float
    phase_law: DisorderLaw = field(default_factory=lambda: UniformInterval(0.0, 2.0 * np.pi))

    def __post_init__(self):
        if abs(self.reflection ** 2 + self.transmission ** 2 - 1.0) > 1e-12:
            raise ValidationError("unitary Anderson constraint r^2+t^2=1 violated")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True, eq=False)
class ScatteringZipper:
    """Random scattering zipper with constant Verblunsky matrix alpha != 0
    and Haar phases."""

    dim: int
    verblunsky: np.ndarray = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError("dim must be >= 1")
        a = np.asarray(self.verblunsky, dtype=complex)
        if a.shape != (self.dim, self.dim):
            raise ValidationError(f"verblunsky must be {self.dim}x{self.dim}")
        _check_verblunsky(a)
        if np.all(a == 0):
            raise ValidationError("zipper requires alpha != 0")
        object.__setattr__(self, "verblunsky", a)


@dataclass(frozen=True, eq=False)
class ExtendedCMV:
    """Doubly-infinite CMV operator with i.i.d. Verblunsky coefficients."""

    law: DisorderLaw = None

    def __post_init__(self):
        if not isinstance(self.law, DisorderLaw):
            raise ValidationError("ExtendedCMV needs a Verblunsky disorder law")
        if self.law.bound() >= 1.0:
            raise ValidationError("Verblunsky law must be supported in the open unit disk")

    @property
    def dim(self) -> int:
        return 1


SELF_ADJOINT = (DiscreteQuasi1D, ContinuousQuasi1D, PointInteractions)
UNITARY = (UnitaryAnderson, ScatteringZipper, ExtendedCMV)


@dataclass(frozen=True)
class Energy:
    """Real spectral point for the self-adjoint families."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValidationError("energy must be finite")


@dataclass(frozen=True)
class Unimodular:
    """Spectral point on the unit circle for the unitary families."""

    value: complex

    def __post_init__(self):
        if abs(abs(self.value) - 1.0) > 1e-12:
            raise ValidationError("|z| must equal 1 within 1e-12")


@dataclass(frozen=True, eq=False)
class TransferSample:
    matrix: np.ndarray
    group: GroupTag
    site: int = 0


def check_point(spec, point) -> None:
    """Self-adjoint families take Energy, unitary families Unimodular."""
    if isinstance(spec, SELF_ADJOINT) and not isinstance(point, Energy):
        raise ValidationError(f"{type(spec).__name__} requires an Energy point")
    if isinstance(spec, UNITARY) and not isinstance(point, Unimodular):
        raise ValidationError(f"{type(spec).__name__} requires a Unimodular point")


def group_tag(spec) -> GroupTag:
    if isinstance(spec, SELF_ADJOINT):
        return GroupTag.symplectic(spec.dim)
    if isinstance(spec, (UnitaryAnderson, ScatteringZipper)):
        return GroupTag.lorentz(spec.dim)
    raise UnsupportedModel(f"no transfer cocycle for {type(spec).__name__}")


def cocycle_dim(spec) -> int:
    return 2 * spec.dim


# --- self-adjoint transfer matrices ----------------------------------------

def discrete_transfer(spec: DiscreteQuasi1D, energy: Energy, omega) -> TransferSample:
    """One-step transfer [[lambda*V_omega - E, -I], [I, 0]]."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (spec.dim,):
        raise DimensionMismatch(f"omega must have length {spec.dim}")
    d = spec.dim
    t = np.zeros((2 * d, 2 * d))
    t[:d, :d] = spec.coupling * (spec.interaction + np.diag(omega)) \
        - energy.value * np.eye(d)
    t[:d, d:] = -np.eye(d)
    t[d:, :d] = np.eye(d)
    return TransferSample(t, GroupTag.symplectic(d))


def _hamiltonian_generator(m: np.ndarray) -> np.ndarray:
    """X = [[0, I], [M, 0]] for a D x D block M."""
    d = m.shape[0]
    x = np.zeros((2 * d, 2 * d))
    x[:d, d:] = np.eye(d)
    x[d:, :d] = m
    return x


def continuous_generator(spec: ContinuousQuasi1D, energy: Energy, omega) -> np.ndarray:
    """The constant-coefficient generator X_omega(E) on one cell."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (spec.dim,):
        raise DimensionMismatch(f"omega must have length {spec.dim}")
    m = spec.interaction + np.diag(np.asarray(spec.couplings) * omega) \
        - energy.value * np.eye(spec.dim)
    return _hamiltonian_generator(m)


def continuous_transfer(spec: ContinuousQuasi1D, energy: Energy, omega) -> TransferSample:
    """Cell transfer exp(cell * X_omega(E))."""
    x = continuous_generator(spec, energy, omega)
    return TransferSample(matkit.expm(spec.cell * x), GroupTag.symplectic(spec.dim))


def point_free_transfer(spec: PointInteractions, energy: Energy) -> np.ndarray:
    """Free unit-cell transfer exp([[0, I], [V0 - E, 0]])."""
    m = spec.interaction - energy.value * np.eye(spec.dim)
    return matkit.expm(_hamiltonian_generator(m))


def point_interaction_transfer(spec: PointInteractions, energy: Energy, omega) -> TransferSample:
    """M(diag(c_i omega_i)) times the free unit-cell transfer."""
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (spec.dim,):
        raise DimensionMismatch(f"omega must have length {spec.dim}")
    d = spec.dim
    kick = np.eye(2 * d)
    kick[d:, :d] = np.diag(np.asarray(spec.couplings) * omega)
    return TransferSample(kick @ point_free_transfer(spec, energy),
                          GroupTag.symplectic(d))


# --- unitary Anderson -------------------------------------------------------

def unitary_anderson_transfer(spec: UnitaryAnderson, z: Unimodular,
                              theta: float, eta: float) -> TransferSample:
    """The 2x2 transfer matrix of the unitary Anderson model.

    The matrix preserves the Hermitian form returned by
    :func:`unitary_anderson_form` (signature (1,1)); conjugating with
    :func:`unitary_anderson_frame` moves it to the standard diag(1,-1) form.
    """
    r, t = spec.reflection, spec.transmission
    if t == 0:
        raise DegenerateTransmission("transfer matrix undefined at t = 0")
    zv = complex(z.value)
    em_eta = np.exp(-1j * eta)
    e_theta = np.exp(1j * theta)
    e_diff = np.exp(1j * (theta - eta))
    mat = np.array([
        [-em_eta / zv, (r / t) * (e_diff - em_eta / zv)],
        [(r / t) * (1.0 - em_eta / zv),
         -(zv / t ** 2) * e_theta + (r ** 2 / t ** 2) * (1.0 + e_diff - em_eta / zv)],
    ])
    return TransferSample(mat, GroupTag.lorentz(1))


def unitary_anderson_form(spec: UnitaryAnderson) -> np.ndarray:
    """The invariant Hermitian form Q = [[t, r], [r, -t]] of the family.

    Q has eigenvalues +-1, so it is congruent to diag(1,-1): the transfer
    matrices are Lorentz in an (r,t)-adapted basis rather than the standard
    one.
    """
    r, t = spec.reflection, spec.transmission
    return np.array([[t, r], [r, -t]])


def unitary_anderson_frame(spec: UnitaryAnderson) -> np.ndarray:
    """Real orthogonal W with W.T Q W = diag(1,-1)."""
    q = unitary_anderson_form(spec)
    vals, vecs = np.linalg.eigh(q)
    order = np.argsort(-vals)  # +1 eigenvector first
    return vecs[:, order]


# --- scattering zipper ------------------------------------------------------

def _hermitian_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(a)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def _check_verblunsky(alpha: np.ndarray) -> None:
    gram = alpha.conj().T @ alpha
    if np.linalg.norm(gram, 2) >= 1.0 - 1e-12:
        raise VerblunskyTooLarge("||alpha* alpha|| must stay below 1")


def _rho_pair(alpha: np.ndarray):
    d = alpha.shape[0]
    rho = _hermitian_sqrt(np.eye(d) - alpha @ alpha.conj().T)
    rho_t = _hermitian_sqrt(np.eye(d) - alpha.conj().T @ alpha)
    return rho, rho_t


def scattering_matrix(alpha, u, v) -> np.ndarray:
    """Scattering block S(alpha, U, V) = [[alpha, rho U], [V rho~, -V alpha* U]]."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=complex))
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    v = np.atleast_2d(np.asarray(v, dtype=complex))
    _check_verblunsky(alpha)
    rho, rho_t = _rho_pair(alpha)
    return np.block([[alpha, rho @ u],
                     [v @ rho_t, -v @ alpha.conj().T @ u]])


def phi_map(s: np.ndarray) -> np.ndarray:
    """Map a scattering block into the Lorentz group:
    [[a, b], [c, d]] -> [[c - d b^-1 a, d b^-1], [-b^-1 a, b^-1]]."""
    s = np.asarray(s, dtype=complex)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        raise ValueError("phi_map expects a square matrix of even size")
    d = s.shape[0] // 2
    a, b = s[:d, :d], s[:d, d:]
    c, dd = s[d:, :d], s[d:, d:]
    if np.linalg.cond(b) >= 1e12:
        raise SingularBeta("top-right block not invertible within tolerance")
    b_inv = np.linalg.inv(b)
    return np.block([[c - dd @ b_inv @ a, dd @ b_inv],
                     [-b_inv @ a, b_inv]])


def zipper_hats(alpha: np.ndarray, z: complex):
    """The fixed factors (T^_0(z), T^_1) of the zipper transfer matrix.

    Off-diagonal blocks carry -alpha: with the printed sign the product
    fails the scattering factorization identity by exactly the relabeling
    alpha -> -alpha, so the sign is fixed here once and for all.
    """
    alpha = np.asarray(alpha, dtype=complex)
    _check_verblunsky(alpha)
    rho, rho_t = _rho_pair(alpha)
    if min(np.linalg.cond(rho), np.linalg.cond(rho_t)) >= 1e12:
        raise SingularBeta("rho(alpha) not invertible within tolerance")
    rho_i = np.linalg.inv(rho)
    rho_ti = np.linalg.inv(rho_t)
    off_top = -rho_ti @ alpha.conj().T
    off_bot = -alpha @ rho_ti
    t0 = np.block([[rho_ti / z, off_top], [off_bot, z * rho_i]])
    t1 = np.block([[rho_ti, off_top], [off_bot, rho_i]])
    return t0, t1


def zipper_transfer(spec: ScatteringZipper, z: Unimodular, phases) -> TransferSample:
    """Transfer matrix diag(V0, U0*) T^_0(z) diag(V1, U1*) T^_1.

    ``phases`` is the 4-tuple (U0, V0, U1, V1) of unitaries.  The result
    equals phi(z^-1 S(alpha,U0,V0)) @ phi(S(alpha,U1,V1)).
    """
    u0, v0, u1, v1 = (np.atleast_2d(np.asarray(p, dtype=complex)) for p in phases)
    d = spec.dim
    t0, t1 = zipper_hats(spec.verblunsky, complex(z.value))
    left = np.zeros((2 * d, 2 * d), dtype=complex)
    left[:d, :d] = v0
    left[d:, d:] = u0.conj().T
    mid = np.zeros((2 * d, 2 * d), dtype=complex)
    mid[:d, :d] = v1
    mid[d:, d:] = u1.conj().T
    return TransferSample(left @ t0 @ mid @ t1, GroupTag.lorentz(d))


# --- finite-volume builders -------------------------------------------------

def _zigzag(n):
    """Bijection Z -> N, stable under window growth: 0,-1,1,-2,2,... ->
    0,1,2,3,4,..."""
    n = np.asarray(n)
    return np.where(n >= 0, 2 * n, -2 * n - 1)


def site_disorder(spec, seed: SeedSpec, sites) -> np.ndarray:
    """(len(sites), D) disorder vectors, site-addressed via the zigzag map."""
    sites = np.asarray(sites)
    pos = _zigzag(sites)
    block = randsrc.draw_site_block(seed, spec.laws, 0, int(pos.max()) + 1)
    return block[pos]


def build_finite_discrete(spec: DiscreteQuasi1D, L: int, seed: SeedSpec) -> np.ndarray:
    """Dirichlet restriction of the discrete operator to sites -L..L:
    block tridiagonal with diagonal blocks lambda*V_omega and -I hopping."""
    if L < 1:
        raise ValidationError("L must be >= 1")
    d = spec.dim
    sites = np.arange(-L, L + 1)
    omegas = site_disorder(spec, seed, sites)
    n = d * (2 * L + 1)
    h = np.zeros((n, n))
    for i in range(2 * L + 1):
        block = spec.coupling * (spec.interaction + np.diag(omegas[i]))
        h[i * d:(i + 1) * d, i * d:(i + 1) * d] = block
        if i + 1 < 2 * L + 1:
            h[i * d:(i + 1) * d, (i + 1) * d:(i + 2) * d] = -np.eye(d)
            h[(i + 1) * d:(i + 2) * d, i * d:(i + 1) * d] = -np.eye(d)
    return h


def build_extended_cmv(spec: ExtendedCMV, L: int, seed: SeedSpec) -> np.ndarray:
    """Exactly unitary finite section of the extended CMV matrix.

    Verblunsky coefficients are drawn for the window; the two factor blocks
    straddling the boundary are replaced by their unimodular |alpha| = 1
    limit (a diagonal unitary), which closes the section without spoiling
    the interior five-diagonal pattern.
    """
    if L < 2:
        raise ValidationError("L must be >= 2")
    lo, hi = -L, L
    n = hi - lo + 1
    ks = np.arange(lo - 1, hi + 1)
    alphas = randsrc.draw_site_block(seed, (spec.law,), 0, int(_zigzag(ks).max()) + 1)
    alpha_of = {int(k): complex(alphas[_zigzag(k), 0]) for k in ks}

    def factor(parity: int) -> np.ndarray:
        f = np.zeros((n, n), dtype=complex)
        for k in range(lo - 1, hi + 1):
            if k % 2 != parity:
                continue
            i, j = k - lo, k + 1 - lo
            if 0 <= i < n and 0 <= j < n:
                a = alpha_of[k]
                rho = np.sqrt(1.0 - abs(a) ** 2)
                f[i, i] = np.conj(a)
                f[i, j] = rho
                f[j, i] = rho
                f[j, j] = -a
            elif 0 <= i < n:
                f[i, i] = 1.0
            elif 0 <= j < n:
                f[j, j] = -1.0
        return f

    return factor(0) @ factor(1)


def build_unitary_anderson_ring(spec: UnitaryAnderson, n_sites: int,
                                seed: SeedSpec) -> np.ndarray:
    """Periodic realization D_omega U_e U_o on a ring of even size."""
    if n_sites < 4 or n_sites % 2:
        raise ValidationError("ring size must be even and >= 4")
    r, t = spec.reflection, spec.transmission
    b1 = np.array([[r, t], [-t, r]])
    b2 = np.array([[r, -t], [t, r]])
    ue = np.zeros((n_sites, n_sites))
    uo = np.zeros((n_sites, n_sites))
    for k in range(0, n_sites, 2):
        ue[np.ix_([k, k + 1], [k, k + 1])] = b1
    for k in range(1, n_sites, 2):
        idx = [k, (k + 1) % n_sites]
        uo[np.ix_(idx, idx)] = b2
    u = randsrc.draw_uniform_block(seed, 1, 0, n_sites)[:, 0]
    theta = np.asarray(spec.phase_law._from_uniform(u), dtype=float)
    return (np.exp(-1j * theta)[:, None] * ue) @ uo


# --- block samplers ---------------------------------------------------------

def _finite_values(law):
    kind = law.support()
    return np.asarray(kind[1]) if kind[0] == "points" else None


def _law_indices(law, u):
    """Category indices consistent with law._from_uniform."""
    if isinstance(law, randsrc.TwoPoint):
        return (np.asarray(u) < law.p).astype(int)  # support order (a, b)
    if isinstance(law, randsrc.FiniteSupport):
        return law.index_from_uniform(u)
    raise ValueError("law has no finite index map")


class TransferStream:
    """Sequential i.i.d. transfer-matrix sampler for one realization.

    ``take(count)`` returns the next ``count`` matrices as an array of shape
    (count, 2D, 2D).  The stream is deterministic in (spec, point, seed) and
    re-playable via ``reset``.
    """

    def __init__(self, spec, point, seed: SeedSpec):
        check_point(spec, point)
        if isinstance(spec, ExtendedCMV):
            raise UnsupportedModel(
                "extended CMV has no printed one-step transfer matrix; "
                "use the scattering zipper for the unitary cocycle")
        self.spec = spec
        self.point = point
        self.seed = seed
        self.cursor = 0
        self._table = None
        self._zip_cache = None  # (chunk_index, matrices)
        if isinstance(spec, (ContinuousQuasi1D, PointInteractions)):
            self._table = self._build_table()

    @property
    def dim(self) -> int:
        return cocycle_dim(self.spec)

    @property
    def group(self) -> GroupTag:
        return group_tag(self.spec)

    def reset(self) -> None:
        self.cursor = 0

    def with_realization(self, r: int) -> "TransferStream":
        return TransferStream(self.spec, self.point, self.seed.with_realization(r))

    def _build_table(self):
        values = [_finite_values(law) for law in self.spec.laws]
        if any(v is None for v in values):
            return None
        sizes = [len(v) for v in values]
        total = int(np.prod(sizes))
        if total > _CONFIG_CAP:
            return None
        strides = np.cumprod([1] + sizes[:-1])
        table = np.empty((total, self.dim, self.dim))
        for code in range(total):
            omega = np.array([values[i][(code // strides[i]) % sizes[i]].real
                              for i in range(len(sizes))])
            table[code] = self._single(omega)
        return strides, table

    def _single(self, omega):
        if isinstance(self.spec, ContinuousQuasi1D):
            return continuous_transfer(self.spec, self.point, omega).matrix
        return point_interaction_transfer(self.spec, self.point, omega).matrix

    def take(self, count: int) -> np.ndarray:
        spec = self.spec
        start = self.cursor
        self.cursor += count
        if isinstance(spec, DiscreteQuasi1D):
            return self._take_discrete(start, count)
        if isinstance(spec, (ContinuousQuasi1D, PointInteractions)):
            return self._take_exponential(start, count)
        if isinstance(spec, UnitaryAnderson):
            return self._take_unitary_anderson(start, count)
        if isinstance(spec, ScatteringZipper):
            return self._take_zipper(start, count)
        raise UnsupportedModel(type(spec).__name__)

    def _take_discrete(self, start, count):
        spec, e = self.spec, self.point.value
        d = spec.dim
        omegas = randsrc.draw_site_block(self.seed, spec.laws, start, count)
        t = np.zeros((count, 2 * d, 2 * d))
        t[:, :d, :d] = spec.coupling * spec.interaction - e * np.eye(d)
        rng_d = np.arange(d)
        t[:, rng_d, rng_d] += spec.coupling * omegas
        t[:, :d, d:] = -np.eye(d)
        t[:, d:, :d] = np.eye(d)
        return t

    def _take_exponential(self, start, count):
        spec = self.spec
        if self._table is not None:
            strides, table = self._table
            u = randsrc.draw_uniform_block(self.seed, spec.dim, start, count)
            code = np.zeros(count, dtype=int)
            for i, law in enumerate(spec.laws):
                code += strides[i] * _law_indices(law, u[:, i])
            return table[code]
        omegas = randsrc.draw_site_block(self.seed, spec.laws, start, count)
        out = np.empty((count, self.dim, self.dim))
        for i in range(count):
            out[i] = self._single(omegas[i])
        return out

    def _take_unitary_anderson(self, start, count):
        law = self.spec.phase_law
        u = randsrc.draw_uniform_block(self.seed, 2, start, count)
        theta = np.asarray(law._from_uniform(u[:, 0]), dtype=float)
        eta = np.asarray(law._from_uniform(u[:, 1]), dtype=float)
        r, t = self.spec.reflection, self.spec.transmission
        if t == 0:
            raise DegenerateTransmission("transfer matrix undefined at t = 0")
        zv = complex(self.point.value)
        em_eta = np.exp(-1j * eta)
        e_theta = np.exp(1j * theta)
        e_diff = np.exp(1j * (theta - eta))
        out = np.empty((count, 2, 2), dtype=complex)
        out[:, 0, 0] = -em_eta / zv
        out[:, 0, 1] = (r / t) * (e_diff - em_eta / zv)
        out[:, 1, 0] = (r / t) * (1.0 - em_eta / zv)
        out[:, 1, 1] = (-(zv / t ** 2) * e_theta
                        + (r ** 2 / t ** 2) * (1.0 + e_diff - em_eta / zv))
        return out

    def _zipper_chunk(self, chunk: int) -> np.ndarray:
        if self._zip_cache is not None and self._zip_cache[0] == chunk:
            return self._zip_cache[1]
        spec = self.spec
        d = spec.dim
        m = randsrc.CHUNK
        rng = randsrc.stream_rng(self.seed, randsrc.KIND_PHASES, chunk)
        units = randsrc.haar_block(rng, 4 * m, d).reshape(m, 4, d, d)
        u0, v0, u1, v1 = units[:, 0], units[:, 1], units[:, 2], units[:, 3]
        t0, t1 = zipper_hats(spec.verblunsky, complex(self.point.value))
        left = np.zeros((m, 2 * d, 2 * d), dtype=complex)
        left[:, :d, :d] = v0
        left[:, d:, d:] = np.conj(np.transpose(u0, (0, 2, 1)))
        mid = np.zeros((m, 2 * d, 2 * d), dtype=complex)
        mid[:, :d, :d] = v1
        mid[:, d:, d:] = np.conj(np.transpose(u1, (0, 2, 1)))
        mats = left @ (t0 @ (mid @ t1))
        self._zip_cache = (chunk, mats)
        return mats

    def _take_zipper(self, start, count):
        out = np.empty((count, self.dim, self.dim), dtype=complex)
        filled = 0
        while filled < count:
            site = start + filled
            chunk, offset = divmod(site, randsrc.CHUNK)
            take = min(randsrc.CHUNK - offset, count - filled)
            out[filled:filled + take] = self._zipper_chunk(chunk)[offset:offset + take]
            filled += take
        return out
