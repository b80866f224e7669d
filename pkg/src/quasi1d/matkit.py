"""Dense matrix kernels and structured-group utilities.

Everything operates on plain numpy arrays in double precision, real or
complex.  Group membership is always expressed through the residual of the
defining quadratic identity, so callers assert closeness rather than exact
membership.  All functions are pure; batched (stacked) input is accepted
wherever numpy's linalg does.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import BadOrder, LogUndefined, NotLorentz, Overflow, RankDeficient

__all__ = [
    "GroupTag",
    "symplectic_form",
    "lorentz_form",
    "qr_pos",
    "expm",
    "logm_principal",
    "wedge_power",
    "group_residual",
    "cayley_realify",
    "canonical_basis",
]

_QR_RANK_RTOL = 1e-12
_LORENTZ_PRE_TOL = 1e-8


@dataclass(frozen=True)
class GroupTag:
    """Which group predicate applies to a square matrix.

    ``kind`` is one of ``symplectic`` (Sp_D(R), matrices of size 2D),
    ``lorentz`` (U(D,D), size 2D), ``unitary`` (U(n)), ``special_linear``
    (SL_n(R)) or ``none``.  ``size`` is D for the first two and n otherwise.
    """

    kind: str
    size: int = 0

    @classmethod
    def symplectic(cls, d: int) -> "GroupTag":
        return cls("symplectic", d)

    @classmethod
    def lorentz(cls, d: int) -> "GroupTag":
        return cls("lorentz", d)

    @classmethod
    def unitary(cls, n: int) -> "GroupTag":
        return cls("unitary", n)

    @classmethod
    def special_linear(cls, n: int) -> "GroupTag":
        return cls("special_linear", n)

    @classmethod
    def none(cls) -> "GroupTag":
        return cls("none", 0)

    @property
    def matrix_dim(self) -> int:
        if self.kind in ("symplectic", "lorentz"):
            return 2 * self.size
        return self.size


def symplectic_form(d: int) -> np.ndarray:
    """The standard form J = [[0, -I_d], [I_d, 0]] of size 2d."""
    j = np.zeros((2 * d, 2 * d))
    j[:d, d:] = -np.eye(d)
    j[d:, :d] = np.eye(d)
    return j


def lorentz_form(d: int) -> np.ndarray:
    """The signature-(d, d) form diag(I_d, -I_d)."""
    return np.diag(np.r_[np.ones(d), -np.ones(d)])


def qr_pos(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization with strictly positive real diagonal of R.

    The positivity constraint makes the factorization unique, which is what
    both the Lyapunov estimator and exact Haar sampling rely on.  Stacked
    input of shape (..., n, n) is factored batchwise.

    Raises
    ------
    RankDeficient
        If any diagonal entry of R falls below 1e-12 times the largest
        column norm of the input.
    """
    m = np.asarray(m)
    q, r = np.linalg.qr(m)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    col_norms = np.linalg.norm(m, axis=-2)
    limit = _QR_RANK_RTOL * col_norms.max(axis=-1, keepdims=True)
    if np.any(np.abs(diag) <= limit):
        raise RankDeficient("R diagonal below relative tolerance 1e-12")
    phase = diag / np.abs(diag)
    q = q * phase[..., None, :]
    r = r * np.conj(phase)[..., :, None]
    return q, r


# Pade-13 coefficients and scaling threshold for the matrix exponential.
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a degree-13 Pade
    approximant.

    Accurate to relative error well below 1e-12 for ||a|| up to ~50; larger
    inputs are handled by additional squarings at the usual cost in
    accuracy.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expm expects a square matrix")
    if not np.all(np.isfinite(a)):
        raise Overflow("non-finite entries in expm input")
    a = a.astype(np.complex128 if np.iscomplexobj(a) else np.float64)
    n = a.shape[0]
    ident = np.eye(n, dtype=a.dtype)

    norm = np.linalg.norm(a, 1)
    squarings = 0
    if norm > _THETA13:
        squarings = int(np.ceil(np.log2(norm / _THETA13)))
        a = a / (2.0 ** squarings)

    b = _PADE13
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a2 @ a4
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    try:
        r = np.linalg.solve(v - u, v + u)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - degenerate Pade
        raise Overflow(f"Pade denominator singular: {exc}") from exc
    for _ in range(squarings):
        r = r @ r
    if not np.all(np.isfinite(r)):
        raise Overflow("matrix exponential overflowed double precision")
    return r


def _sqrtm_db(m: np.ndarray, maxiter: int = 64) -> np.ndarray:
    """Principal square root via the Denman-Beavers iteration.

    Quadratically convergent for matrices whose spectrum avoids the closed
    negative real ray, which callers have already checked.
    """
    y = m.copy()
    z = np.eye(m.shape[0], dtype=m.dtype)
    for _ in range(maxiter):
        y_next = 0.5 * (y + np.linalg.inv(z))
        z_next = 0.5 * (z + np.linalg.inv(y))
        delta = np.linalg.norm(y_next - y, "fro")
        y, z = y_next, z_next
        if delta <= 1e-15 * max(1.0, np.linalg.norm(y, "fro")):
            return y
    raise LogUndefined("square-root iteration did not converge")


def logm_principal(m: np.ndarray) -> np.ndarray:
    """Principal matrix logarithm by inverse scaling-and-squaring.

    Repeated principal square roots bring the matrix within ||m - I|| < 0.25
    of the identity, where an alternating power series finishes the job.
    Only near-identity logarithms are semantically needed here, but the
    routine works on the full principal domain.

    Raises
    ------
    LogUndefined
        If an eigenvalue lies on the closed negative real ray within
        tolerance 1e-12.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("logm_principal expects a square matrix")
    eigs = np.linalg.eigvals(m)
    on_ray = (np.abs(eigs.imag) <= 1e-12) & (eigs.real <= 1e-12)
    if np.any(on_ray):
        raise LogUndefined("eigenvalue on the closed negative real ray")

    x = m.astype(np.complex128 if np.iscomplexobj(m) else np.float64)
    n = x.shape[0]
    ident = np.eye(n, dtype=x.dtype)
    halvings = 0
    while np.linalg.norm(x - ident, 2) >= 0.25:
        x = _sqrtm_db(x)
        halvings += 1
        if halvings > 64:  # pragma: no cover - cannot happen off the ray
            raise LogUndefined("inverse scaling-and-squaring did not reduce")

    y = x - ident
    term = y.copy()
    out = y.copy()
    for j in range(2, 64):
        term = term @ y
        incr = ((-1.0) ** (j + 1) / j) * term
        out += incr
        if np.linalg.norm(incr, "fro") <= 1e-18 * max(1.0, np.linalg.norm(out, "fro")):
            break
    return out * (2.0 ** halvings)


def wedge_power(m: np.ndarray, p: int) -> np.ndarray:
    """The p-th exterior power: the matrix of p x p minors.

    Rows and columns are indexed by the p-element subsets of {0,...,n-1} in
    lexicographic order, so the construction is multiplicative:
    wedge_power(a @ b, p) == wedge_power(a, p) @ wedge_power(b, p).
    """
    m = np.asarray(m)
    n = m.shape[-1]
    if not 1 <= p <= n:
        raise BadOrder(f"exterior order {p} outside [1, {n}]")
    if p == 1:
        return m.copy()
    subsets = np.array(list(itertools.combinations(range(n), p)))
    blocks = m[..., subsets[:, None, :, None], subsets[None, :, None, :]]
    return np.linalg.det(blocks)


def group_residual(m: np.ndarray, tag: GroupTag) -> float:
    """Distance of a square matrix from the group named by ``tag``.

    Returns ||tM J m - J|| (symplectic), ||m* L m - L|| (Lorentz),
    ||m* m - I|| (unitary) or |det m - 1| (special linear), all in the
    spectral norm; zero exactly on group members.  ``tag.none()`` gives 0.
    """
    m = np.asarray(m)
    if tag.kind == "none":
        return 0.0
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("group_residual expects a square matrix")
    if m.shape[0] != tag.matrix_dim:
        raise ValueError(
            f"matrix of size {m.shape[0]} does not match tag {tag.kind}({tag.size})")
    if tag.kind == "symplectic":
        j = symplectic_form(tag.size)
        return float(np.linalg.norm(m.T @ j @ m - j, 2))
    if tag.kind == "lorentz":
        form = lorentz_form(tag.size)
        return float(np.linalg.norm(m.conj().T @ form @ m - form, 2))
    if tag.kind == "unitary":
        return float(np.linalg.norm(m.conj().T @ m - np.eye(tag.size), 2))
    if tag.kind == "special_linear":
        return float(abs(np.linalg.det(m) - 1.0))
    raise ValueError(f"unknown group tag kind {tag.kind!r}")


def _realify(m: np.ndarray) -> np.ndarray:
    """Separate real and imaginary parts into blocks [[A, -B], [B, A]]."""
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def cayley_realify(g: np.ndarray) -> np.ndarray:
    """Conjugate a U(D,D) matrix to a real matrix in the standard symplectic
    group of order 2D.

    The composite map is: Cayley transform C*gC into the complex symplectic
    group, block realification, then the basis interleaving that carries the
    doubled form diag(J_D, J_D) onto the canonical J_2D.  Without that final
    permutation the output would preserve the wrong (equivalent) form.
    """
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] % 2:
        raise ValueError("cayley_realify expects a square matrix of even size")
    d = g.shape[0] // 2
    if group_residual(g, GroupTag.lorentz(d)) > _LORENTZ_PRE_TOL:
        raise NotLorentz(f"Lorentz residual above {_LORENTZ_PRE_TOL}")
    eye = np.eye(d)
    cayley = np.block([[eye, -1j * eye], [eye, 1j * eye]]) / np.sqrt(2.0)
    y = _realify(cayley.conj().T @ g @ cayley)
    order = np.r_[0:d, 2 * d:3 * d, d:2 * d, 3 * d:4 * d]
    return y[np.ix_(order, order)]


def _elementary(d: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((d, d))
    e[i, j] = 1.0
    return e


def _sp_basis(d: int) -> list[np.ndarray]:
    """Basis of {[[A, B1], [B2, -tA]] : B1, B2 symmetric}, D(2D+1) elements."""
    out = []
    zero = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            a = _elementary(d, i, j)
            out.append(np.block([[a, zero], [zero, -a.T]]))
    for i in range(d):
        for j in range(i, d):
            s = _elementary(d, i, j) + _elementary(d, j, i) if i != j \
                else _elementary(d, i, i)
            out.append(np.block([[zero, s], [zero, zero]]))
            out.append(np.block([[zero, zero], [s, zero]]))
    return out


def _udd_basis(d: int) -> list[np.ndarray]:
    """Real basis of {T : T* L + L T = 0}, i.e. blocks [[A, B], [B*, C]]
    with A, C anti-Hermitian and B arbitrary complex; 4 D^2 elements."""
    out = []
    zero = np.zeros((d, d), dtype=complex)

    def anti_hermitian_basis():
        mats = [1j * _elementary(d, k, k) for k in range(d)]
        for k in range(d):
            for l in range(k + 1, d):
                mats.append(_elementary(d, k, l) - _elementary(d, l, k))
                mats.append(1j * (_elementary(d, k, l) + _elementary(d, l, k)))
        return mats

    for a in anti_hermitian_basis():
        out.append(np.block([[a.astype(complex), zero], [zero, zero]]))
    for c in anti_hermitian_basis():
        out.append(np.block([[zero, zero], [zero, c.astype(complex)]]))
    for k in range(d):
        for l in range(d):
            for b in (_elementary(d, k, l), 1j * _elementary(d, k, l)):
                out.append(np.block([[zero, b.astype(complex)],
                                     [b.conj().T.astype(complex), zero]]))
    return out


def _xyz_generators(d: int) -> list[np.ndarray]:
    """The near-diagonal {X_ij, Y_ij : |i-j| <= 1} generator set of the
    symplectic Lie algebra."""
    out = []
    zero = np.zeros((d, d))
    for i in range(d):
        for j in range(i, min(i + 2, d)):
            s = 0.5 * (_elementary(d, i, j) + _elementary(d, j, i))
            x = np.block([[zero, s], [zero, zero]])
            out.append(x)
            out.append(x.T)
    return out


def canonical_basis(kind: str, d: int) -> list[np.ndarray]:
    """Canonical generating sets: ``sp`` (full symplectic algebra basis,
    D(2D+1) matrices), ``uDD`` (real basis of the Lorentz algebra, 4D^2
    matrices) or ``xyz`` (the near-diagonal symplectic generators)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if kind == "sp":
        return _sp_basis(d)
    if kind == "uDD":
        return _udd_basis(d)
    if kind == "xyz":
        return _xyz_generators(d)
    raise ValueError(f"unknown basis kind {kind!r}")
